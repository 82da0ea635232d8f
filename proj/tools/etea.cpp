// etea: decompose a signal into transients, a lowpass baseline and noise.
//
//   etea denoise  -i y.csv -o out.csv [--report r.json]
//   etea validate -i out.csv [--output p.csv] [--report v.json]
//   etea synth    [--preset step|protuberance | --spec s.json] [--seed N] -o y.csv
//   etea bench    [--sizes 5000,100000] [--orders 1,2] [--d 1]
//
// Exit status: 0 success, 1 validate found too many violations, 2 bad
// arguments or I/O, 3 solver failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "etea/etea.hpp"
#include "io.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

/// Thrown for configuration problems detected after parsing (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Wraps failures inside the numerical work (exit 3).
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  int filter_d = 1;
  double filter_fc = 0.013;
  int order = 1;
  double rate = 0.94;
  double halflife = 0.0;
  std::string penalty = "abs";
  double a = 1.0;
  double eps = etea::kDefaultSmoothing;
  double lambda = 0.0;
  double sigma = 0.0;
  bool estimate_sigma = false;
  double multiplier = etea::kDefaultLambdaMultiplier;
  int max_iter = 50;
  double tol = 1e-8;
  std::string init = "y";

  CLI::Option* rate_opt = nullptr;
  CLI::Option* halflife_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* sigma_opt = nullptr;
};

void add_model_options(CLI::App& cmd, ModelOptions& m) {
  cmd.add_option("--filter-d", m.filter_d, "Highpass order parameter d")->capture_default_str();
  cmd.add_option("--filter-fc", m.filter_fc, "Highpass cutoff in cycles/sample")->capture_default_str();
  cmd.add_option("--order", m.order, "Sparsifying operator order (1 or 2)")->capture_default_str();
  m.rate_opt = cmd.add_option("--rate", m.rate, "Transient decay rate r")->capture_default_str();
  m.halflife_opt = cmd.add_option("--halflife", m.halflife, "Transient half-life N0 in samples (sets r = 0.5^(1/N0))");
  m.rate_opt->excludes(m.halflife_opt);
  cmd.add_option("--penalty", m.penalty, "Penalty: abs, log or atan")->capture_default_str();
  cmd.add_option("--a", m.a, "Penalty shape parameter (log, atan)")->capture_default_str();
  cmd.add_option("--eps", m.eps, "Penalty smoothing epsilon")->capture_default_str();
  m.lambda_opt = cmd.add_option("--lambda", m.lambda, "Regularization weight (overrides the noise rule)");
  m.sigma_opt = cmd.add_option("--sigma", m.sigma, "Noise standard deviation for the lambda rule");
  auto* est = cmd.add_flag("--estimate-sigma", m.estimate_sigma, "Estimate the noise level from the data (default)");
  m.lambda_opt->excludes(m.sigma_opt)->excludes(est);
  m.sigma_opt->excludes(est);
  cmd.add_option("--lambda-multiplier", m.multiplier, "Multiplier in the lambda rule")->capture_default_str();
  cmd.add_option("--max-iter", m.max_iter, "Maximum MM iterations")->capture_default_str();
  cmd.add_option("--tol", m.tol, "Relative iterate-change tolerance")->capture_default_str();
  cmd.add_option("--init", m.init, "Initial estimate: y or zeros")->capture_default_str();
}

etea::SolverConfig base_config(const ModelOptions& m) {
  try {
    etea::SolverConfig cfg;
    cfg.filter = etea::ZeroPhaseFilter::design(m.filter_d, m.filter_fc);
    cfg.op = m.halflife_opt && m.halflife_opt->count() > 0
                 ? etea::SparsifyingOperator::from_halflife(m.order, m.halflife)
                 : etea::SparsifyingOperator(m.order, m.rate);
    const auto kind = etea::parse_penalty_kind(m.penalty);
    if (!kind) throw UsageError("unknown penalty '" + m.penalty + "' (expected abs, log or atan)");
    cfg.penalty = etea::make_penalty(*kind, m.a, m.eps);
    cfg.max_iter = m.max_iter;
    cfg.tol = m.tol;
    if (m.init == "y")
      cfg.init = etea::Initialization::from_observation;
    else if (m.init == "zeros")
      cfg.init = etea::Initialization::zeros;
    else
      throw UsageError("--init must be 'y' or 'zeros'");
    cfg.validate();
    if (auto warning = cfg.op.range_warning()) std::cerr << "etea: warning: " << *warning << '\n';
    return cfg;
  } catch (const etea::Error& e) {
    throw UsageError(e.what());
  }
}

struct LambdaChoice {
  double lambda = 0.0;
  std::optional<double> sigma;
};

LambdaChoice choose_lambda(const ModelOptions& m, const etea::SolverConfig& cfg, std::span<const double> y) {
  LambdaChoice out;
  try {
    if (m.lambda_opt->count() > 0) {
      out.lambda = m.lambda;
    } else {
      const double sigma = m.sigma_opt->count() > 0 ? m.sigma : etea::estimate_sigma(y, cfg.filter);
      out.sigma = sigma;
      out.lambda = etea::select_lambda(sigma, cfg.filter, cfg.op, 0, m.multiplier);
    }
  } catch (const etea::Error& e) {
    throw UsageError(e.what());
  }
  if (!(out.lambda > 0.0) || !std::isfinite(out.lambda))
    throw UsageError("lambda must be positive (noise level estimated as zero? pass --lambda or --sigma)");
  return out;
}

void check_length(const etea::SolverConfig& cfg, std::size_t n) {
  if (n < cfg.min_length())
    throw UsageError("signal has " + std::to_string(n) + " samples; this configuration needs at least " +
                     std::to_string(cfg.min_length()));
}

void emit_json(const Json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-")
    std::cout << text;
  else
    etea::tools::write_atomic(path, text);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

etea::Decomposition run_solver(std::span<const double> y, const etea::SolverConfig& cfg) {
  try {
    return etea::solve(y, cfg);
  } catch (const etea::Error& e) {
    throw SolverFailure(e.what());
  }
}

// ---------------------------------------------------------------- denoise

struct DenoiseOptions {
  ModelOptions model;
  std::string input;
  std::string output;
  std::string report;
};

int run_denoise(const DenoiseOptions& o) {
  auto cfg = base_config(o.model);
  const auto table = etea::tools::read_csv(o.input);
  const int y_col = table.find("y");
  const auto& y = table.columns[y_col >= 0 ? static_cast<std::size_t>(y_col) : 0];
  check_length(cfg, y.size());
  const auto choice = choose_lambda(o.model, cfg, y);
  cfg.lambda = choice.lambda;

  const auto start = std::chrono::steady_clock::now();
  const auto dec = run_solver(y, cfg);
  const double runtime = elapsed_ms(start);

  etea::tools::write_atomic(o.output, etea::tools::to_csv({"y", "x", "f", "residual"}, {y, dec.x, dec.f, dec.residual}));

  Json report;
  report["lambda_used"] = cfg.lambda;
  report["iterations"] = dec.iterations;
  report["final_cost"] = dec.cost_history.back();
  report["cost_history"] = dec.cost_history;
  report["runtime_ms"] = runtime;
  report["converged"] = dec.converged;
  if (choice.sigma) report["sigma_used"] = *choice.sigma;
  emit_json(report, o.report);
  return 0;
}

// --------------------------------------------------------------- validate

struct ValidateOptions {
  ModelOptions model;
  std::string input;
  std::string output;
  std::string report;
  double tol_opt = etea::kDefaultOptimalityTolerance;
  double max_fraction = 0.005;
};

int run_validate(const ValidateOptions& o) {
  auto cfg = base_config(o.model);
  const auto table = etea::tools::read_csv(o.input);
  const int y_col = table.find("y");
  const int x_col = table.find("x");
  const auto& y = table.columns[y_col >= 0 ? static_cast<std::size_t>(y_col) : 0];
  check_length(cfg, y.size());
  cfg.lambda = choose_lambda(o.model, cfg, y).lambda;

  // A denoise output carries its own estimate; anything else is solved here.
  std::vector<double> x_star;
  if (x_col >= 0)
    x_star = table.columns[static_cast<std::size_t>(x_col)];
  else
    x_star = run_solver(y, cfg).x;

  etea::OptimalityReport rep;
  try {
    rep = etea::optimality_report(y, x_star, cfg, o.tol_opt);
  } catch (const etea::Error& e) {
    throw SolverFailure(e.what());
  }

  if (!o.output.empty()) {
    std::vector<double> index(rep.p.size());
    std::iota(index.begin(), index.end(), 0.0);
    etea::tools::write_atomic(o.output, etea::tools::to_csv({"n", "v", "p"}, {index, rep.v, rep.p}));
  }

  const double allowed = o.max_fraction * static_cast<double>(rep.p.size());
  const bool ok = static_cast<double>(rep.violation_count) <= allowed;
  Json report;
  report["lambda"] = rep.lambda;
  report["max_abs_p"] = rep.max_abs_p;
  report["violation_count"] = rep.violation_count;
  report["samples"] = rep.p.size();
  report["tol_opt"] = o.tol_opt;
  report["max_violation_fraction"] = o.max_fraction;
  report["passed"] = ok;
  emit_json(report, o.report);
  return ok ? 0 : kExitViolations;
}

// ------------------------------------------------------------------ synth

Json spec_to_json(const etea::SyntheticSpec& s) {
  Json j;
  j["n"] = s.n;
  j["sigma_w"] = s.sigma_w;
  j["seed"] = s.seed;
  j["baseline"] = Json::array();
  for (const auto& b : s.baseline)
    j["baseline"].push_back({{"amplitude", b.amplitude}, {"frequency", b.frequency}, {"phase", b.phase}});
  j["transients"] = Json::array();
  for (const auto& t : s.transients)
    j["transients"].push_back({{"type", static_cast<int>(t.type)},
                               {"onset", t.onset},
                               {"amplitude", t.amplitude},
                               {"rate", t.rate}});
  return j;
}

etea::SyntheticSpec spec_from_json(const Json& j) {
  etea::SyntheticSpec s;
  s.n = j.at("n").get<std::size_t>();
  s.sigma_w = j.value("sigma_w", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  for (const auto& b : j.value("baseline", Json::array()))
    s.baseline.push_back({b.at("amplitude").get<double>(), b.at("frequency").get<double>(), b.value("phase", 0.0)});
  for (const auto& t : j.value("transients", Json::array())) {
    const int type = t.at("type").get<int>();
    if (type != 0 && type != 1) throw UsageError("transient type must be 0 or 1");
    s.transients.push_back({static_cast<etea::TransientType>(type), t.at("onset").get<std::size_t>(),
                            t.at("amplitude").get<double>(), t.at("rate").get<double>()});
  }
  return s;
}

struct SynthOptions {
  std::string preset = "step";
  std::string spec;
  std::uint64_t seed = 0;
  std::string output;
  std::string sidecar;
  CLI::Option* seed_opt = nullptr;
};

int run_synth(const SynthOptions& o) {
  etea::SyntheticSpec spec;
  if (!o.spec.empty()) {
    std::ifstream in(o.spec);
    if (!in) throw etea::tools::IoError("cannot open '" + o.spec + "' for reading");
    try {
      spec = spec_from_json(Json::parse(in));
    } catch (const Json::exception& e) {
      throw etea::tools::IoError("'" + o.spec + "': " + e.what());
    }
    if (o.seed_opt->count() > 0) spec.seed = o.seed;
  } else if (o.preset == "step") {
    spec = etea::SyntheticSpec::step_preset(o.seed);
  } else if (o.preset == "protuberance") {
    spec = etea::SyntheticSpec::protuberance_preset(o.seed);
  } else {
    throw UsageError("unknown preset '" + o.preset + "' (expected step or protuberance)");
  }

  etea::SyntheticSignal sig;
  try {
    sig = etea::generate(spec);
  } catch (const etea::Error& e) {
    throw UsageError(e.what());
  }
  etea::tools::write_atomic(o.output, etea::tools::to_csv({"y", "f", "x", "w"}, {sig.y, sig.f, sig.x, sig.w}));
  const std::string sidecar = o.sidecar.empty() ? o.output + ".json" : o.sidecar;
  etea::tools::write_atomic(sidecar, spec_to_json(spec).dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ bench

struct BenchOptions {
  std::vector<std::size_t> sizes{5000, 100000};
  std::vector<int> orders{1};
  std::vector<int> ds{1};
  int iterations = 40;
  int trials = 10;
  std::string output;
};

int bench_threads() {
  const char* env = std::getenv("ETEA_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError("ETEA_THREADS must be a positive integer");
  if (v != 1) std::cerr << "etea: note: ETEA_THREADS=" << v << " ignored; benchmarks run single-threaded\n";
  return 1;
}

int run_bench(const BenchOptions& o) {
  bench_threads();
  if (o.sizes.empty()) throw UsageError("--sizes must list at least one size");
  if (o.iterations < 1 || o.trials < 1) throw UsageError("--iterations and --trials must be >= 1");

  std::vector<std::vector<double>> columns(7);
  for (int d : o.ds) {
    for (int order : o.orders) {
      etea::SolverConfig cfg;
      try {
        cfg.filter = etea::ZeroPhaseFilter::design(d, 0.013);
        cfg.op = etea::SparsifyingOperator(order, order == 1 ? 0.94 : 0.95);
      } catch (const etea::Error& e) {
        throw UsageError(e.what());
      }
      for (std::size_t n : o.sizes) {
        if (n < cfg.min_length())
          throw UsageError("bench size " + std::to_string(n) + " is below the minimum " +
                           std::to_string(cfg.min_length()));
      }
      cfg.lambda = etea::select_lambda(0.2, cfg.filter, cfg.op);
      for (std::size_t n : o.sizes) {
        auto spec = order == 1 ? etea::SyntheticSpec::step_preset(1) : etea::SyntheticSpec::protuberance_preset(1);
        spec.n = n;
        std::erase_if(spec.transients, [n](const etea::Transient& t) { return t.onset >= n; });
        const auto y = etea::generate(spec).y;

        std::vector<double> times;
        for (int trial = 0; trial < o.trials; ++trial) {
          const auto start = std::chrono::steady_clock::now();
          try {
            const etea::MmProblem problem(y, cfg);
            std::vector<double> x = y;
            for (int k = 0; k < o.iterations; ++k) x = problem.step(x);
          } catch (const etea::Error& e) {
            throw SolverFailure(e.what());
          }
          times.push_back(elapsed_ms(start));
        }
        const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
        double var = 0.0;
        for (double t : times) var += (t - mean) * (t - mean);
        const double sd = times.size() > 1 ? std::sqrt(var / static_cast<double>(times.size() - 1)) : 0.0;
        const std::vector<double> row{static_cast<double>(n), static_cast<double>(order), static_cast<double>(d),
                                      static_cast<double>(o.iterations), static_cast<double>(o.trials), mean, sd};
        for (std::size_t c = 0; c < row.size(); ++c) columns[c].push_back(row[c]);
      }
    }
  }
  const auto csv = etea::tools::to_csv({"n", "order", "d", "iterations", "trials", "mean_ms", "stdev_ms"}, columns);
  if (o.output.empty() || o.output == "-")
    std::cout << csv;
  else
    etea::tools::write_atomic(o.output, csv);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential transient excision: split a signal into sparse transients, a lowpass baseline and noise"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "etea 1.0.0");

  DenoiseOptions den;
  auto* denoise = app.add_subcommand("denoise", "Decompose a signal; write y, x, f, residual");
  denoise->add_option("-i,--input", den.input, "Input CSV (first column, or column 'y')")->required();
  denoise->add_option("-o,--output", den.output, "Output CSV")->required();
  denoise->add_option("--report", den.report, "JSON report path (default: standard output)");
  add_model_options(*denoise, den.model);

  ValidateOptions val;
  auto* validate = app.add_subcommand("validate", "Check the optimality condition of a decomposition");
  validate->add_option("-i,--input", val.input, "Denoise output (columns y, x) or a raw signal")->required();
  validate->add_option("-o,--output", val.output, "CSV of (n, v, p)");
  validate->add_option("--report", val.report, "JSON summary path (default: standard output)");
  validate->add_option("--tol-opt", val.tol_opt, "Relative slack on |p| <= lambda")->capture_default_str();
  validate->add_option("--max-violation-fraction", val.max_fraction, "Allowed fraction of violating samples")
      ->capture_default_str();
  add_model_options(*validate, val.model);

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic test signal");
  auto* preset = synth->add_option("--preset", syn.preset, "step or protuberance")->capture_default_str();
  synth->add_option("--spec", syn.spec, "JSON signal specification")->excludes(preset);
  syn.seed_opt = synth->add_option("--seed", syn.seed, "Noise seed")->capture_default_str();
  synth->add_option("-o,--output", syn.output, "Output CSV (y, f, x, w)")->required();
  synth->add_option("--sidecar", syn.sidecar, "Specification JSON path (default: <output>.json)");

  BenchOptions ben;
  auto* bench = app.add_subcommand("bench", "Time fixed-iteration solves across signal lengths");
  bench->add_option("--sizes", ben.sizes, "Signal lengths")->delimiter(',')->capture_default_str();
  bench->add_option("--orders", ben.orders, "Operator orders")->delimiter(',')->capture_default_str();
  bench->add_option("--d", ben.ds, "Filter order parameters")->delimiter(',')->capture_default_str();
  bench->add_option("--iterations", ben.iterations, "MM steps per trial")->capture_default_str();
  bench->add_option("--trials", ben.trials, "Trials per configuration")->capture_default_str();
  bench->add_option("-o,--output", ben.output, "Output CSV (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*denoise) return run_denoise(den);
    if (*validate) return run_validate(val);
    if (*synth) return run_synth(syn);
    if (*bench) return run_bench(ben);
  } catch (const UsageError& e) {
    std::cerr << "etea: " << e.what() << '\n';
    return kExitUsage;
  } catch (const etea::tools::IoError& e) {
    std::cerr << "etea: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverFailure& e) {
    std::cerr << "etea: solver failed: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "etea: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
