#include "covel/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "covel/calibration.hpp"
#include "covel/design_file.hpp"
#include "covel/experiment.hpp"
#include "covel/hypothesis.hpp"
#include "covel/matrix_io.hpp"

namespace covel {

namespace {

using json = nlohmann::json;

struct TestConfig {
  std::string input;
  std::string sigma0;  // identity | zero | path; empty = command default
  std::string mean = "unknown";
  std::string mu = "zero";
  double alpha = 0.05;
  std::optional<Index> band_tau;
  std::string variant = "L5";
  std::string weights;
  int bootstrap = 0;
  std::optional<double> gamma;
  std::uint64_t seed = 0;
  double split_frac = 0.4;
  Index top_k = 4;
  std::string output;
  unsigned threads = 1;
};

struct PowerConfig {
  std::string sigma;
  std::string design;
  std::string sigma0 = "identity";
  std::string variant = "cov";
  std::string weights;
  Index n = 0;
  Index p = 0;
  Index tau = 0;
  std::optional<Index> k;
  double delta = 0.0;
  double alpha = 0.05;
  Index moment_pairs = 20000;
  std::uint64_t seed = 0;
  std::string output;
};

struct SimulateConfig {
  std::string design_file;
  std::string output;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
};

json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return nullptr;
  return x;
}

SymMatrix load_sym(const std::string& source, Index p, const char* name) {
  if (source == "identity") return SymMatrix::Identity(p, p);
  if (source == "zero") return SymMatrix::Zero(p, p);
  const SymMatrix m = read_matrix_csv(source);
  require_square(m, p, name);
  require_symmetric(m, name, 1e-12);
  return m;
}

LinearFunctional load_weights(const std::string& path, Index p) {
  if (path.empty()) return {};
  LinearFunctional w(read_vector_csv(path));
  w.weights(p);  // dimension check
  return w;
}

Eigen::VectorXd load_mu(const std::string& source, Index p) {
  if (source == "zero") return Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mu = read_vector_csv(source);
  if (mu.size() != p) {
    throw Error(ErrorCode::dimension_mismatch,
                "mu has length " + std::to_string(mu.size()) +
                    ", data dimension is " + std::to_string(p));
  }
  return mu;
}

void emit(const json& report, const std::string& output, std::ostream& out) {
  const std::string text = report.dump(2);
  out << text << '\n';
  if (!output.empty()) {
    std::ofstream f(output);
    if (!f) throw Error(ErrorCode::io_error, "cannot open '" + output + "' for writing");
    f << text << '\n';
    if (!f) throw Error(ErrorCode::io_error, "write to '" + output + "' failed");
  }
}

int cmd_test(const TestConfig& cfg, std::ostream& out) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    throw Error(ErrorCode::bad_probability, "--alpha must lie in (0, 1)");
  }
  const SampleMatrix data = read_matrix_csv(cfg.input);
  const Index p = data.cols();
  const LinearFunctional w = load_weights(cfg.weights, p);

  ConstraintSet set;
  if (cfg.band_tau) {
    const Index tau = *cfg.band_tau;
    std::optional<SymMatrix> target;
    if (!cfg.sigma0.empty()) target = load_sym(cfg.sigma0, p, "sigma0");
    if (cfg.variant == "L3") {
      set = build_banded(data, tau, KnownMean{load_mu(cfg.mu, p)}, w, target);
    } else if (cfg.variant == "L4") {
      set = build_banded(data, tau, UnknownMean{}, w, target);
    } else if (cfg.variant == "L5") {
      set = build_corner(data, tau, w, UnknownMean{}, target);
    } else if (cfg.variant == "sparse" || cfg.variant == "SPARSE") {
      set = build_sparse_adaptive(data, tau, cfg.split_frac, cfg.top_k);
    } else {
      throw Error(ErrorCode::bad_args, "--variant must be L3, L4, L5 or sparse");
    }
  } else {
    const SymMatrix sigma0 = load_sym(cfg.sigma0.empty() ? "identity" : cfg.sigma0, p, "sigma0");
    if (cfg.mean == "known") {
      set = build_known_mean(data, load_mu(cfg.mu, p), sigma0, w);
    } else if (cfg.mean == "unknown") {
      set = build_unknown_mean(data, sigma0, w);
    } else {
      throw Error(ErrorCode::bad_args, "--mean must be known or unknown");
    }
  }

  const TestOutcome outcome = decide(solve_dual(set), set.method, cfg.alpha);
  const ELSolution& sol = outcome.diagnostics;

  json report;
  report["method"] = to_string(outcome.method);
  report["alpha"] = cfg.alpha;
  report["statistic"] = number_or_inf(outcome.statistic);
  report["df"] = outcome.df;
  report["p_value"] = outcome.p_value;
  report["chi2_reject"] = outcome.reject;
  report["n"] = data.rows();
  report["p"] = p;
  report["pairs"] = set.size();
  report["tau"] = cfg.band_tau ? json(*cfg.band_tau) : json(nullptr);
  report["solver"] = {
      {"status", to_string(sol.status)},
      {"iterations", sol.iterations},
      {"rank", sol.rank},
      {"rho", {sol.rho(0), sol.rho(1)}},
      {"gradient_norm", sol.gradient_norm},
  };
  if (!set.meta.positions.empty()) {
    json positions = json::array();
    for (const auto& [r, c] : set.meta.positions) positions.push_back({r + 1, c + 1});
    report["selected_positions"] = positions;
  }

  if (cfg.bootstrap > 0) {
    const double gamma = cfg.gamma.value_or(cfg.alpha);
    const BootstrapResult boot =
        bootstrap_calibrate(set, cfg.bootstrap, gamma, cfg.seed, cfg.threads);
    report["calibration"] = "bootstrap";
    report["reject"] = boot.reject;
    report["bootstrap"] = {
        {"B", boot.B},
        {"gamma", boot.gamma},
        {"threshold", number_or_inf(boot.threshold)},
        {"threshold_rank", boot.threshold_rank},
        {"seed", cfg.seed},
    };
  } else {
    report["calibration"] = "chi2";
    report["reject"] = outcome.reject;
    report["bootstrap"] = nullptr;
  }
  emit(report, cfg.output, out);
  return exit_ok;
}

int cmd_power(const PowerConfig& cfg, std::ostream& out) {
  SymMatrix sigma;
  if (!cfg.sigma.empty() && !cfg.design.empty()) {
    throw Error(ErrorCode::bad_args, "give either --sigma or --design, not both");
  }
  if (!cfg.sigma.empty()) {
    sigma = read_matrix_csv(cfg.sigma);
    require_symmetric(sigma, "sigma", 1e-12);
  } else if (!cfg.design.empty()) {
    DesignParams d;
    d.design = parse_design(cfg.design);
    d.n = cfg.n;
    d.p = cfg.p;
    d.tau = cfg.tau;
    d.k = cfg.k.value_or(cfg.tau + 10);
    d.delta = cfg.delta;
    sigma = design_covariance(d);
  } else {
    throw Error(ErrorCode::bad_args, "missing covariance: give --sigma or --design");
  }
  if (cfg.n < 2) throw Error(ErrorCode::bad_args, "--n must be >= 2");
  if (cfg.moment_pairs < 2) throw Error(ErrorCode::bad_args, "--moment-pairs must be >= 2");
  const Index p = sigma.rows();
  const Index N = cfg.n / 2;
  const LinearFunctional w = load_weights(cfg.weights, p);

  // Pairs at the true covariance, from a Gaussian sample of 2M rows.
  Stream rng = Stream::substream(cfg.seed, 0, StreamRole::moments);
  const SampleMatrix sample = MvNormal(sigma).sample(2 * cfg.moment_pairs, rng);
  const Eigen::VectorXd zero_mean = Eigen::VectorXd::Zero(p);

  PowerForecast f;
  json report;
  if (cfg.variant == "cov") {
    const SymMatrix sigma0 = load_sym(cfg.sigma0, p, "sigma0");
    const ConstraintSet truth = build_known_mean(sample, zero_mean, sigma, w);
    f = power_forecast(sigma, sigma0, truth, N, cfg.alpha, w);
    report["tau"] = nullptr;
  } else if (cfg.variant == "banded") {
    if (cfg.tau < 1) throw Error(ErrorCode::bad_bandwidth, "--tau is required for the banded variant");
    const ConstraintSet truth = build_corner(sample, cfg.tau, w, KnownMean{zero_mean}, sigma);
    f = power_forecast_banded(sigma, cfg.tau, truth, N, cfg.alpha, w);
    report["tau"] = cfg.tau;
  } else {
    throw Error(ErrorCode::bad_args, "--variant must be cov or banded");
  }
  report["variant"] = cfg.variant;
  report["alpha"] = cfg.alpha;
  report["N"] = N;
  report["p"] = p;
  report["zeta1"] = f.zeta1;
  report["zeta2"] = f.zeta2;
  report["nu"] = f.nu;
  report["predicted_power"] = f.predicted_power;
  report["pi11"] = f.pi11;
  report["pi22"] = f.pi22;
  report["moment_pairs"] = cfg.moment_pairs;
  report["seed"] = cfg.seed;
  emit(report, cfg.output, out);
  return exit_ok;
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& out) {
  const DesignGrid grid = parse_design_file(cfg.design_file);
  const std::uint64_t seed = cfg.seed_given ? cfg.seed : grid.seed.value_or(0);
  RateTable table;
  for (const DesignSpec& spec : expand_grid(grid, seed)) {
    RateTable part = run_experiment(spec, cfg.threads);
    for (auto& row : part.rows) table.rows.push_back(std::move(row));
  }
  if (cfg.output.empty()) {
    write_rate_csv(table, out);
  } else {
    std::ofstream f(cfg.output);
    if (!f) throw Error(ErrorCode::io_error, "cannot open '" + cfg.output + "' for writing");
    write_rate_csv(table, f);
    if (!f) throw Error(ErrorCode::io_error, "write to '" + cfg.output + "' failed");
  }
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Empirical-likelihood tests for covariance structure", "covel"};
  app.require_subcommand(1);

  TestConfig tc;
  auto* test = app.add_subcommand("test", "Test H0: Sigma = Sigma0, or bandedness of Sigma");
  test->add_option("--input", tc.input, "CSV sample, rows are observations")->required();
  test->add_option("--sigma0", tc.sigma0, "identity | zero | CSV path (default identity; banded: masked target)");
  test->add_option("--mean", tc.mean, "known | unknown")->capture_default_str();
  test->add_option("--mu", tc.mu, "known mean: zero | CSV path")->capture_default_str();
  test->add_option("--alpha", tc.alpha, "significance level")->capture_default_str();
  test->add_option("--band-tau", tc.band_tau, "bandwidth tau; switches to the bandedness test");
  test->add_option("--variant", tc.variant, "L3 | L4 | L5 | sparse")->capture_default_str();
  test->add_option("--weights", tc.weights, "CSV weight vector for the linear equation");
  test->add_option("--bootstrap", tc.bootstrap, "bootstrap replicates B (0 = chi-square calibration)");
  test->add_option("--gamma", tc.gamma, "bootstrap level (default alpha)");
  test->add_option("--seed", tc.seed, "random seed")->capture_default_str();
  test->add_option("--split-frac", tc.split_frac, "sparse variant: selection fraction")->capture_default_str();
  test->add_option("--top-k", tc.top_k, "sparse variant: number of positions")->capture_default_str();
  test->add_option("--output", tc.output, "also write the JSON report here");
  test->add_option("--threads", tc.threads, "worker threads")->capture_default_str();

  SimulateConfig sc;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo grid from a design file");
  simulate->add_option("--design", sc.design_file, "design file (key = value)")->required();
  simulate->add_option("--output", sc.output, "CSV output (default stdout)");
  auto* seed_opt = simulate->add_option("--seed", sc.seed, "master seed (overrides the file)");
  simulate->add_option("--threads", sc.threads, "worker threads")->capture_default_str();

  PowerConfig pc;
  auto* power = app.add_subcommand("power", "Forecast power from the noncentral chi-square limit");
  power->add_option("--sigma", pc.sigma, "CSV true covariance");
  power->add_option("--design", pc.design, "identity_alt | banded_alt | sparse_alt");
  power->add_option("--sigma0", pc.sigma0, "identity | zero | CSV path")->capture_default_str();
  power->add_option("--variant", pc.variant, "cov | banded")->capture_default_str();
  power->add_option("--weights", pc.weights, "CSV weight vector");
  power->add_option("--n", pc.n, "sample size (N = n/2)")->required();
  power->add_option("--p", pc.p, "dimension (design mode)");
  power->add_option("--tau", pc.tau, "design bandwidth / tested bandwidth");
  power->add_option("--k", pc.k, "banded_alt moving-sum length (default tau + 10)");
  power->add_option("--delta", pc.delta, "design delta")->capture_default_str();
  power->add_option("--alpha", pc.alpha, "significance level")->capture_default_str();
  power->add_option("--moment-pairs", pc.moment_pairs, "pairs simulated for plug-in moments")->capture_default_str();
  power->add_option("--seed", pc.seed, "random seed")->capture_default_str();
  power->add_option("--output", pc.output, "also write the JSON report here");

  std::vector<std::string> storage(args);
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_validation;
  }

  try {
    if (*test) return cmd_test(tc, out);
    if (*power) return cmd_power(pc, out);
    if (*simulate) {
      sc.seed_given = seed_opt->count() > 0;
      return cmd_simulate(sc, out);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::io_error ? exit_io : exit_validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_validation;
}

}  // namespace covel
