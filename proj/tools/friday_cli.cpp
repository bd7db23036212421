// Command-line front end: batch experiment runs, truth-model/controller
// sweeps, the offline estimator comparison, and the diagnostic check suite.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "friday/experiment.hpp"

using namespace friday;

namespace {

// Exit codes: 0 ok, 1 check-suite violation, 2 bad config, 3 runtime failure.
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitRuntime = 3;

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return config_from_file(path);
}

void apply_common(ExperimentConfig& cfg, const std::string& out,
                  std::optional<unsigned> seeds) {
  if (!out.empty()) cfg.out_dir = out;
  if (seeds) {
    cfg.seeds.clear();
    for (unsigned s = 0; s < *seeds; ++s) cfg.seeds.push_back(s);
  }
  std::filesystem::create_directories(cfg.out_dir);
}

std::string trial_path(const ExperimentConfig& cfg, const std::string& stem, unsigned seed) {
  return cfg.out_dir + "/" + stem + "_seed" + std::to_string(seed) + ".csv";
}

void print_metrics_row(const std::string& label, unsigned seed, const TrajectoryLog& log) {
  const MetricsReport m = compute_metrics(log);
  std::printf("%-24s seed %2u  track %.4f m  est %.4f N  offset %.4f m%s\n", label.c_str(),
              seed, m.mean_tracking_error, m.mean_estimation_error, m.final_offset,
              m.diverged ? "  DIVERGED" : "");
}

int cmd_run(const ExperimentConfig& cfg, std::size_t parallel) {
  const std::vector<TrajectoryLog> logs = run_experiment(cfg, parallel);
  const std::string stem = std::string(to_string(cfg.controller)) + "_" + to_string(cfg.truth) +
                           "_" + to_string(cfg.reference);
  double sum = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    emit_csv(logs[i], trial_path(cfg, stem, cfg.seeds[i]));
    print_metrics_row(stem, cfg.seeds[i], logs[i]);
    sum += mean_tracking_error(logs[i]);
  }
  std::printf("mean over %zu seeds: %.4f m\n", logs.size(),
              sum / static_cast<double>(logs.size()));
  return 0;
}

int cmd_sweep(const ExperimentConfig& base, std::size_t parallel) {
  const TruthKind truths[] = {TruthKind::ParamTruth, TruthKind::MultiTruth,
                              TruthKind::EnviroTruth};
  const ControllerKind controllers[] = {ControllerKind::Friday, ControllerKind::Adaptive,
                                        ControllerKind::Lqr};
  std::ofstream summary(base.out_dir + "/sweep_summary.csv");
  if (!summary) throw std::runtime_error("sweep: cannot open summary file");
  summary << "truth_model,controller,reference,mean_tracking_error,diverged_trials\n";
  for (TruthKind truth : truths) {
    for (ControllerKind controller : controllers) {
      ExperimentConfig cfg = base;
      cfg.truth = truth;
      cfg.params.mass = cfg.mass;
      cfg.controller = controller;
      const std::vector<TrajectoryLog> logs = run_experiment(cfg, parallel);
      const std::string stem =
          std::string(to_string(controller)) + "_" + to_string(truth) + "_" +
          to_string(cfg.reference);
      double sum = 0.0;
      unsigned diverged = 0;
      for (std::size_t i = 0; i < logs.size(); ++i) {
        emit_csv(logs[i], trial_path(cfg, stem, cfg.seeds[i]));
        sum += mean_tracking_error(logs[i]);
        if (logs[i].diverged) ++diverged;
      }
      const double mean = sum / static_cast<double>(logs.size());
      std::printf("%-10s %-10s mean track %.4f m, %u diverged\n", to_string(truth),
                  to_string(controller), mean, diverged);
      summary << to_string(truth) << "," << to_string(controller) << ","
              << to_string(cfg.reference) << "," << mean << "," << diverged << "\n";
    }
  }
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
  const std::vector<EstimatorRow> table = compare_estimators(cfg);
  std::ofstream out(cfg.out_dir + "/estimator_comparison.csv");
  if (!out) throw std::runtime_error("compare-estimators: cannot open output file");
  out << "estimator,wall_time_s,mean_estimation_error,diverged\n";
  std::printf("%-8s %12s %22s\n", "model", "wall time", "mean estimation error");
  for (const EstimatorRow& row : table) {
    std::printf("%-8s %10.3f s %20.4f N%s\n", row.name.c_str(), row.wall_time_s,
                row.mean_est_error, row.diverged ? "  DIVERGED" : "");
    out << row.name << "," << row.wall_time_s << "," << row.mean_est_error << ","
        << (row.diverged ? 1 : 0) << "\n";
  }
  return 0;
}

// Diagnostic suite: per-step Lipschitz product audit over a live run, an
// empirical Lipschitz probe, the frozen-state contraction property, and the
// post-hoc error-ball report on a converged setpoint run.
int cmd_check(const ExperimentConfig& base) {
  int failures = 0;
  const LtiModel nominal = nominal_car(base.mass);
  const RiccatiSolution sol = solve_care(nominal.a, nominal.b,
                                         Matrix::diagonal({base.q1, base.q2}),
                                         Matrix::from_rows({{base.r_weight}}));

  // Live run with the product bound checked after every normalization.
  ExperimentConfig cfg = base;
  cfg.reference = ReferenceKind::Sine;
  TruthModel truth{cfg.truth, cfg.params};
  FridayState st;
  st.gain_k = sol.gain_k;
  st.net = init_network(cfg.layer_sizes, cfg.seeds.empty() ? 0 : cfg.seeds.front(), cfg.zeta);
  st.hyper = cfg.hyper;
  st.rng.seed(1);
  std::size_t product_violations = 0;
  double worst_product = 0.0;
  st.post_normalize_hook = [&](const MlpNetwork& net) {
    const double bound = lipschitz_upper_bound(net);
    worst_product = std::max(worst_product, bound);
    if (bound > cfg.zeta * (1.0 + 1e-9)) ++product_violations;
  };
  const double dt_ctrl = 1.0 / cfg.control_rate;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration * cfg.control_rate));
  const auto substeps = static_cast<std::size_t>(std::llround(dt_ctrl / cfg.sim_substep));
  SimState s;
  double u_prev = 0.0;
  Vec last_x = {0.0, 0.0};
  Reference last_ref = reference_sine(0.0, cfg.omega, cfg.mass);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const Reference ref = reference_sine(static_cast<double>(k) * dt_ctrl, cfg.omega, cfg.mass);
    const Vec x = {s.p, s.pdot};
    std::optional<double> r_obs;
    if (k > 0) r_obs = observe_residual(truth_accel(truth, s, u_prev), u_prev, cfg.mass);
    const double u = friday_step(st, x, ref, r_obs);
    for (std::size_t i = 0; i < substeps; ++i) s = rk4_step(truth, s, u, cfg.sim_substep);
    u_prev = u;
    last_x = x;
    last_ref = ref;
  }
  std::printf("lipschitz product audit: %zu/%zu violations, worst %.12f\n", product_violations,
              n_steps, worst_product);
  if (product_violations > 0) ++failures;

  // The guarantee covers the network as executed, i.e. after normalization;
  // the last in-loop SGD update leaves the weights one step past that.
  normalize_lipschitz(st.net);
  const double emp =
      empirical_lipschitz(st.net, {-2.0, -2.0, -20.0}, {2.0, 2.0, 20.0}, 10000, 17);
  std::printf("empirical lipschitz (10^4 pairs): %.12f (budget %g)\n", emp, cfg.zeta);
  if (emp > cfg.zeta * (1.0 + 1e-9)) ++failures;

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  const double lqr_base = lqr_step(st.gain_k, last_x, last_ref);
  std::size_t contraction_violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u1 = dist(rng), u2 = dist(rng);
    const double f1 = lqr_base - mlp_forward(st.net, {last_x[0], last_x[1], u1})[0];
    const double f2 = lqr_base - mlp_forward(st.net, {last_x[0], last_x[1], u2})[0];
    if (std::abs(f1 - f2) > cfg.zeta * std::abs(u1 - u2) * (1.0 + 1e-9) + 1e-12)
      ++contraction_violations;
  }
  std::printf("contraction audit: %zu/10000 violations\n", contraction_violations);
  if (contraction_violations > 0) ++failures;

  // Error-ball report on a converged setpoint run.
  ExperimentConfig ball = base;
  ball.reference = ReferenceKind::Setpoint;
  ball.target_p = 1.0;
  ball.duration = 20.0;
  const TrajectoryLog log = run_trial(ball, ball.seeds.empty() ? 0 : ball.seeds.front());
  if (log.diverged) {
    std::printf("error-ball report: setpoint run diverged, no report\n");
    ++failures;
  } else {
    const double rho = estimate_rho(log);
    double l_r = 0.0, eps_m = 0.0, z_ss = 0.0;
    const std::size_t n = log.rows.size();
    for (std::size_t k = 1; k < n; ++k) {
      const LogRow &a = log.rows[k - 1], &b = log.rows[k];
      const double dd = std::sqrt((b.p - a.p) * (b.p - a.p) +
                                  (b.pdot - a.pdot) * (b.pdot - a.pdot) +
                                  (b.u - a.u) * (b.u - a.u));
      if (dd > 1e-9) l_r = std::max(l_r, std::abs(b.r_true - a.r_true) / dd);
    }
    for (std::size_t k = 3 * n / 4; k < n; ++k) {
      eps_m = std::max(eps_m, std::abs(log.rows[k].r_true - log.rows[k].r_hat));
      if (k >= 9 * n / 10) z_ss = std::max(z_ss, tracking_error_norm(log.rows[k]));
    }
    const StabilityConstants consts =
        stability_constants(sol, nominal.a, nominal.b, sol.gain_k, rho, 10.0, 100.0);
    try {
      const ErrorBallReport rep = error_ball_radius(consts, l_r, eps_m);
      std::printf("error-ball report: radius %.4f m, steady-state ||z|| %.4f m\n", rep.radius,
                  z_ss);
      if (z_ss > rep.radius) ++failures;
    } catch (const std::runtime_error& e) {
      std::printf("error-ball report: %s\n", e.what());
      std::printf("  measured rho %.3f, residual slope %.3f, eps_m %.3f N\n", rho, l_r, eps_m);
      ++failures;
    }
  }

  std::printf("check suite: %d failure(s)\n", failures);
  return failures == 0 ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FRIDAY control laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<unsigned> seeds;
  std::size_t parallel = 1;
  app.add_option("--config", config_path, "JSON experiment config")->expected(1);
  app.add_option("--out", out_dir, "output directory for CSV logs");
  app.add_option("--seeds", seeds, "run seeds 0..n-1, overriding the config list");
  app.add_option("--parallel", parallel, "worker threads for independent trials");

  auto* run = app.add_subcommand("run", "run one experiment config across seeds");
  auto* sweep = app.add_subcommand("sweep", "matrix of truth models x controllers");
  auto* compare = app.add_subcommand("compare-estimators", "offline SN-DNN/DNN/GP comparison");
  auto* check = app.add_subcommand("check", "contraction, Lipschitz, and error-ball audits");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    try {
      cfg = load_config(config_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return kExitBadConfig;
    }
    apply_common(cfg, out_dir, seeds);
    if (run->parsed()) return cmd_run(cfg, parallel);
    if (sweep->parsed()) return cmd_sweep(cfg, parallel);
    if (compare->parsed()) return cmd_compare(cfg);
    if (check->parsed()) return cmd_check(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
