// Config-driven batch harness: runs the tracking experiments across seeds,
// computes the headline metrics, emits CSV logs, and performs the offline
// estimator comparison.
#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "friday/controllers.hpp"
#include "friday/dataset.hpp"
#include "friday/gp.hpp"
#include "friday/matrix.hpp"
#include "friday/mlp.hpp"
#include "friday/plant.hpp"
#include "friday/riccati.hpp"
#include "friday/trajectory.hpp"

namespace friday {

enum class ControllerKind { Friday, FridayNoSn, Lqr, Adaptive, FridayPretrained };
enum class ReferenceKind { Setpoint, Sine };
enum class PretrainedKind { Gp, Dnn, SnDnn };

struct ExperimentConfig {
  TruthKind truth = TruthKind::EnviroTruth;
  TruthParams params;
  ControllerKind controller = ControllerKind::Friday;
  PretrainedKind pretrained = PretrainedKind::SnDnn;
  ReferenceKind reference = ReferenceKind::Sine;
  double target_p = 1.0;                       // setpoint reference [m]
  double omega = 2.0 * M_PI / 50.0;            // sine wave period [rad/s]
  double duration = 50.0;                      // [s]
  double control_rate = 20.0;                  // [Hz]
  double sim_substep = 1e-3;                   // [s]
  std::vector<unsigned> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::size_t> layer_sizes = {3, 50, 50, 50, 50, 1};
  double zeta = 1.0;
  bool strict_rescale = false;
  TrainingHyper hyper;
  double q1 = 20.0, q2 = 5.0, r_weight = 1.0;  // LQR weights
  double mass = 1.5;                           // nominal mass [kg]
  double adaptive_gamma = 0.03;
  std::optional<std::size_t> dataset_capacity;
  bool measured_accel = false;                 // backward-difference observation mode
  double accel_noise_std = 0.0;                // optional sensor noise [m/s^2]
  // Offline estimator-comparison knobs.
  double collect_duration = 200.0;             // [s] of LQR data collection
  double setpoint_hold = 5.0;                  // [s] between random setpoints
  std::size_t offline_train_steps = 600;
  std::string out_dir = ".";
};

inline const char* to_string(TruthKind k) {
  switch (k) {
    case TruthKind::NominalOnly: return "nominal";
    case TruthKind::ParamTruth: return "param";
    case TruthKind::MultiTruth: return "multi";
    case TruthKind::EnviroTruth: return "enviro";
  }
  return "?";
}

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::Friday: return "friday";
    case ControllerKind::FridayNoSn: return "friday_no_sn";
    case ControllerKind::Lqr: return "lqr";
    case ControllerKind::Adaptive: return "adaptive";
    case ControllerKind::FridayPretrained: return "friday_with_pretrained";
  }
  return "?";
}

inline const char* to_string(ReferenceKind k) {
  return k == ReferenceKind::Setpoint ? "setpoint" : "sine";
}

inline const char* to_string(PretrainedKind k) {
  switch (k) {
    case PretrainedKind::Gp: return "gp";
    case PretrainedKind::Dnn: return "dnn";
    case PretrainedKind::SnDnn: return "sn_dnn";
  }
  return "?";
}

inline TruthKind truth_from_string(const std::string& s) {
  if (s == "nominal") return TruthKind::NominalOnly;
  if (s == "param") return TruthKind::ParamTruth;
  if (s == "multi") return TruthKind::MultiTruth;
  if (s == "enviro") return TruthKind::EnviroTruth;
  throw std::invalid_argument("unknown truth model: " + s);
}

inline ControllerKind controller_from_string(const std::string& s) {
  if (s == "friday") return ControllerKind::Friday;
  if (s == "friday_no_sn") return ControllerKind::FridayNoSn;
  if (s == "lqr") return ControllerKind::Lqr;
  if (s == "adaptive") return ControllerKind::Adaptive;
  if (s == "friday_with_pretrained") return ControllerKind::FridayPretrained;
  throw std::invalid_argument("unknown controller: " + s);
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("truth_model")) c.truth = truth_from_string(j.at("truth_model"));
  if (j.contains("truth_params")) {
    const auto& p = j.at("truth_params");
    auto get = [&](const char* key, double& field) {
      if (p.contains(key)) field = p.at(key).get<double>();
    };
    get("a_load", c.params.a_load);
    get("t_period", c.params.t_period);
    get("mu_icy", c.params.mu_icy);
    get("c_air", c.params.c_air);
    get("r1", c.params.r1);
    get("r2", c.params.r2);
    get("a_roll", c.params.a_roll);
    get("k1", c.params.k1);
    get("k2", c.params.k2);
    get("g", c.params.g);
  }
  if (j.contains("controller")) c.controller = controller_from_string(j.at("controller"));
  if (j.contains("pretrained")) {
    const std::string s = j.at("pretrained");
    if (s == "gp") c.pretrained = PretrainedKind::Gp;
    else if (s == "dnn") c.pretrained = PretrainedKind::Dnn;
    else if (s == "sn_dnn") c.pretrained = PretrainedKind::SnDnn;
    else throw std::invalid_argument("unknown pretrained kind: " + s);
  }
  if (j.contains("reference")) {
    const std::string s = j.at("reference");
    if (s == "setpoint") c.reference = ReferenceKind::Setpoint;
    else if (s == "sine") c.reference = ReferenceKind::Sine;
    else throw std::invalid_argument("unknown reference kind: " + s);
  }
  auto getd = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  getd("target_p", c.target_p);
  getd("omega", c.omega);
  getd("duration", c.duration);
  getd("control_rate", c.control_rate);
  getd("sim_substep", c.sim_substep);
  getd("zeta", c.zeta);
  getd("q1", c.q1);
  getd("q2", c.q2);
  getd("r_weight", c.r_weight);
  getd("mass", c.mass);
  getd("adaptive_gamma", c.adaptive_gamma);
  getd("learning_rate", c.hyper.learning_rate);
  getd("momentum", c.hyper.momentum);
  getd("accel_noise_std", c.accel_noise_std);
  getd("collect_duration", c.collect_duration);
  getd("setpoint_hold", c.setpoint_hold);
  if (j.contains("batch_size")) c.hyper.batch_size = j.at("batch_size").get<std::size_t>();
  if (j.contains("offline_train_steps"))
    c.offline_train_steps = j.at("offline_train_steps").get<std::size_t>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<unsigned>>();
  if (j.contains("layer_sizes"))
    c.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  if (j.contains("strict_rescale")) c.strict_rescale = j.at("strict_rescale").get<bool>();
  if (j.contains("measured_accel")) c.measured_accel = j.at("measured_accel").get<bool>();
  if (j.contains("dataset_capacity"))
    c.dataset_capacity = j.at("dataset_capacity").get<std::size_t>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (c.duration < 0.0 || c.control_rate <= 0.0 || c.sim_substep <= 0.0)
    throw std::invalid_argument("config: duration, control_rate, sim_substep invalid");
  const double ratio = 1.0 / c.control_rate / c.sim_substep;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument("config: control period must be an integer multiple of sim_substep");
  c.params.mass = c.mass;
  c.params.t_period = c.duration > 0.0 ? c.duration : c.params.t_period;
  return c;
}

inline ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

inline std::string config_echo(const ExperimentConfig& c, unsigned seed) {
  std::ostringstream os;
  os << "truth_model=" << to_string(c.truth) << "\n"
     << "controller=" << to_string(c.controller) << "\n";
  if (c.controller == ControllerKind::FridayPretrained)
    os << "pretrained=" << to_string(c.pretrained) << "\n";
  os << "reference=" << to_string(c.reference) << "\n"
     << "target_p=" << c.target_p << "\n"
     << "omega=" << c.omega << "\n"
     << "duration=" << c.duration << "\n"
     << "control_rate=" << c.control_rate << "\n"
     << "sim_substep=" << c.sim_substep << "\n"
     << "seed=" << seed << "\n"
     << "zeta=" << c.zeta << "\n"
     << "strict_rescale=" << c.strict_rescale << "\n"
     << "learning_rate=" << c.hyper.learning_rate << "\n"
     << "momentum=" << c.hyper.momentum << "\n"
     << "batch_size=" << c.hyper.batch_size << "\n"
     << "q1=" << c.q1 << " q2=" << c.q2 << " r_weight=" << c.r_weight << "\n"
     << "mass=" << c.mass << "\n"
     << "adaptive_gamma=" << c.adaptive_gamma << "\n"
     << "measured_accel=" << c.measured_accel << "\n"
     << "truth_params: a_load=" << c.params.a_load << " t_period=" << c.params.t_period
     << " mu_icy=" << c.params.mu_icy << " c_air=" << c.params.c_air << " r1=" << c.params.r1
     << " r2=" << c.params.r2 << " a_roll=" << c.params.a_roll << " k1=" << c.params.k1
     << " k2=" << c.params.k2 << " g=" << c.params.g << "\n";
  return os.str();
}

// Logged values are quantized to the CSV precision (12 significant digits) at
// record time, so metrics computed in memory and from a re-parsed CSV agree
// exactly.
inline double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

using FrozenEstimator = std::function<double(const Vec&)>;

struct MetricsReport {
  double mean_tracking_error = 0.0;   // [m]
  double mean_estimation_error = 0.0; // [N]
  double final_offset = 0.0;          // [m]
  double train_wall_time = 0.0;       // [s]
  bool diverged = false;
};

// Runs one closed-loop trial: 20 Hz (configurable) control with RK4 substeps
// and zero-order hold. Divergence marks the log instead of aborting.
inline TrajectoryLog run_trial(const ExperimentConfig& cfg, unsigned seed,
                               const FrozenEstimator* frozen = nullptr) {
  const LtiModel nominal = nominal_car(cfg.mass);
  const Matrix q = Matrix::diagonal({cfg.q1, cfg.q2});
  const Matrix r = Matrix::from_rows({{cfg.r_weight}});
  const RiccatiSolution sol = solve_care(nominal.a, nominal.b, q, r);
  const Matrix gain = sol.gain_k;

  TruthModel truth{cfg.truth, cfg.params};

  TrajectoryLog log;
  log.seed = seed;
  log.header = config_echo(cfg, seed);

  FridayState fst;
  AdaptiveState ast = make_adaptive_state(sol.p, cfg.adaptive_gamma);
  const bool is_friday =
      cfg.controller == ControllerKind::Friday || cfg.controller == ControllerKind::FridayNoSn;
  if (is_friday) {
    fst.gain_k = gain;
    fst.net = init_network(cfg.layer_sizes, seed, cfg.zeta);
    fst.net.strict_rescale = cfg.strict_rescale;
    fst.dataset.capacity = cfg.dataset_capacity;
    fst.hyper = cfg.hyper;
    fst.rng.seed(static_cast<std::uint64_t>(seed) * 0x9e3779b97f4a7c15ULL + 1);
    fst.sn_enabled = cfg.controller == ControllerKind::Friday;
  }
  log.has_estimator = is_friday || cfg.controller == ControllerKind::Adaptive ||
                      cfg.controller == ControllerKind::FridayPretrained;
  if (cfg.controller == ControllerKind::FridayPretrained && frozen == nullptr)
    throw std::invalid_argument("run_trial: pretrained controller needs a frozen estimator");

  std::mt19937_64 noise_rng(static_cast<std::uint64_t>(seed) * 0xda942042e4dd58b5ULL + 7);
  std::normal_distribution<double> noise(0.0, cfg.accel_noise_std);

  const double dt_ctrl = 1.0 / cfg.control_rate;
  const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration * cfg.control_rate));
  const auto substeps = static_cast<std::size_t>(std::llround(dt_ctrl / cfg.sim_substep));

  SimState s;
  double u_prev = 0.0;
  double pdot_prev = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt_ctrl;
    const Reference ref = cfg.reference == ReferenceKind::Setpoint
                              ? reference_setpoint(cfg.target_p)
                              : reference_sine(t, cfg.omega, cfg.mass);
    const Vec x = {s.p, s.pdot};

    // Residual observed at the sample instant under the still-held previous
    // input; oracle acceleration by default, backward difference if configured.
    std::optional<double> r_obs;
    if (k > 0) {
      double accel = cfg.measured_accel
                         ? acceleration_estimate(s.pdot, pdot_prev, dt_ctrl)
                         : truth_accel(truth, s, u_prev);
      if (cfg.accel_noise_std > 0.0) accel += noise(noise_rng);
      const double obs = observe_residual(accel, u_prev, cfg.mass);
      if (std::isfinite(obs)) r_obs = obs;
    }
    const double r_true = true_residual(truth, s, u_prev);

    double u = 0.0;
    double r_hat = 0.0;
    double loss = 0.0;
    unsigned flags = 0;
    switch (cfg.controller) {
      case ControllerKind::Lqr:
        u = lqr_step(gain, x, ref);
        break;
      case ControllerKind::Adaptive:
        u = adaptive_step(ast, gain, x, ref, nominal.b, dt_ctrl);
        r_hat = ast.last_rhat;
        break;
      case ControllerKind::FridayPretrained:
        r_hat = (*frozen)({s.p, s.pdot, u_prev});
        u = lqr_step(gain, x, ref) - r_hat;
        break;
      default:
        u = friday_step(fst, x, ref, r_obs);
        r_hat = fst.last_rhat;
        loss = fst.last_loss;
        if (fst.last_fallback) flags |= kFlagFallback;
        break;
    }

    pdot_prev = s.pdot;
    bool diverged = !std::isfinite(u);
    if (!diverged) {
      try {
        for (std::size_t i = 0; i < substeps; ++i) s = rk4_step(truth, s, u, cfg.sim_substep);
      } catch (const std::runtime_error&) {
        diverged = true;
      }
    }
    if (diverged) flags |= kFlagDiverged;

    LogRow row;
    row.t = round12(t);
    row.p = round12(x[0]);
    row.pdot = round12(x[1]);
    row.pr = round12(ref.x_r[0]);
    row.prdot = round12(ref.x_r[1]);
    row.u = round12(u);
    row.r_true = round12(r_true);
    row.r_hat = round12(r_hat);
    row.loss = round12(loss);
    row.flags = flags;
    log.rows.push_back(row);

    if (diverged) {
      log.diverged = true;
      break;
    }
    u_prev = u;
  }
  return log;
}

// One trial per seed; trials are independent, so they are distributed over a
// small worker pool when parallel > 1. Output order matches the seed list.
inline std::vector<TrajectoryLog> run_experiment(const ExperimentConfig& cfg,
                                                 std::size_t parallel = 1,
                                                 const FrozenEstimator* frozen = nullptr) {
  std::vector<TrajectoryLog> logs(cfg.seeds.size());
  if (parallel <= 1 || cfg.seeds.size() <= 1) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      logs[i] = run_trial(cfg, cfg.seeds[i], frozen);
    return logs;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) return;
      logs[i] = run_trial(cfg, cfg.seeds[i], frozen);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < std::min(parallel, cfg.seeds.size()); ++i)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return logs;
}

inline double mean_tracking_error(const TrajectoryLog& log, double warmup = 0.0) {
  if (log.rows.empty()) throw std::invalid_argument("mean_tracking_error: empty log");
  double sum = 0.0;
  std::size_t n = 0;
  for (const LogRow& r : log.rows) {
    if (r.t < warmup) continue;
    sum += std::abs(r.p - r.pr);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

inline double mean_estimation_error(const TrajectoryLog& log) {
  if (!log.has_estimator)
    throw std::runtime_error("mean_estimation_error: controller has no residual estimator");
  if (log.rows.empty()) throw std::invalid_argument("mean_estimation_error: empty log");
  double sum = 0.0;
  for (const LogRow& r : log.rows) sum += std::abs(r.r_true - r.r_hat);
  return sum / static_cast<double>(log.rows.size());
}

inline double final_offset(const TrajectoryLog& log) {
  if (log.rows.empty()) throw std::invalid_argument("final_offset: empty log");
  const LogRow& r = log.rows.back();
  return std::abs(r.p - r.pr);
}

// CSV: '#'-prefixed config echo, a header row, then one row per control step
// with 12 significant decimal digits.
inline void emit_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  std::istringstream hdr(log.header);
  std::string line;
  while (std::getline(hdr, line)) out << "# " << line << "\n";
  out << "t,p,pdot,pr,prdot,u,r_true,r_hat,loss,flags\n";
  char buf[512];
  for (const LogRow& r : log.rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%u\n", r.t, r.p,
                  r.pdot, r.pr, r.prdot, r.u, r.r_true, r.r_hat, r.loss, r.flags);
    out << buf;
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

inline TrajectoryLog load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);
  TrajectoryLog log;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      log.header += line.size() > 2 ? line.substr(2) + "\n" : "\n";
      continue;
    }
    if (!saw_header) {
      if (line.rfind("t,p,pdot", 0) != 0)
        throw std::runtime_error("load_csv: missing column header in " + path);
      saw_header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 10) throw std::runtime_error("load_csv: malformed row in " + path);
    LogRow r;
    r.t = std::strtod(cells[0].c_str(), nullptr);
    r.p = std::strtod(cells[1].c_str(), nullptr);
    r.pdot = std::strtod(cells[2].c_str(), nullptr);
    r.pr = std::strtod(cells[3].c_str(), nullptr);
    r.prdot = std::strtod(cells[4].c_str(), nullptr);
    r.u = std::strtod(cells[5].c_str(), nullptr);
    r.r_true = std::strtod(cells[6].c_str(), nullptr);
    r.r_hat = std::strtod(cells[7].c_str(), nullptr);
    r.loss = std::strtod(cells[8].c_str(), nullptr);
    r.flags = static_cast<unsigned>(std::strtoul(cells[9].c_str(), nullptr, 10));
    if (r.flags & kFlagDiverged) log.diverged = true;
    log.rows.push_back(r);
  }
  log.has_estimator = true;  // column content decides; loader keeps it permissive
  return log;
}

// --- Offline estimator comparison ------------------------------------------

// Collects training data by driving the truth model with the plain LQR to a
// fresh uniform random setpoint in [-1, 1] m every setpoint_hold seconds.
inline ReplayDataset collect_offline_dataset(const ExperimentConfig& cfg, unsigned seed) {
  const LtiModel nominal = nominal_car(cfg.mass);
  const Matrix q = Matrix::diagonal({cfg.q1, cfg.q2});
  const Matrix r = Matrix::from_rows({{cfg.r_weight}});
  const Matrix gain = solve_care(nominal.a, nominal.b, q, r).gain_k;
  TruthModel truth{cfg.truth, cfg.params};
  truth.params.t_period = cfg.collect_duration;

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed) * 0x2545f4914f6cdd1dULL + 3);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);

  ReplayDataset ds;
  const double dt_ctrl = 1.0 / cfg.control_rate;
  const auto substeps = static_cast<std::size_t>(std::llround(dt_ctrl / cfg.sim_substep));
  const auto n_steps =
      static_cast<std::size_t>(std::llround(cfg.collect_duration * cfg.control_rate));
  const auto hold_steps =
      static_cast<std::size_t>(std::llround(cfg.setpoint_hold * cfg.control_rate));

  SimState s;
  double u_prev = 0.0;
  double target = pick(rng);
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (hold_steps && k % hold_steps == 0 && k > 0) target = pick(rng);
    const Reference ref = reference_setpoint(target);
    const double u = lqr_step(gain, {s.p, s.pdot}, ref);
    if (k > 0) {
      const double obs = observe_residual(truth_accel(truth, s, u_prev), u_prev, cfg.mass);
      dataset_append(ds, {s.p, s.pdot}, {u}, {obs});
    }
    for (std::size_t i = 0; i < substeps; ++i) s = rk4_step(truth, s, u, cfg.sim_substep);
    u_prev = u;
  }
  return ds;
}

struct EstimatorRow {
  std::string name;
  double wall_time_s = 0.0;
  double mean_est_error = 0.0;  // [N]
  bool diverged = false;
};

// Trains a network offline on the collected set with momentum SGD, normalizing
// every step when with_sn is set. Returns wall time spent training.
inline double offline_train(MlpNetwork& net, const ReplayDataset& ds,
                            const TrainingHyper& hyper, std::size_t steps, bool with_sn,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < steps; ++i) {
    auto [bx, by] = sample_minibatch(ds, hyper.batch_size, rng);
    auto [loss, grads] = loss_and_gradients(net, bx, by);
    (void)loss;
    sgd_momentum_step(net, grads, hyper);
    if (with_sn) normalize_lipschitz(net);
  }
  if (with_sn) normalize_lipschitz(net);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Offline-trains SN-DNN, plain DNN and GP on LQR-collected data, then runs
// each frozen model inside the controller and reports wall time and mean
// estimation error per model.
inline std::vector<EstimatorRow> compare_estimators(const ExperimentConfig& cfg) {
  const unsigned seed = cfg.seeds.empty() ? 0u : cfg.seeds.front();
  const ReplayDataset ds = collect_offline_dataset(cfg, seed);
  std::vector<Vec> xs(ds.inputs.begin(), ds.inputs.end());
  Vec ys(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) ys[i] = ds.targets[i][0];

  ExperimentConfig run_cfg = cfg;
  run_cfg.controller = ControllerKind::FridayPretrained;
  run_cfg.seeds = {seed};

  std::vector<EstimatorRow> table;
  auto evaluate = [&](const std::string& name, double wall, const FrozenEstimator& est) {
    EstimatorRow row;
    row.name = name;
    row.wall_time_s = wall;
    const TrajectoryLog log = run_trial(run_cfg, seed, &est);
    row.diverged = log.diverged;
    row.mean_est_error = mean_estimation_error(log);
    table.push_back(row);
  };

  {
    MlpNetwork net = init_network(cfg.layer_sizes, seed, cfg.zeta);
    const double wall =
        offline_train(net, ds, cfg.hyper, cfg.offline_train_steps, /*with_sn=*/true, seed + 11);
    FrozenEstimator est = [net](const Vec& x) { return mlp_forward(net, x)[0]; };
    evaluate("SN-DNN", wall, est);
  }
  {
    MlpNetwork net = init_network(cfg.layer_sizes, seed, cfg.zeta);
    const double wall = offline_train(net, ds, cfg.hyper, cfg.offline_train_steps,
                                      /*with_sn=*/false, seed + 11);
    FrozenEstimator est = [net](const Vec& x) { return mlp_forward(net, x)[0]; };
    evaluate("DNN", wall, est);
  }
  {
    const GpModel gp = gp_fit(xs, ys);
    FrozenEstimator est = [gp](const Vec& x) { return gp_predict(gp, x).first; };
    evaluate("GP", gp.fit_seconds, est);
  }
  return table;
}

inline MetricsReport compute_metrics(const TrajectoryLog& log, double warmup = 0.0) {
  MetricsReport m;
  m.mean_tracking_error = mean_tracking_error(log, warmup);
  m.mean_estimation_error = log.has_estimator ? mean_estimation_error(log) : 0.0;
  m.final_offset = final_offset(log);
  m.diverged = log.diverged;
  return m;
}

}  // namespace friday
