// Control laws: plain LQR tracking, the full real-time-learning loop with
// per-step spectral normalization, the adaptive basis-function baseline, and
// the theoretical diagnostics (fixed-point contraction probe, error-ball
// radius, empirical input-increment ratio).
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>

#include "friday/dataset.hpp"
#include "friday/matrix.hpp"
#include "friday/mlp.hpp"
#include "friday/plant.hpp"
#include "friday/riccati.hpp"
#include "friday/trajectory.hpp"

namespace friday {

inline double lqr_step(const Matrix& gain_k, const Vec& x, const Reference& ref) {
  if (gain_k.cols() != x.size() || x.size() != ref.x_r.size())
    throw std::invalid_argument("lqr_step: shape mismatch");
  double u = ref.u_r;
  for (std::size_t j = 0; j < x.size(); ++j) u -= gain_k(0, j) * (x[j] - ref.x_r[j]);
  return u;
}

struct FridayState {
  Matrix gain_k;           // 1 x n LQR gain
  MlpNetwork net;          // residual estimator
  ReplayDataset dataset;
  TrainingHyper hyper;
  std::mt19937_64 rng;     // mini-batch sampling stream
  double last_u = 0.0;     // u_{k-1} [N]
  double last_rhat = 0.0;  // [N]
  double last_loss = 0.0;
  bool sn_enabled = true;
  bool last_fallback = false;
  // Invoked right after normalization, before the prediction is taken; lets
  // tests and audits inspect exactly the network the control input saw.
  std::function<void(const MlpNetwork&)> post_normalize_hook;
};

// One full control iteration: normalize (when SN is on), predict the residual
// at (x, u_{k-1}), execute u_k, append the previous observation, then apply
// exactly one momentum-SGD update on a fresh mini-batch. Non-finite network
// output drops the controller back to pure LQR for the step and flags it.
inline double friday_step(FridayState& st, const Vec& x, const Reference& ref,
                          std::optional<double> r_obs_prev) {
  if (st.sn_enabled) normalize_lipschitz(st.net);
  if (st.post_normalize_hook) st.post_normalize_hook(st.net);

  double rhat = mlp_forward(st.net, {x[0], x[1], st.last_u})[0];
  st.last_fallback = !std::isfinite(rhat);
  if (st.last_fallback) rhat = 0.0;
  const double u = lqr_step(st.gain_k, x, ref) - rhat;

  if (r_obs_prev) dataset_append(st.dataset, x, {u}, {*r_obs_prev});

  if (!st.dataset.empty() && !st.last_fallback) {
    auto [bx, by] = sample_minibatch(st.dataset, st.hyper.batch_size, st.rng);
    auto [loss, grads] = loss_and_gradients(st.net, bx, by);
    sgd_momentum_step(st.net, grads, st.hyper);
    st.last_loss = loss;
  } else if (st.last_fallback) {
    st.last_loss = std::numeric_limits<double>::quiet_NaN();
  }

  st.last_rhat = rhat;
  st.last_u = u;
  return u;
}

struct AdaptiveState {
  Matrix w_hat;        // 1 x basis_dim weight estimate
  double gamma = 0.03; // adaptation rate
  Matrix p;            // ARE solution shared with the LQR
  std::size_t basis_dim = 9;
  double last_u = 0.0;
  double last_rhat = 0.0;
};

// Basis spanning the Multi-truth terms plus low-order polynomials.
inline Vec adaptive_basis(const Vec& x, double u) {
  const double p = x[0], pdot = x[1];
  return {1.0, p, pdot, p * p, pdot * pdot, u, pdot * u, pdot * pdot * u, std::abs(u) * pdot};
}

inline AdaptiveState make_adaptive_state(const Matrix& p, double gamma = 0.03) {
  AdaptiveState st;
  st.p = p;
  st.gamma = gamma;
  st.w_hat = Matrix(1, st.basis_dim);
  return st;
}

// Baseline adaptive feedback-linearizing step: u = LQR - W_hat sigma(x, u_prev),
// then Euler-integrate W_hat += dt * gamma * sigma * (e^T P B).
inline double adaptive_step(AdaptiveState& st, const Matrix& gain_k, const Vec& x,
                            const Reference& ref, const Matrix& b, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("adaptive_step: dt must be > 0");
  const Vec basis = adaptive_basis(x, st.last_u);
  double rhat = 0.0;
  for (std::size_t j = 0; j < st.basis_dim; ++j) rhat += st.w_hat(0, j) * basis[j];
  const double u = lqr_step(gain_k, x, ref) - rhat;

  const Vec e = vec_sub(x, ref.x_r);
  const Vec pb = st.p * Vec{b(0, 0), b(1, 0)};
  const double epb = vec_dot(e, pb);
  for (std::size_t j = 0; j < st.basis_dim; ++j)
    st.w_hat(0, j) += dt * st.gamma * basis[j] * epb;
  if (!st.w_hat.all_finite())
    throw std::runtime_error("adaptive_step: weight estimate diverged");

  st.last_rhat = rhat;
  st.last_u = u;
  return u;
}

// Iterates u <- -K(x - x_r) + u_r - R_hat(x, u) with all states frozen until
// the increment falls below tol. Converges when the network is a contraction
// in its input (zeta < 1). Returns the fixed point and the iteration count;
// optionally records the per-iteration gaps.
inline std::pair<double, std::size_t> fixed_point_iterate(
    const FridayState& st, const Vec& x, const Reference& ref, double u0, double tol,
    std::size_t max_iter, std::vector<double>* gaps = nullptr) {
  const double base = lqr_step(st.gain_k, x, ref);
  double u = u0;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const double next = base - mlp_forward(st.net, {x[0], x[1], u})[0];
    gap = std::abs(next - u);
    if (gaps) gaps->push_back(gap);
    u = next;
    if (gap <= tol) return {u, it};
  }
  throw std::runtime_error("fixed_point_iterate: no convergence, last gap " +
                           std::to_string(gap));
}

struct ErrorBallReport {
  double radius = 0.0;  // r: asymptotic error-ball radius
  double r_z = 0.0;     // transient state-error bound
  double r_u = 0.0;     // input bound
  bool feasibility_ok = false;
};

// Post-hoc quantities the radius formula needs beyond the Lyapunov constants.
struct ErrorBallContext {
  double sigma_k = 0.0;      // sigma(K)
  double u_r_m = 0.0;        // max reference input magnitude
  double r_m = 0.0;          // max residual magnitude
  double lam_z0_norm = 0.0;  // ||Lambda z(t0)||
};

// Error-ball radius r = sigma(Lambda^-1) * c2 c3 sqrt(c1) / (c1 lambda -
// c2 c3 rho L_R) * eps_m. A non-positive denominator violates the hypothesis
// of the convergence bound and is reported as an error (zeta or rho too large).
inline ErrorBallReport error_ball_radius(const StabilityConstants& consts, double l_r,
                                         double eps_m, const ErrorBallContext& ctx = {}) {
  if (eps_m < 0.0) throw std::invalid_argument("error_ball_radius: eps_m must be >= 0");
  const double denom = consts.c1 * consts.lambda - consts.c2 * consts.c3 * consts.rho * l_r;
  if (denom <= 0.0)
    throw std::runtime_error(
        "error_ball_radius: c1*lambda - c2*c3*rho*L_R <= 0; convergence hypothesis "
        "violated (zeta or rho too large)");
  const double sigma_lam_inv = spectral_norm(inverse(consts.lam_chol));
  const double frac = consts.c2 * consts.c3 * std::sqrt(consts.c1) / denom * eps_m;
  ErrorBallReport rep;
  rep.radius = sigma_lam_inv * frac;
  rep.r_z = sigma_lam_inv * (ctx.lam_z0_norm + frac);
  rep.r_u = ctx.sigma_k * rep.r_z + ctx.u_r_m + eps_m + ctx.r_m;
  rep.feasibility_ok = rep.r_z <= consts.r_x && rep.r_u <= consts.r_u;
  return rep;
}

// Empirical input-increment ratio: max over steps of |u_k - u_{k-1}| / ||z_k||.
inline double estimate_rho(const TrajectoryLog& log) {
  double best = -1.0;
  for (std::size_t k = 1; k < log.rows.size(); ++k) {
    const double z = tracking_error_norm(log.rows[k]);
    if (z <= 1e-9) continue;
    best = std::max(best, std::abs(log.rows[k].u - log.rows[k - 1].u) / z);
  }
  if (best < 0.0)
    throw std::runtime_error("estimate_rho: no steps with ||z|| above threshold");
  return best;
}

}  // namespace friday
