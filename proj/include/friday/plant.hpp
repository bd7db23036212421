// Longitudinal-car plant family: the nominal double-integrator model, the
// three nonlinear truth models hidden from the controllers, RK4 integration
// with zero-order-hold input, residual observation, and reference signals.
#pragma once

#include <cmath>
#include <stdexcept>

#include "friday/matrix.hpp"

namespace friday {

struct LtiModel {
  Matrix a;     // 2x2
  Matrix b;     // 2x1
  double mass;  // kg
};

inline LtiModel nominal_car(double mass) {
  if (mass <= 0.0) throw std::invalid_argument("nominal_car: mass must be > 0");
  return LtiModel{Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}}),
                  Matrix::from_rows({{0.0}, {1.0 / mass}}), mass};
}

enum class TruthKind { NominalOnly, ParamTruth, MultiTruth, EnviroTruth };

struct TruthParams {
  double mass = 1.5;      // nominal vehicle mass [kg]
  double a_load = 9.0;    // load-mass growth factor (Param-truth)
  double t_period = 50.0; // simulation period T [s] (Param-truth time constant)
  double mu_icy = 0.6;    // input transfer on ice (Enviro-truth)
  double c_air = 0.6;     // air drag coefficient
  double r1 = 0.2;        // rolling resistance, static part
  double r2 = 0.1;        // rolling resistance, speed-proportional part
  double a_roll = 0.4;    // rolling resistance exponent
  double k1 = 0.5;        // Duffing spring, linear
  double k2 = 0.3;        // Duffing spring, cubic
  double g = 9.81;        // gravity [m/s^2]
};

struct TruthModel {
  TruthKind kind = TruthKind::NominalOnly;
  TruthParams params;
};

struct SimState {
  double p = 0.0;     // position [m]
  double pdot = 0.0;  // velocity [m/s]
  double t = 0.0;     // time [s]
};

struct Reference {
  Vec x_r;       // [p_r, pdot_r]
  double u_r;    // feedforward force [N]
};

inline double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// True longitudinal acceleration under the selected truth model.
inline double truth_accel(const TruthModel& model, const SimState& s, double u) {
  const TruthParams& c = model.params;
  switch (model.kind) {
    case TruthKind::NominalOnly:
      return u / c.mass;
    case TruthKind::ParamTruth: {
      const double decay = std::exp(-s.t / c.t_period);
      const double mass_t = c.mass + c.a_load * c.mass * (1.0 - decay);
      return decay * u / mass_t;
    }
    case TruthKind::MultiTruth:
      return ((1.0 + s.pdot * s.pdot) * u + s.p * s.p + s.pdot * std::abs(u)) / c.mass;
    case TruthKind::EnviroTruth: {
      const double f_air = c.c_air * s.pdot * s.pdot * std::sin(s.pdot);
      const double f_roll =
          -sign0(s.pdot) * c.mass * c.g *
          (c.r1 * (1.0 - std::exp(-c.a_roll * std::abs(s.pdot))) + c.r2 * std::abs(s.pdot));
      const double f_duff = c.k1 * s.p + c.k2 * s.p * s.p * s.p;
      return (c.mu_icy * u - f_air - f_roll - f_duff) / c.mass;
    }
  }
  throw std::logic_error("truth_accel: unknown truth kind");
}

// Closed-form residual force R(x, u) per model, written out independently of
// truth_accel so the identity m*accel = u + R can be cross-checked.
inline double true_residual(const TruthModel& model, const SimState& s, double u) {
  const TruthParams& c = model.params;
  switch (model.kind) {
    case TruthKind::NominalOnly:
      return 0.0;
    case TruthKind::ParamTruth: {
      const double decay = std::exp(-s.t / c.t_period);
      const double mass_t = c.mass + c.a_load * c.mass * (1.0 - decay);
      return u * (decay * c.mass / mass_t - 1.0);
    }
    case TruthKind::MultiTruth:
      return s.pdot * s.pdot * u + s.p * s.p + s.pdot * std::abs(u);
    case TruthKind::EnviroTruth: {
      const double f_air = c.c_air * s.pdot * s.pdot * std::sin(s.pdot);
      const double f_roll =
          -sign0(s.pdot) * c.mass * c.g *
          (c.r1 * (1.0 - std::exp(-c.a_roll * std::abs(s.pdot))) + c.r2 * std::abs(s.pdot));
      const double f_duff = c.k1 * s.p + c.k2 * s.p * s.p * s.p;
      return (c.mu_icy - 1.0) * u - f_air - f_roll - f_duff;
    }
  }
  throw std::logic_error("true_residual: unknown truth kind");
}

// One classical RK4 step of (pdot, pddot) with u held constant over the step.
// Throws on a non-finite result so a diverging trial can be flagged.
inline SimState rk4_step(const TruthModel& model, const SimState& s, double u, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("rk4_step: dt must be > 0");
  auto deriv = [&](double p, double pdot, double t) {
    return std::pair<double, double>{pdot, truth_accel(model, SimState{p, pdot, t}, u)};
  };
  const auto [k1p, k1v] = deriv(s.p, s.pdot, s.t);
  const auto [k2p, k2v] = deriv(s.p + 0.5 * dt * k1p, s.pdot + 0.5 * dt * k1v, s.t + 0.5 * dt);
  const auto [k3p, k3v] = deriv(s.p + 0.5 * dt * k2p, s.pdot + 0.5 * dt * k2v, s.t + 0.5 * dt);
  const auto [k4p, k4v] = deriv(s.p + dt * k3p, s.pdot + dt * k3v, s.t + dt);
  SimState next;
  next.p = s.p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  next.pdot = s.pdot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  next.t = s.t + dt;
  if (!std::isfinite(next.p) || !std::isfinite(next.pdot))
    throw std::runtime_error("rk4_step: state diverged to non-finite values");
  return next;
}

// Observed residual force: R~ = m * pddot_obs - u [N], the force that added
// to u explains the observed acceleration.
inline double observe_residual(double p_ddot_obs, double u, double mass) {
  return mass * p_ddot_obs - u;
}

// Backward-difference acceleration, for the "measured" observation mode.
inline double acceleration_estimate(double pdot_now, double pdot_prev, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("acceleration_estimate: dt must be > 0");
  return (pdot_now - pdot_prev) / dt;
}

inline Reference reference_setpoint(double target_p) {
  return Reference{{target_p, 0.0}, 0.0};
}

inline Reference reference_sine(double t, double omega, double mass) {
  return Reference{{std::sin(omega * t), omega * std::cos(omega * t)},
                   -mass * omega * omega * std::sin(omega * t)};
}

}  // namespace friday
