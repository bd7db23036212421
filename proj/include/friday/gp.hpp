// Exact Gaussian-process regression with a Matern-5/2 kernel, for the
// offline-estimator comparison. Fit is a dense Cholesky solve; the model is
// immutable afterwards.
#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "friday/matrix.hpp"

namespace friday {

inline double matern52(const Vec& x, const Vec& y, double lengthscale, double signal_var) {
  if (lengthscale <= 0.0 || signal_var <= 0.0)
    throw std::invalid_argument("matern52: lengthscale and signal_var must be > 0");
  const double d = vec_norm(vec_sub(x, y));
  const double s = std::sqrt(5.0) * d / lengthscale;
  return signal_var * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

struct GpModel {
  std::vector<Vec> train_inputs;
  Vec alpha;        // (K + noise I)^-1 y
  Matrix chol_l;    // lower Cholesky factor of K + noise I (+ jitter)
  double lengthscale = 1.0;
  double signal_var = 1.0;
  double noise_var = 1e-2;
  double fit_seconds = 0.0;
};

inline GpModel gp_fit(const std::vector<Vec>& xs, const Vec& ys, double lengthscale = 1.0,
                      double signal_var = 1.0, double noise_var = 1e-2) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("gp_fit: empty or mismatched training data");
  if (noise_var <= 0.0) throw std::invalid_argument("gp_fit: noise_var must be > 0");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = xs.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = matern52(xs[i], xs[j], lengthscale, signal_var);
      k(i, j) = v;
      k(j, i) = v;
    }
    k(i, i) += noise_var + 1e-8;  // jitter
  }
  GpModel m;
  try {
    m.chol_l = cholesky_lower(k);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("gp_fit: Cholesky failed; kernel matrix not PD, increase jitter");
  }
  // alpha = L^-T (L^-1 y)
  Vec z(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = ys[i];
    for (std::size_t j = 0; j < i; ++j) s -= m.chol_l(i, j) * z[j];
    z[i] = s / m.chol_l(i, i);
  }
  m.alpha.resize(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m.chol_l(j, i) * m.alpha[j];
    m.alpha[i] = s / m.chol_l(i, i);
  }
  m.train_inputs = xs;
  m.lengthscale = lengthscale;
  m.signal_var = signal_var;
  m.noise_var = noise_var;
  m.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return m;
}

// Predictive mean and variance (variance clipped at 0).
inline std::pair<double, double> gp_predict(const GpModel& m, const Vec& x) {
  if (m.train_inputs.empty()) throw std::runtime_error("gp_predict: model not fitted");
  const std::size_t n = m.train_inputs.size();
  Vec kstar(n);
  for (std::size_t i = 0; i < n; ++i)
    kstar[i] = matern52(x, m.train_inputs[i], m.lengthscale, m.signal_var);
  const double mean = vec_dot(kstar, m.alpha);
  // v = L^-1 k*
  Vec v(n);
  double vv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = kstar[i];
    for (std::size_t j = 0; j < i; ++j) s -= m.chol_l(i, j) * v[j];
    v[i] = s / m.chol_l(i, i);
    vv += v[i] * v[i];
  }
  const double var = std::max(0.0, m.signal_var - vv);
  return {mean, var};
}

}  // namespace friday
