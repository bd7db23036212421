// Continuous algebraic Riccati equation solver (Newton-Kleinman with direct
// vectorized Lyapunov solves), LQR gain extraction, and the Lyapunov-analysis
// constants used by the stability diagnostics.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "friday/matrix.hpp"

namespace friday {

struct RiccatiSolution {
  Matrix p;              // symmetric positive definite ARE solution
  Matrix gain_k;         // K = R^-1 B^T P
  double residual_norm;  // Frobenius norm of the ARE residual
};

// Constants from the closed-loop Lyapunov analysis, plus the configured
// feasible-set radii and input-increment ratio they are checked against.
struct StabilityConstants {
  double lambda;    // -lambda_max(P A_cl + A_cl^T P)
  double c1;        // lambda_min(P)
  double c2;        // lambda_max(P)
  double c3;        // 2 lambda_max(P) sigma(B)
  Matrix lam_chol;  // Lambda with P = Lambda^T Lambda
  double rho;       // input-increment ratio, configured or estimated
  double r_x;       // feasible state-set radius
  double r_u;       // feasible input-set radius
};

// Solves A^T X + X A + Q = 0 for X via the n^2 x n^2 vectorized linear
// system. O(n^6), trivial at the dimensions used here.
inline Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  const std::size_t n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw std::invalid_argument("solve_lyapunov: shape mismatch");
  // Column-stacked vec: vec(A^T X) = (I (x) A^T) vec(X), vec(X A) = (A^T (x) I) vec(X).
  Matrix m(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        m(j * n + i, j * n + k) += a(k, i);  // (A^T)_{ik} on the row block
        m(j * n + i, k * n + i) += a(k, j);  // (X A)_{ij} = sum_k X_{ik} A_{kj}
      }
  Vec rhs(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rhs[j * n + i] = -q(i, j);
  const Vec x = solve_linear(m, rhs);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = x[j * n + i];
  // Symmetrize against roundoff when the data are symmetric.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

inline Matrix are_residual(const Matrix& a, const Matrix& b, const Matrix& q,
                           const Matrix& r, const Matrix& p) {
  const Matrix bt_p = b.transpose() * p;
  return a.transpose() * p + p * a - bt_p.transpose() * solve_linear(r, bt_p) + q;
}

inline bool is_controllable(const Matrix& a, const Matrix& b, double tol = 1e-9) {
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  // Controllability matrix [B, AB, ..., A^{n-1}B], rank via row echelon.
  Matrix ctrb(n, n * m);
  Matrix blk = b;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) ctrb(i, k * m + j) = blk(i, j);
    blk = a * blk;
  }
  const double scale = std::max(ctrb.max_abs(), 1.0);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n * m && rank < n; ++col) {
    std::size_t piv = rank;
    for (std::size_t i = rank + 1; i < n; ++i)
      if (std::abs(ctrb(i, col)) > std::abs(ctrb(piv, col))) piv = i;
    if (std::abs(ctrb(piv, col)) <= tol * scale) continue;
    for (std::size_t j = 0; j < n * m; ++j) std::swap(ctrb(rank, j), ctrb(piv, j));
    for (std::size_t i = rank + 1; i < n; ++i) {
      const double f = ctrb(i, col) / ctrb(rank, col);
      for (std::size_t j = col; j < n * m; ++j) ctrb(i, j) -= f * ctrb(rank, j);
    }
    ++rank;
  }
  return rank == n;
}

namespace detail {

// Bass's construction: K = B^T Z^-1 with (A + beta I) Z + Z (A + beta I)^T = 2 B B^T
// stabilizes any controllable pair. Used when the simple candidates fail.
inline Matrix bass_stabilizing_gain(const Matrix& a, const Matrix& b) {
  const double beta = a.frobenius_norm() + 1.0;
  Matrix shifted = a;
  for (std::size_t i = 0; i < a.rows(); ++i) shifted(i, i) += beta;
  const Matrix bbt = b * b.transpose();
  const Matrix z = solve_lyapunov(shifted.transpose(), bbt * (-2.0));
  return b.transpose() * inverse(z);
}

inline Matrix initial_stabilizing_gain(const Matrix& a, const Matrix& b) {
  const Matrix zero(b.cols(), a.rows());
  if (is_hurwitz(a)) return zero;
  for (double alpha : {1.0, 10.0, 100.0}) {
    const Matrix k = b.transpose() * alpha;
    if (is_hurwitz(a - b * k)) return k;
  }
  try {
    const Matrix k = bass_stabilizing_gain(a, b);
    if (k.all_finite() && is_hurwitz(a - b * k)) return k;
  } catch (const std::runtime_error&) {
  }
  throw std::runtime_error("solve_care: no stabilizing initial gain found");
}

}  // namespace detail

// Newton-Kleinman iteration from a stabilizing initial gain. Each step solves
// A_cl^T P + P A_cl + Q + K^T R K = 0 and refreshes K = R^-1 B^T P.
inline RiccatiSolution solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                                  const Matrix& r, double tol = 1e-10) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != b.cols() || r.cols() != b.cols())
    throw std::invalid_argument("solve_care: shape mismatch");
  if (!q.is_symmetric(1e-9 * std::max(q.max_abs(), 1.0)) ||
      !r.is_symmetric(1e-9 * std::max(r.max_abs(), 1.0)))
    throw std::invalid_argument("solve_care: Q and R must be symmetric");
  if (!is_controllable(a, b))
    throw std::runtime_error("solve_care: (A, B) is not controllable");

  Matrix k = detail::initial_stabilizing_gain(a, b);
  Matrix p;
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 60; ++iter) {
    const Matrix a_cl = a - b * k;
    p = solve_lyapunov(a_cl, q + k.transpose() * (r * k));
    k = solve_linear(r, b.transpose() * p);
    residual = are_residual(a, b, q, r, p).frobenius_norm();
    if (residual <= tol) break;
  }
  if (!(residual <= tol))
    throw std::runtime_error("solve_care: Newton iteration did not converge, residual " +
                             std::to_string(residual));
  if (!is_hurwitz(a - b * k))
    throw std::runtime_error("solve_care: converged P does not stabilize the closed loop");
  return RiccatiSolution{p, k, residual};
}

inline Matrix lqr_gain(const RiccatiSolution& sol, const Matrix& b, const Matrix& r) {
  return solve_linear(r, b.transpose() * sol.p);
}

inline StabilityConstants stability_constants(const RiccatiSolution& sol, const Matrix& a,
                                              const Matrix& b, const Matrix& k, double rho,
                                              double r_x, double r_u) {
  if (rho < 0.0) throw std::invalid_argument("stability_constants: rho must be >= 0");
  const Matrix& p = sol.p;
  const Matrix a_cl = a - b * k;
  const Vec p_eigs = sym_eigenvalues(p);
  if (p_eigs.front() <= 0.0)
    throw std::runtime_error("stability_constants: P is not positive definite");
  const Vec m_eigs = sym_eigenvalues(p * a_cl + a_cl.transpose() * p);
  StabilityConstants c;
  c.lambda = -m_eigs.back();
  c.c1 = p_eigs.front();
  c.c2 = p_eigs.back();
  c.c3 = 2.0 * c.c2 * spectral_norm(b);
  c.lam_chol = cholesky_lower(p).transpose();  // Lambda^T Lambda = L L^T = P
  c.rho = rho;
  c.r_x = r_x;
  c.r_u = r_u;
  return c;
}

}  // namespace friday
