// Test-only singular value oracle: one-sided Jacobi (Hestenes) SVD.
// Independent of the power-iteration path it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "friday/matrix.hpp"

namespace friday::testing {

// All singular values of w, descending.
inline Vec svd_singular_values(const Matrix& w) {
  const std::size_t m = w.rows(), n = w.cols();
  // Work on columns of a copy; rotations orthogonalize column pairs.
  std::vector<Vec> col(n, Vec(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) col[j][i] = w(i, j);

  for (int sweep = 0; sweep < 200; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          app += col[p][k] * col[p][k];
          aqq += col[q][k] * col[q][k];
          apq += col[p][k] * col[q][k];
        }
        if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double vp = col[p][k], vq = col[q][k];
          col[p][k] = c * vp - s * vq;
          col[q][k] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  Vec sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = vec_norm(col[j]);
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

inline double svd_spectral_norm(const Matrix& w) { return svd_singular_values(w).front(); }

}  // namespace friday::testing
