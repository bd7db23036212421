// Dense small-matrix numerics: row-major matrices, linear solves,
// symmetric Jacobi eigenvalues, general eigenvalues via the characteristic
// polynomial, Cholesky, and power-iteration spectral norm.
//
// Everything here targets tiny dimensions (state-space matrices up to ~4x4,
// network layers up to ~64x64); algorithms are chosen for robustness at that
// scale, not asymptotics.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace friday {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double vec_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double vec_dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_dot: size mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vec_sub: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static Matrix diagonal(const Vec& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("Matrix multiply: dimension mismatch");
    Matrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  Vec operator*(const Vec& v) const {
    if (cols_ != v.size()) throw std::invalid_argument("Matrix*Vec: dimension mismatch");
    Vec r(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  Matrix operator+(const Matrix& o) const {
    check_same_shape(o, "+");
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
  }

  Matrix operator-(const Matrix& o) const {
    check_same_shape(o, "-");
    Matrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o, "+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  Matrix& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }

  Matrix operator*(double s) const {
    Matrix r = *this;
    r *= s;
    return r;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const { return friday::all_finite(data_); }

  bool is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
  }

 private:
  void check_same_shape(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("Matrix ") + op + ": shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

inline Matrix operator*(double s, const Matrix& m) { return m * s; }

// Solves A X = B by Gaussian elimination with partial pivoting.
inline Matrix solve_linear(Matrix a, Matrix b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n) throw std::invalid_argument("solve_linear: shape mismatch");
  const std::size_t m = b.cols();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
    if (std::abs(a(piv, col)) < 1e-300)
      throw std::runtime_error("solve_linear: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(b(col, j), b(piv, j));
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) * inv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < m; ++j) b(i, j) -= f * b(col, j);
    }
  }
  Matrix x(n, m);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = b(i, j);
      for (std::size_t k = i + 1; k < n; ++k) s -= a(i, k) * x(k, j);
      x(i, j) = s / a(i, i);
    }
  }
  return x;
}

inline Vec solve_linear(const Matrix& a, const Vec& b) {
  Matrix col(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) col(i, 0) = b[i];
  Matrix x = solve_linear(a, col);
  Vec r(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = x(i, 0);
  return r;
}

inline Matrix inverse(const Matrix& a) {
  return solve_linear(a, Matrix::identity(a.rows()));
}

// Lower Cholesky factor L with P = L L^T. Throws if P is not positive
// definite (within roundoff).
inline Matrix cholesky_lower(const Matrix& p) {
  const std::size_t n = p.rows();
  if (p.cols() != n) throw std::invalid_argument("cholesky_lower: not square");
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = p(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("cholesky_lower: matrix not positive definite");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, returned in
// ascending order. Off-diagonal norm driven below 1e-12 * ||A||_F.
inline Vec sym_eigenvalues(Matrix a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("sym_eigenvalues: not square");
  const double scale = std::max(a.frobenius_norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
    if (std::sqrt(off) <= 1e-12 * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// p(x) = x^n + c[0] x^(n-1) + ... + c[n-1].
inline Vec characteristic_polynomial(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("characteristic_polynomial: not square");
  Vec c(n);
  Matrix m = a;
  for (std::size_t k = 1; k <= n; ++k) {
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += m(i, i);
    c[k - 1] = -tr / static_cast<double>(k);
    if (k == n) break;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += c[k - 1];
    m = a * m;
  }
  return c;
}

// All (possibly complex) eigenvalues of a small real matrix: characteristic
// polynomial roots by Durand-Kerner iteration. Adequate for n <= ~8.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  using C = std::complex<double>;
  const std::size_t n = a.rows();
  if (n == 0) return {};
  if (n == 1) return {C(a(0, 0), 0.0)};
  const Vec c = characteristic_polynomial(a);
  auto poly = [&](C x) {
    C v(1.0, 0.0);
    for (double ck : c) v = v * x + C(ck, 0.0);
    return v;
  };
  double radius = 1.0;
  for (std::size_t k = 0; k < n; ++k)
    radius = std::max(radius, std::pow(std::abs(c[k]), 1.0 / static_cast<double>(k + 1)));
  radius *= 2.0;
  std::vector<C> roots(n);
  const C seed(0.4, 0.9);
  C acc(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    acc *= seed;
    roots[i] = radius * acc / std::abs(acc);
  }
  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      C denom(1.0, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      if (std::abs(denom) < 1e-300) denom = C(1e-300, 0.0);
      const C step = poly(roots[i]) / denom;
      roots[i] -= step;
      max_step = std::max(max_step, std::abs(step));
    }
    if (max_step <= 1e-13 * std::max(radius, 1.0)) break;
  }
  return roots;
}

inline double max_real_eigenvalue_part(const Matrix& a) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(a)) m = std::max(m, ev.real());
  return m;
}

inline bool is_hurwitz(const Matrix& a, double margin = 0.0) {
  return max_real_eigenvalue_part(a) < -margin;
}

// Thrown when power iteration fails to settle; carries the last estimate so
// callers can inspect how far off the iterate was.
class SpectralNormError : public std::runtime_error {
 public:
  SpectralNormError(const std::string& what, double last)
      : std::runtime_error(what), last_estimate_(last) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

// Largest singular value by power iteration on W^T W. `v` carries the start
// vector and is left at the converged right singular vector, so callers that
// re-normalize a slowly drifting matrix can warm-start the next call.
inline double spectral_norm_warm(const Matrix& w, Vec& v, double tol = 1e-12,
                                 std::size_t max_iter = 10000) {
  const std::size_t n = w.cols();
  if (w.rows() == 0 || n == 0) throw std::invalid_argument("spectral_norm: empty matrix");
  if (tol <= 0.0) throw std::invalid_argument("spectral_norm: tol must be > 0");
  if (w.frobenius_norm() == 0.0)
    throw std::invalid_argument("spectral_norm: zero matrix");
  if (v.size() != n) {
    v.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  } else {
    const double nv = vec_norm(v);
    if (!(nv > 0.0) || !all_finite(v)) v.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  }
  double sigma_prev = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Vec wv = w * v;
    const double sigma = vec_norm(wv);
    if (sigma == 0.0) {
      // Start vector landed in the null space; restart deterministically off-axis.
      for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i);
      const double nv = vec_norm(v);
      for (double& x : v) x /= nv;
      sigma_prev = 0.0;
      continue;
    }
    Vec wtwv = w.transpose() * wv;
    const double nn = vec_norm(wtwv);
    if (nn == 0.0) return sigma;
    for (std::size_t i = 0; i < n; ++i) v[i] = wtwv[i] / nn;
    if (it > 0 && std::abs(sigma - sigma_prev) <= tol * std::max(sigma, 1e-300)) return sigma;
    sigma_prev = sigma;
  }
  throw SpectralNormError("spectral_norm: power iteration did not converge", sigma_prev);
}

// Spectral norm with the fixed deterministic all-ones start vector, so
// results are reproducible run-to-run.
inline double spectral_norm(const Matrix& w, double tol = 1e-12,
                            std::size_t max_iter = 10000) {
  Vec v;
  return spectral_norm_warm(w, v, tol, max_iter);
}

}  // namespace friday
