#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "friday/riccati.hpp"

using namespace friday;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("lyapunov solve satisfies the equation") {
  const Matrix a = Matrix::from_rows({{-1.0, 2.0}, {0.0, -3.0}});
  const Matrix q = Matrix::from_rows({{4.0, 1.0}, {1.0, 2.0}});
  const Matrix x = solve_lyapunov(a, q);
  CHECK((a.transpose() * x + x * a + q).max_abs() < 1e-12);
}

TEST_CASE("care on the longitudinal-car system") {
  const Matrix a = Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  const Matrix b = Matrix::from_rows({{0.0}, {1.0 / 1.5}});
  const Matrix q = Matrix::diagonal({20.0, 5.0});
  const Matrix r = Matrix::from_rows({{1.0}});
  const RiccatiSolution sol = solve_care(a, b, q, r);
  CHECK(sol.residual_norm <= 1e-10);
  CHECK(are_residual(a, b, q, r, sol.p).frobenius_norm() <= 1e-10);
  CHECK(sol.p.is_symmetric(1e-10));
  const Vec ev = sym_eigenvalues(sol.p);
  CHECK(ev.front() > 0.0);
  CHECK(is_hurwitz(a - b * sol.gain_k));
  // Both gain entries positive for this system.
  CHECK(sol.gain_k(0, 0) > 0.0);
  CHECK(sol.gain_k(0, 1) > 0.0);
  // Hand algebra: K1 = sqrt(q1) / ... for the double integrator, B = [0, 1/m]:
  // b^2 p12^2 = q1 => p12 = sqrt(20)*1.5, K1 = b*p12 = sqrt(20).
  CHECK(sol.gain_k(0, 0) == Catch::Approx(std::sqrt(20.0)).epsilon(1e-8));
}

TEST_CASE("care scalar hand-solved case") {
  // a=0, b=1, q=4, r=1: -p^2 + 4 = 0 => p = 2, k = 2.
  const RiccatiSolution sol =
      solve_care(Matrix::from_rows({{0.0}}), Matrix::from_rows({{1.0}}),
                 Matrix::from_rows({{4.0}}), Matrix::from_rows({{1.0}}));
  CHECK(sol.p(0, 0) == Catch::Approx(2.0).epsilon(1e-10));
  CHECK(sol.gain_k(0, 0) == Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("care rejects an uncontrollable pair") {
  CHECK_THROWS_WITH(solve_care(Matrix::from_rows({{-1.0}}), Matrix::from_rows({{0.0}}),
                               Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}})),
                    Catch::Matchers::ContainsSubstring("controllable"));
}

TEST_CASE("care on 100 random controllable systems up to 4x4") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  int done = 0;
  while (done < 100) {
    const std::size_t n = dim(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, n)(rng);
    const Matrix a = random_matrix(n, n, rng) * 2.0;
    const Matrix b = random_matrix(n, m, rng);
    if (!is_controllable(a, b)) continue;
    const Matrix c = random_matrix(n, n, rng);
    const Matrix q = c * c.transpose() + Matrix::identity(n) * 0.1;
    const Matrix d = random_matrix(m, m, rng);
    const Matrix r = d * d.transpose() + Matrix::identity(m) * 0.5;
    RiccatiSolution sol;
    INFO("system " << done << " n=" << n << " m=" << m);
    REQUIRE_NOTHROW(sol = solve_care(a, b, q, r, 1e-8));
    CHECK(are_residual(a, b, q, r, sol.p).frobenius_norm() <= 1e-8);
    CHECK(sol.p.is_symmetric(1e-9 * std::max(1.0, sol.p.max_abs())));
    CHECK(is_hurwitz(a - b * sol.gain_k));
    ++done;
  }
}

TEST_CASE("lqr gain edge cases") {
  RiccatiSolution sol;
  sol.p = Matrix::from_rows({{2.0}});
  CHECK(lqr_gain(sol, Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}))(0, 0) ==
        Catch::Approx(2.0));
  sol.p = Matrix::from_rows({{0.0}});
  CHECK(lqr_gain(sol, Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}))(0, 0) == 0.0);
  sol.p = Matrix::from_rows({{2.0}});
  CHECK_THROWS(lqr_gain(sol, Matrix::from_rows({{1.0}}), Matrix::from_rows({{0.0}})));
}

TEST_CASE("stability constants in the symmetric identity case") {
  RiccatiSolution sol;
  sol.p = Matrix::identity(2);
  sol.gain_k = Matrix(1, 2);
  sol.residual_norm = 0.0;
  // A_cl = -I comes from a = -I, b = 0-gain.
  const Matrix a = Matrix::identity(2) * -1.0;
  const Matrix b = Matrix::from_rows({{0.0}, {1.0}});
  const Matrix k = Matrix(1, 2);
  const StabilityConstants c = stability_constants(sol, a, b, k, 0.0, 1.0, 1.0);
  CHECK(c.lambda == Catch::Approx(2.0).margin(1e-12));
  CHECK(c.c1 == Catch::Approx(1.0).margin(1e-12));
  CHECK(c.c2 == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("stability constants on the car system") {
  const Matrix a = Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
  const Matrix b = Matrix::from_rows({{0.0}, {2.0 / 3.0}});
  const Matrix q = Matrix::diagonal({20.0, 5.0});
  const Matrix r = Matrix::from_rows({{1.0}});
  const RiccatiSolution sol = solve_care(a, b, q, r);
  const StabilityConstants c = stability_constants(sol, a, b, sol.gain_k, 0.0, 10.0, 50.0);
  CHECK(c.lambda > 0.0);
  CHECK(c.c1 <= c.c2);
  CHECK(c.c1 > 0.0);
  // sigma of a column vector is its Euclidean norm, so c3 = (4/3) lambda_max(P).
  CHECK(c.c3 == Catch::Approx(2.0 * c.c2 * 2.0 / 3.0).epsilon(1e-10));
  CHECK((c.lam_chol.transpose() * c.lam_chol - sol.p).max_abs() < 1e-10);
}

TEST_CASE("stability constants reject a non-PD P") {
  RiccatiSolution sol;
  sol.p = Matrix::diagonal({1.0, -1.0});
  sol.gain_k = Matrix(1, 2);
  const Matrix a = Matrix::identity(2) * -1.0;
  const Matrix b = Matrix::from_rows({{0.0}, {1.0}});
  CHECK_THROWS(stability_constants(sol, a, b, Matrix(1, 2), 0.0, 1.0, 1.0));
}
