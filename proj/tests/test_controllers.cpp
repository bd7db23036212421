#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "friday/controllers.hpp"

using namespace friday;

namespace {

Matrix car_gain() {
  const LtiModel nom = nominal_car(1.5);
  return solve_care(nom.a, nom.b, Matrix::diagonal({20.0, 5.0}), Matrix::from_rows({{1.0}}))
      .gain_k;
}

FridayState make_friday(std::uint64_t seed, double zeta = 1.0,
                        std::vector<std::size_t> sizes = {3, 16, 16, 1}) {
  FridayState st;
  st.gain_k = car_gain();
  st.net = init_network(sizes, seed, zeta);
  st.hyper = TrainingHyper{1e-3, 0.9, 8};
  st.rng.seed(seed + 1000);
  return st;
}

}  // namespace

TEST_CASE("lqr step basics") {
  const Matrix k = Matrix::from_rows({{2.0, 1.0}});
  const Reference ref{{1.0, 0.0}, 0.0};
  CHECK(lqr_step(k, {1.0, 0.0}, ref) == 0.0);
  CHECK(lqr_step(k, {2.0, 0.0}, ref) == -2.0);
  CHECK_THROWS(lqr_step(k, {1.0}, ref));
}

TEST_CASE("friday with a zero network reproduces the lqr input") {
  FridayState st = make_friday(0);
  for (Matrix& w : st.net.weights) w *= 0.0;
  const Reference ref{{1.0, 0.0}, 0.5};
  const Vec x = {0.3, -0.2};
  CHECK(friday_step(st, x, ref, std::nullopt) == lqr_step(st.gain_k, x, ref));
}

TEST_CASE("adaptive with zero weights reproduces the lqr input") {
  const LtiModel nom = nominal_car(1.5);
  const RiccatiSolution sol =
      solve_care(nom.a, nom.b, Matrix::diagonal({20.0, 5.0}), Matrix::from_rows({{1.0}}));
  AdaptiveState st = make_adaptive_state(sol.p);
  const Reference ref{{1.0, 0.0}, 0.0};
  const Vec x = {0.4, 0.1};
  CHECK(adaptive_step(st, sol.gain_k, x, ref, nom.b, 0.05) == lqr_step(sol.gain_k, x, ref));
}

TEST_CASE("adaptive weights freeze when the tracking error is zero") {
  const LtiModel nom = nominal_car(1.5);
  const RiccatiSolution sol =
      solve_care(nom.a, nom.b, Matrix::diagonal({20.0, 5.0}), Matrix::from_rows({{1.0}}));
  AdaptiveState st = make_adaptive_state(sol.p);
  st.w_hat(0, 2) = 0.7;
  const Matrix before = st.w_hat;
  const Reference ref{{0.4, 0.1}, 0.0};
  adaptive_step(st, sol.gain_k, {0.4, 0.1}, ref, nom.b, 0.05);
  CHECK((st.w_hat - before).max_abs() == 0.0);
}

TEST_CASE("adaptive default learning rate is 0.03") {
  CHECK(make_adaptive_state(Matrix::identity(2)).gamma == 0.03);
}

TEST_CASE("friday step runs the training pipeline") {
  FridayState st = make_friday(3);
  const Reference ref{{1.0, 0.0}, 0.0};
  std::optional<double> r_obs;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int k = 0; k < 50; ++k) {
    const Vec x = {dist(rng), dist(rng)};
    friday_step(st, x, ref, r_obs);
    r_obs = dist(rng);
  }
  // One observation per step after the first.
  CHECK(st.dataset.size() == 49);
  CHECK(std::isfinite(st.last_loss));
}

TEST_CASE("prediction used for control is taken after normalization") {
  FridayState st = make_friday(5);
  for (Matrix& w : st.net.weights) w *= 4.0;  // far over budget
  double hook_prediction = 0.0;
  const Vec x = {0.3, 0.1};
  st.post_normalize_hook = [&](const MlpNetwork& net) {
    hook_prediction = mlp_forward(net, {x[0], x[1], st.last_u})[0];
    CHECK(lipschitz_upper_bound(net) <= 1.0 + 1e-9);
  };
  const Reference ref{{0.0, 0.0}, 0.0};
  const double u = friday_step(st, x, ref, std::nullopt);
  CHECK(u == lqr_step(st.gain_k, x, ref) - hook_prediction);
  CHECK(st.last_rhat == hook_prediction);
}

TEST_CASE("non-finite network output falls back to pure lqr") {
  FridayState st = make_friday(6);
  st.sn_enabled = false;
  for (double& w : st.net.weights.back().data()) w = std::numeric_limits<double>::quiet_NaN();
  const Reference ref{{1.0, 0.0}, 0.0};
  const Vec x = {0.2, 0.0};
  const double u = friday_step(st, x, ref, 0.5);
  CHECK(u == lqr_step(st.gain_k, x, ref));
  CHECK(st.last_fallback);
  CHECK(st.dataset.size() == 1);  // the finite observation is still kept
}

TEST_CASE("contraction of the input map under a normalized network") {
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
    FridayState st = make_friday(seed, 1.0);
    normalize_lipschitz(st.net);
    const Reference ref{{0.5, 0.0}, 0.0};
    const Vec x = {0.2, -0.1};
    const double base = lqr_step(st.gain_k, x, ref);
    std::mt19937_64 rng(seed + 40);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int k = 0; k < 10000; ++k) {
      const double u1 = dist(rng), u2 = dist(rng);
      const double f1 = base - mlp_forward(st.net, {x[0], x[1], u1})[0];
      const double f2 = base - mlp_forward(st.net, {x[0], x[1], u2})[0];
      CHECK(std::abs(f1 - f2) <= 1.0 * std::abs(u1 - u2) * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("fixed point iteration with a zero network converges immediately") {
  FridayState st = make_friday(7);
  for (Matrix& w : st.net.weights) w *= 0.0;
  const Reference ref{{1.0, 0.0}, 0.0};
  const Vec x = {0.0, 0.0};
  const double expected = lqr_step(st.gain_k, x, ref);
  auto [u, iters] = fixed_point_iterate(st, x, ref, expected, 1e-12, 100);
  CHECK(u == expected);
  CHECK(iters == 1);
}

TEST_CASE("fixed point gaps contract at rate zeta and the point is unique") {
  FridayState st = make_friday(8, 0.5);
  normalize_lipschitz(st.net);
  const Reference ref{{0.3, 0.0}, 0.1};
  const Vec x = {0.1, 0.2};
  std::vector<double> gaps;
  auto [u1, n1] = fixed_point_iterate(st, x, ref, 5.0, 1e-12, 200, &gaps);
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (gaps[i - 1] > 1e-10) CHECK(gaps[i] <= 0.5 * gaps[i - 1] * (1.0 + 1e-6));
  auto [u2, n2] = fixed_point_iterate(st, x, ref, -7.0, 1e-12, 200);
  CHECK(std::abs(u1 - u2) <= 2e-12);
}

TEST_CASE("fixed point iteration reports non-convergence") {
  FridayState st = make_friday(9, 8.0);
  // Inflate the u column so the map expands.
  for (Matrix& w : st.net.weights) w *= 3.0;
  const Reference ref{{0.0, 0.0}, 0.0};
  CHECK_THROWS(fixed_point_iterate(st, {0.1, 0.1}, ref, 0.0, 1e-12, 20));
}

TEST_CASE("error ball radius structure") {
  StabilityConstants c;
  c.lambda = 2.0;
  c.c1 = 1.0;
  c.c2 = 1.0;
  c.c3 = 2.0;
  c.lam_chol = Matrix::identity(2);
  c.rho = 0.0;
  c.r_x = 10.0;
  c.r_u = 10.0;
  // eps_m = 0 collapses the ball to a point.
  const ErrorBallReport zero = error_ball_radius(c, 1.0, 0.0);
  CHECK(zero.radius == 0.0);
  CHECK(zero.feasibility_ok);
  // rho = 0 reduces the denominator to c1*lambda.
  const ErrorBallReport r1 = error_ball_radius(c, 123.0, 0.5);
  CHECK(r1.radius == Catch::Approx(1.0 * (1.0 * 2.0 * std::sqrt(1.0)) / 2.0 * 0.5));
  // Denominator failure.
  c.rho = 2.0;
  CHECK_THROWS(error_ball_radius(c, 1.0, 0.5));
  CHECK_THROWS(error_ball_radius(c, 1.0, -0.1));
}

TEST_CASE("rho estimation from logs") {
  TrajectoryLog log;
  LogRow a;
  a.u = 1.0;
  a.p = 1.0;  // z = 1 (pr = 0)
  LogRow b = a;
  b.u = 1.5;
  log.rows = {a, b};
  CHECK(estimate_rho(log) == Catch::Approx(0.5));

  // Constant input gives rho 0.
  b.u = 1.0;
  log.rows = {a, b};
  CHECK(estimate_rho(log) == 0.0);

  // All z below threshold errors out.
  a.p = 0.0;
  b.p = 0.0;
  b.u = 2.0;
  log.rows = {a, b};
  CHECK_THROWS(estimate_rho(log));
}
