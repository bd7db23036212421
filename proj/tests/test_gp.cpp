#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "friday/gp.hpp"

using namespace friday;

TEST_CASE("matern52 kernel values") {
  CHECK(matern52({1.0, 2.0}, {1.0, 2.0}, 1.0, 1.7) == Catch::Approx(1.7));
  // d = l = 1: (1 + sqrt5 + 5/3) exp(-sqrt5).
  const double s5 = std::sqrt(5.0);
  CHECK(matern52({0.0}, {1.0}, 1.0, 1.0) ==
        Catch::Approx((1.0 + s5 + 5.0 / 3.0) * std::exp(-s5)));
  // Monotone decay far out.
  double prev = matern52({0.0}, {2.0}, 1.0, 1.0);
  for (double d = 3.0; d < 20.0; d += 1.0) {
    const double k = matern52({0.0}, {d}, 1.0, 1.0);
    CHECK(k < prev);
    prev = k;
  }
  CHECK(prev < 1e-6);
  CHECK_THROWS(matern52({0.0}, {1.0}, 0.0, 1.0));
}

TEST_CASE("single-point fit matches the closed form") {
  const GpModel m = gp_fit({{0.5}}, {2.0}, 1.0, 1.0, 0.25);
  const auto [mean, var] = gp_predict(m, {0.5});
  CHECK(mean == Catch::Approx(2.0 * 1.0 / (1.0 + 0.25)).epsilon(1e-6));
  CHECK(var >= 0.0);
}

TEST_CASE("large noise pulls predictions to the prior mean") {
  const GpModel m = gp_fit({{0.0}, {1.0}}, {5.0, -3.0}, 1.0, 1.0, 1e6);
  CHECK(std::abs(gp_predict(m, {0.5}).first) < 1e-4);
}

TEST_CASE("prediction far from data recovers the prior") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vec> xs;
  Vec ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back({dist(rng), dist(rng)});
    ys.push_back(dist(rng));
  }
  const GpModel m = gp_fit(xs, ys);
  const auto [mean, var] = gp_predict(m, {500.0, 500.0});
  CHECK(std::abs(mean) < 1e-8);
  CHECK(var == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("interpolation limit with vanishing noise") {
  const GpModel m = gp_fit({{0.0}, {2.0}}, {1.0, -1.0}, 1.0, 1.0, 1e-10);
  CHECK(gp_predict(m, {0.0}).first == Catch::Approx(1.0).margin(1e-4));
  CHECK(gp_predict(m, {2.0}).first == Catch::Approx(-1.0).margin(1e-4));
}

TEST_CASE("cholesky predictions match a dense solve oracle on n=50") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<Vec> xs;
  Vec ys;
  for (int i = 0; i < 50; ++i) {
    xs.push_back({dist(rng), dist(rng), dist(rng)});
    ys.push_back(std::sin(xs.back()[0]) + 0.2 * xs.back()[1]);
  }
  const GpModel m = gp_fit(xs, ys);
  // Oracle: direct Gaussian-elimination solve of (K + sigma^2 I) alpha = y.
  Matrix k(50, 50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) k(i, j) = matern52(xs[i], xs[j], 1.0, 1.0);
    k(i, i) += 1e-2 + 1e-8;
  }
  const Vec alpha = solve_linear(k, ys);
  for (int probe = 0; probe < 20; ++probe) {
    const Vec x = {dist(rng), dist(rng), dist(rng)};
    Vec kstar(50);
    for (int i = 0; i < 50; ++i) kstar[i] = matern52(x, xs[i], 1.0, 1.0);
    CHECK(gp_predict(m, x).first == Catch::Approx(vec_dot(kstar, alpha)).margin(1e-8));
  }
}

TEST_CASE("predictive variance is nonnegative at many points") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<Vec> xs;
  Vec ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back({dist(rng)});
    ys.push_back(dist(rng));
  }
  const GpModel m = gp_fit(xs, ys);
  for (int i = 0; i < 10000; ++i) CHECK(gp_predict(m, {dist(rng) * 3.0}).second >= 0.0);
}

TEST_CASE("fit is deterministic for identical inputs") {
  std::vector<Vec> xs = {{0.0}, {1.0}, {2.0}};
  Vec ys = {1.0, 0.0, -1.0};
  const GpModel a = gp_fit(xs, ys);
  const GpModel b = gp_fit(xs, ys);
  CHECK(a.alpha == b.alpha);
  CHECK(gp_predict(a, {0.7}).first == gp_predict(b, {0.7}).first);
}

TEST_CASE("gp_fit input validation") {
  CHECK_THROWS(gp_fit({}, {}));
  CHECK_THROWS(gp_fit({{0.0}}, {1.0, 2.0}));
  CHECK_THROWS(gp_fit({{0.0}}, {1.0}, 1.0, 1.0, 0.0));
}
