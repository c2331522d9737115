#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pan/dataset.hpp"
#include "pan/errors.hpp"
#include "pan/optimizer.hpp"
#include "pan/rng.hpp"

using namespace pan;

namespace {

Vec random_vec(std::size_t p, RandomStream& rng) {
  Vec v(p);
  for (double& x : v) x = rng.normal();
  return v;
}

Dataset random_data(std::size_t n, std::size_t p, RandomStream& rng, bool ortho,
                    double noise = 1.0) {
  Dataset d;
  Matrix z(n, p);
  for (double& v : z.data) v = rng.normal();
  d.x = ortho ? orthonormalize(z) : z;
  d.y.resize(n);
  const Vec beta = random_vec(p, rng);
  const Vec mean = matvec(d.x, beta);
  for (std::size_t i = 0; i < n; ++i) d.y[i] = mean[i] + noise * rng.normal();
  return d;
}

Vec fd_gradient(const Vec& beta, const Dataset& d, const Vec& x0, double l1, double l2) {
  Vec g(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    const double h = 1e-6 * (1.0 + std::abs(beta[j]));
    Vec up = beta, dn = beta;
    up[j] += h;
    dn[j] -= h;
    g[j] = (objective(up, d, x0, l1, l2) - objective(dn, d, x0, l1, l2)) / (2.0 * h);
  }
  return g;
}

double max_abs_diff_vec(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("objective basics") {
  RandomStream rng(1, 0);
  Dataset d = random_data(30, 4, rng, true);
  const Vec bt = ols_fit(d).beta;

  // at lambda = 0 the OLS point beats random candidates
  const double f_ols = objective(bt, d, {1, 0, 0, 0}, 0.0, 0.0);
  for (int rep = 0; rep < 50; ++rep) {
    Vec cand = random_vec(4, rng);
    CHECK(f_ols <= objective(cand, d, {1, 0, 0, 0}, 0.0, 0.0) + 1e-12);
  }

  // a coefficient vector orthogonal to x0 pays no angle penalty
  const Vec x0 = {1.0, 0.0, 0.0, 0.0};
  const Vec b_perp = {0.0, 1.0, -2.0, 0.5};
  CHECK(objective(b_perp, d, x0, 0.0, 7.0) ==
        doctest::Approx(objective(b_perp, d, x0, 0.0, 0.0)).epsilon(1e-14));

  CHECK_THROWS_AS(objective({0.0, 0.0, 0.0, 0.0}, d, x0, 0.0, 1.0), DomainError);
}

TEST_CASE("closed form sits at a local minimum of the objective") {
  RandomStream rng(2, 1);
  Dataset d = random_data(40, 5, rng, true);
  const CoefficientVector bt = ols_fit(d);
  const Vec x0 = random_vec(5, rng);
  const Vec bhat = pan_ridge_fit_orthonormal(bt, x0, 1.0, 2.0).beta_hat.beta;
  const double f_hat = objective(bhat, d, x0, 1.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    Vec cand = bhat;
    for (double& v : cand) v += 0.1 * rng.normal();
    if (norm(cand) < 1e-10) continue;
    CHECK(f_hat <= objective(cand, d, x0, 1.0, 2.0) + 1e-10);
  }
}

TEST_CASE("gradient vanishes at the OLS point when unpenalized") {
  RandomStream rng(3, 2);
  Dataset d = random_data(30, 4, rng, false);
  const Vec bt = ols_fit(d).beta;
  const Vec g = gradient(bt, d, random_vec(4, rng), 0.0, 0.0);
  for (double v : g) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("gradient matches central finite differences") {
  RandomStream rng(9, 3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng.next_u64() % 13);
    Dataset d = random_data(3 * p + 5, p, rng, false);
    const Vec x0 = random_vec(p, rng);
    Vec beta = random_vec(p, rng);
    if (norm(beta) < 0.3) beta[0] += 1.0;
    const double l1 = std::abs(rng.normal()) * 2.0;
    const double l2 = rng.normal() * 4.0;
    const Vec g = gradient(beta, d, x0, l1, l2);
    const Vec fd = fd_gradient(beta, d, x0, l1, l2);
    const double scale = std::max(norm(g), 1.0);
    CHECK(max_abs_diff_vec(g, fd) < 1e-5 * scale);
  }
}

TEST_CASE("gradient with x0-orthogonal beta keeps only the quadratic angle term") {
  RandomStream rng(11, 4);
  Dataset d = random_data(25, 3, rng, false);
  const Vec x0 = {2.0, 0.0, 0.0};
  const Vec beta = {0.0, 1.0, -0.5};  // x0'beta = 0
  const Vec g_pen = gradient(beta, d, x0, 0.0, 5.0);
  Vec g_base = gradient(beta, d, x0, 0.0, 0.0);
  // remaining penalty contribution: 2 l2' x0 x0' b / b'b with x0'b = 0 -> zero,
  // fourth term vanishes as well, so both gradients coincide
  CHECK(max_abs_diff_vec(g_pen, g_base) < 1e-12);
}

TEST_CASE("hyperspherical objective equals the cartesian one") {
  RandomStream rng(13, 5);
  Dataset d = random_data(20, 4, rng, false);
  const HypersphericalData hd = to_hyperspherical_data(d);
  const Vec x0 = random_vec(4, rng);
  const HypersphericalCoords x0c = to_hyperspherical(x0);
  for (int rep = 0; rep < 50; ++rep) {
    Vec beta = random_vec(4, rng);
    if (norm(beta) < 0.2) beta[0] += 1.0;
    const HypersphericalCoords bc = to_hyperspherical(beta);
    const double l2 = rng.normal() * 3.0;
    const double fh = objective_hyperspherical(bc, hd, x0c, l2);
    const double fc = objective(beta, d, x0, 0.0, l2);
    CHECK(fh == doctest::Approx(fc).epsilon(1e-10));
  }
}

TEST_CASE("hyperspherical objective reduces to the squared-cosine penalty at p = 2") {
  RandomStream rng(17, 6);
  Dataset d = random_data(15, 2, rng, false);
  const HypersphericalData hd = to_hyperspherical_data(d);
  const Vec x0 = {0.6, -1.1};
  const HypersphericalCoords x0c = to_hyperspherical(x0);
  const Vec beta = {0.9, 0.4};
  const HypersphericalCoords bc = to_hyperspherical(beta);
  const double l2 = 2.5;
  const double ab = std::atan2(beta[1], beta[0]);
  const double a0 = std::atan2(x0[1], x0[0]);
  const double expected_pen = l2 * std::cos(ab - a0) * std::cos(ab - a0);
  const double rss = objective(beta, d, x0, 0.0, 0.0);
  CHECK(objective_hyperspherical(bc, hd, x0c, l2) ==
        doctest::Approx(rss + expected_pen).epsilon(1e-10));
  // lambda2 = 0 leaves the plain (hyperspherical) residual sum of squares
  CHECK(objective_hyperspherical(bc, hd, x0c, 0.0) == doctest::Approx(rss).epsilon(1e-10));
}

TEST_CASE("fit_general matches the closed form on orthonormal designs") {
  RandomStream rng(19, 7);
  for (double l1 : {0.0, 1.0, 4.0}) {
    for (double l2 : {-2.0, 0.0, 2.5, 10.0}) {
      Dataset d = random_data(40, 6, rng, true);
      const Vec x0 = random_vec(6, rng);
      const Vec closed = pan_ridge_fit_orthonormal(ols_fit(d), x0, l1, l2).beta_hat.beta;
      const Vec numeric = fit_general(d, x0, l1, l2).beta_hat.beta;
      CHECK(max_abs_diff_vec(closed, numeric) < 1e-6);
    }
  }
}

TEST_CASE("fit_general at zero penalties returns OLS") {
  RandomStream rng(23, 8);
  Dataset d = random_data(30, 5, rng, false);
  const Vec x0 = random_vec(5, rng);
  CHECK(max_abs_diff_vec(fit_general(d, x0, 0.0, 0.0).beta_hat.beta, ols_fit(d).beta) <
        1e-8);
}

TEST_CASE("fit_general kills the prediction at huge lambda2") {
  RandomStream rng(29, 9);
  Dataset d = random_data(40, 5, rng, true);
  const Vec x0 = random_vec(5, rng);
  const PanFit fit = fit_general(d, x0, 0.0, 1e6);
  const double ref = dot(x0, ols_fit(d).beta);
  CHECK(std::abs(pan_predict(fit)) < 1e-3 * std::abs(ref));
}

TEST_CASE("hyperspherical parametrization reaches the same minimum") {
  RandomStream rng(31, 10);
  OptimizerConfig hs;
  hs.parametrization = OptimizerConfig::Parametrization::hyperspherical;
  for (int rep = 0; rep < 10; ++rep) {
    Dataset d = random_data(30, 4, rng, false, 0.5);
    const Vec x0 = random_vec(4, rng);
    const Vec a = fit_general(d, x0, 0.5, 1.5).beta_hat.beta;
    const Vec b = fit_general(d, x0, 0.5, 1.5, hs).beta_hat.beta;
    CHECK(max_abs_diff_vec(a, b) < 1e-6);
  }
}

TEST_CASE("objective never increases against the initializer") {
  RandomStream rng(37, 11);
  for (int rep = 0; rep < 20; ++rep) {
    Dataset d = random_data(25, 4, rng, false);
    const Vec x0 = random_vec(4, rng);
    const double l1 = std::abs(rng.normal());
    const double l2 = rng.normal() * 5.0;
    const Vec init = ols_fit(d).beta;
    const PanFit fit = fit_general(d, x0, l1, l2);
    CHECK(objective(fit.beta_hat.beta, d, x0, l1, l2) <=
          objective(init, d, x0, l1, l2) + 1e-9);
  }
}

TEST_CASE("iteration budget exhaustion carries the best iterate") {
  RandomStream rng(41, 12);
  Dataset d = random_data(30, 5, rng, false);
  const Vec x0 = random_vec(5, rng);
  OptimizerConfig cfg;
  cfg.max_iterations = 1;
  cfg.gradient_tolerance = 1e-16;
  cfg.extra_starts = 0;
  try {
    fit_general(d, x0, 0.0, 3.0, cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.best_point.size() == 5);
    CHECK(std::isfinite(e.best_value));
  }
}
