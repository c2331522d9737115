#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pan/dataset.hpp"
#include "pan/errors.hpp"
#include "pan/estimators.hpp"
#include "pan/rng.hpp"

using namespace pan;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

Vec random_vec(std::size_t p, RandomStream& rng) {
  Vec v(p);
  for (double& x : v) x = rng.normal();
  return v;
}

Dataset random_design(std::size_t n, std::size_t p, RandomStream& rng, bool ortho) {
  Dataset d;
  Matrix z(n, p);
  for (double& v : z.data) v = rng.normal();
  d.x = ortho ? orthonormalize(z) : z;
  d.y.resize(n);
  return d;
}

// test-local oracle: Gaussian elimination with partial pivoting on the
// normal equations, independent of the QR route in the library
Vec naive_normal_solve(const Matrix& x, const Vec& y) {
  const std::size_t p = x.cols;
  Matrix a = gram(x);
  Vec b = tmatvec(x, y);
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < p; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (piv != k) {
      for (std::size_t j = 0; j < p; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < p; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < p; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  for (std::size_t ii = p; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < p; ++j) s -= a(ii, j) * b[j];
    b[ii] = s / a(ii, ii);
  }
  return b;
}

double max_abs_diff_vec(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
}  // namespace

TEST_CASE("ols on an orthonormal design is X'Y") {
  RandomStream rng(3, 0);
  Dataset d = random_design(40, 5, rng, true);
  for (double& v : d.y) v = rng.normal();
  const Vec beta = ols_fit(d).beta;
  CHECK(max_abs_diff_vec(beta, tmatvec(d.x, d.y)) < 1e-10);
}

TEST_CASE("ols matches an independent normal-equation solve") {
  RandomStream rng(7, 1);
  Dataset d = random_design(50, 6, rng, false);
  for (double& v : d.y) v = rng.normal();
  const Vec beta = ols_fit(d).beta;
  CHECK(max_abs_diff_vec(beta, naive_normal_solve(d.x, d.y)) < 1e-9);
  // residual orthogonal to the column span
  Vec resid = d.y;
  const Vec fitted = matvec(d.x, beta);
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= fitted[i];
  const Vec xt_r = tmatvec(d.x, resid);
  for (double v : xt_r) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("ols rejects a singular design") {
  Dataset d;
  d.x = Matrix(5, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    d.x(i, 0) = static_cast<double>(i + 1);
    d.x(i, 1) = 3.0 * static_cast<double>(i + 1);
  }
  d.y = {1, 2, 3, 4, 5};
  CHECK_THROWS_AS(ols_fit(d), RankError);
}

TEST_CASE("ridge basics") {
  RandomStream rng(5, 2);
  Dataset d = random_design(40, 4, rng, true);
  for (double& v : d.y) v = rng.normal();
  const Vec ols = ols_fit(d).beta;
  CHECK(max_abs_diff_vec(ridge_fit(d, 0.0).beta, ols) < 1e-10);
  const Vec half = ridge_fit(d, 1.0).beta;
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(half[j] == doctest::Approx(ols[j] / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(ridge_fit(d, -0.5), DomainError);
}

TEST_CASE("pan reduces to ols at lambda2 = 0") {
  RandomStream rng(13, 3);
  const CoefficientVector bt{random_vec(6, rng)};
  const Vec x0 = random_vec(6, rng);
  const PanFit fit = pan_fit_orthonormal(bt, x0, 0.0);
  CHECK(fit.c_value == doctest::Approx(1.0));
  CHECK(max_abs_diff_vec(fit.beta_hat.beta, bt.beta) < 1e-12);
}

TEST_CASE("pan at huge lambda2 projects onto the zero-prediction hyperplane") {
  RandomStream rng(17, 4);
  const CoefficientVector bt{random_vec(5, rng)};
  const Vec x0 = random_vec(5, rng);
  const PanFit fit = pan_fit_orthonormal(bt, x0, 1e8);
  // projection of bt onto {b : x0'b = 0}
  Vec proj = bt.beta;
  axpy(-dot(x0, bt.beta) / norm2(x0), x0, proj);
  CHECK(max_abs_diff_vec(fit.beta_hat.beta, proj) < 1e-3);
  CHECK(std::abs(pan_predict(fit)) < 1e-3 * std::abs(dot(x0, bt.beta)));
}

TEST_CASE("degenerate inputs are refused") {
  const CoefficientVector zero{{0.0, 0.0}};
  const CoefficientVector ok{{1.0, 2.0}};
  CHECK_THROWS_AS(pan_fit_orthonormal(zero, {1.0, 0.0}, 1.0), DegenerateInputError);
  CHECK_THROWS_AS(pan_fit_orthonormal(ok, {0.0, 0.0}, 1.0), DegenerateInputError);
}

TEST_CASE("collinear x0 takes the continuous branch") {
  const CoefficientVector bt{{0.6, 0.8}};
  const Vec x0 = {1.2, 1.6};  // parallel to bt
  const PanFit weak = pan_fit_orthonormal(bt, x0, 0.5);  // lambda < ||bt||^2
  CHECK(max_abs_diff_vec(weak.beta_hat.beta, bt.beta) < 1e-10);
  const PanFit strong = pan_fit_orthonormal(bt, x0, 5.0);  // lambda > ||bt||^2
  CHECK(norm(strong.beta_hat.beta) < 1e-10);
}

TEST_CASE("pan-ridge reductions") {
  RandomStream rng(19, 5);
  const CoefficientVector bt{random_vec(6, rng)};
  const Vec x0 = random_vec(6, rng);

  // lambda2 = 0 -> ridge scaling
  const PanFit ridge_like = pan_ridge_fit_orthonormal(bt, x0, 3.0, 0.0);
  for (std::size_t j = 0; j < 6; ++j)
    CHECK(ridge_like.beta_hat.beta[j] == doctest::Approx(bt.beta[j] / 4.0).epsilon(1e-12));

  // lambda1 = 0 -> plain pan
  const PanFit pr = pan_ridge_fit_orthonormal(bt, x0, 0.0, 2.5);
  const PanFit plain = pan_fit_orthonormal(bt, x0, 2.5);
  CHECK(max_abs_diff_vec(pr.beta_hat.beta, plain.beta_hat.beta) < 1e-14);
  CHECK(pr.c_value == doctest::Approx(plain.c_value));
}

TEST_CASE("unit direction, length identity, eigen residual") {
  RandomStream rng(23, 6);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng.next_u64() % 14);
    const CoefficientVector bt{random_vec(p, rng)};
    const Vec x0 = random_vec(p, rng);
    if (norm(bt.beta) < 1e-8 || norm(x0) < 1e-8) continue;
    const double l1 = std::abs(rng.normal()) * 3.0;
    const double l2 = rng.normal() * 4.0;
    const PanFit fit = pan_ridge_fit_orthonormal(bt, x0, l1, l2);

    const Vec& bh = fit.beta_hat.beta;
    const double r_hat = norm(bh);
    if (r_hat < 1e-12) continue;  // fully shrunk; direction undefined
    Vec gamma = scaled(bh, 1.0 / r_hat);
    CHECK(norm(gamma) == doctest::Approx(1.0).epsilon(1e-12));

    // length identity r = ridge-scaled estimate dotted with the direction
    CHECK(r_hat ==
          doctest::Approx(dot(scaled(bt.beta, 1.0 / (1.0 + l1)), gamma)).epsilon(1e-10));

    // eigen property of M = bt(l1) bt(l1)'(1+l1) - l2 g0 g0'
    const double big = (1.0 + l1) * l2;
    const double h2 = norm2(x0);
    const std::size_t dim = p;
    Matrix m(dim, dim);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        m(a, b) = bt.beta[a] * bt.beta[b] / (1.0 + l1) - big / (1.0 + l1) * x0[a] * x0[b] / h2;
    const Vec mg = matvec(m, gamma);
    const double rayleigh = dot(gamma, mg);
    Vec resid = mg;
    axpy(-rayleigh, gamma, resid);
    double mnorm = 0.0;
    for (double v : m.data) mnorm += v * v;
    mnorm = std::sqrt(mnorm);
    CHECK(norm(resid) < 1e-8 * std::max(mnorm, 1.0));
  }
}

TEST_CASE("prediction route consistency") {
  RandomStream rng(29, 7);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng.next_u64() % 14);
    const CoefficientVector bt{random_vec(p, rng)};
    const Vec x0 = random_vec(p, rng);
    if (norm(bt.beta) < 1e-8 || norm(x0) < 1e-8) continue;
    const double l1 = std::abs(rng.normal()) * 3.0;
    const double l2 = rng.normal() * 4.0;
    const PanFit fit = pan_ridge_fit_orthonormal(bt, x0, l1, l2);
    const double via_dot = pan_predict(fit);
    const double via_factor = fit.shrinkage_factor * fit.reference_prediction;
    CHECK(via_dot == doctest::Approx(via_factor).epsilon(1e-10));
    // factor route through the public function agrees
    CHECK(fit.shrinkage_factor ==
          doctest::Approx(shrinkage_factor(fit.cos_sim, norm(bt.beta), l1, l2))
              .epsilon(1e-10));
  }
}

TEST_CASE("shrink-to-zero is monotone for growing lambda2") {
  RandomStream rng(31, 8);
  const CoefficientVector bt{random_vec(6, rng)};
  const Vec x0 = random_vec(6, rng);
  double prev = std::abs(pan_predict(pan_fit_orthonormal(bt, x0, 0.0)));
  for (double l2 : {1.0, 10.0, 100.0, 1e4}) {
    const double cur = std::abs(pan_predict(pan_fit_orthonormal(bt, x0, l2)));
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("negative lambda2 at -1e8 recovers the reference prediction") {
  RandomStream rng(37, 9);
  const CoefficientVector bt{random_vec(6, rng)};
  const Vec x0 = random_vec(6, rng);
  const PanFit fit = pan_fit_orthonormal(bt, x0, -1e8);
  const double ref = dot(x0, bt.beta);
  CHECK(std::abs(pan_predict(fit) - ref) < 1e-3 * std::abs(ref));
}

TEST_CASE("shrinkage factor values and bounds") {
  CHECK(shrinkage_factor(0.3, 2.0, 0.0, 0.0) == doctest::Approx(1.0));
  CHECK(shrinkage_factor(-0.9, 2.0, 0.0, 0.0) == doctest::Approx(1.0));
  // hand value: ||b|| = 1, l1 = 0, cos = 0, l2 = 1 -> 1/2
  CHECK(shrinkage_factor(0.0, 1.0, 0.0, 1.0) == doctest::Approx(0.5));

  RandomStream rng(41, 10);
  for (int rep = 0; rep < 200; ++rep) {
    const double cs = rng.uniform() * 2.0 - 1.0;
    const double bn = rng.uniform() * 3.0 + 0.1;
    const double l2 = rng.normal() * 5.0;
    // even in cos_sim
    CHECK(shrinkage_factor(cs, bn, 0.0, l2) ==
          doctest::Approx(shrinkage_factor(-cs, bn, 0.0, l2)).epsilon(1e-12));
    if (l2 >= 0.0) {
      const double f = shrinkage_factor(cs, bn, 0.0, l2);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0 + 1e-12);
    }
  }
  // inversion for negative lambda2 at orthogonality
  const double s = 4.0;
  CHECK(shrinkage_factor(0.0, 2.0, 0.0, -1.0) == doctest::Approx(s / (s - 1.0)));
  CHECK(shrinkage_factor(0.0, 2.0, 0.0, -1.0) > 1.0);
}

TEST_CASE("shrinkage curve shape: minimum at zero cosine, personalization") {
  // positive lambda2: strongest shrinkage at cos 0, factor -> 1 at |cos| -> 1
  const double f0 = shrinkage_factor(0.0, 1.0, 0.0, 2.5);
  const double fmid = shrinkage_factor(0.5, 1.0, 0.0, 2.5);
  const double fhigh = shrinkage_factor(0.95, 1.0, 0.0, 2.5);
  CHECK(f0 < fmid);
  CHECK(fmid < fhigh);
  // two targets with different |cos| receive different factors
  CHECK(shrinkage_factor(0.1, 1.0, 0.0, 2.5) != shrinkage_factor(0.6, 1.0, 0.0, 2.5));
}

TEST_CASE("two-dimensional tangent solution") {
  // lambda2 = 0 keeps the OLS polar coordinates
  const CoefficientVector bt{{0.8, 0.45}};
  const Vec x0 = {-0.3, 1.1};
  const PanFit at_zero = pan_fit_2d(bt, x0, 0.0);
  CHECK(at_zero.beta_hat.beta[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(at_zero.beta_hat.beta[1] == doctest::Approx(0.45).epsilon(1e-12));

  // the huge-lambda limit turns the estimate orthogonal to x0
  const PanFit limit = pan_fit_2d(bt, x0, 1e8);
  const double a0 = std::atan2(x0[1], x0[0]);
  const double ahat = std::atan2(limit.beta_hat.beta[1], limit.beta_hat.beta[0]);
  const double target = a0 + kPi / 2;  // OLS angle lies in [a0, a0 + pi]
  double diff = std::fmod(std::abs(ahat - target), 2.0 * kPi);
  if (diff > kPi) diff = 2.0 * kPi - diff;
  CHECK(diff < 1e-3);
}

TEST_CASE("rank-2 closed form agrees with the 2-d tangent oracle") {
  RandomStream rng(3, 11);
  for (double l2 : {-1.0, 0.5, 3.0}) {
    for (int rep = 0; rep < 50; ++rep) {
      const CoefficientVector bt{random_vec(2, rng)};
      const Vec x0 = random_vec(2, rng);
      if (norm(bt.beta) < 1e-6 || norm(x0) < 1e-6) continue;
      const PanFit closed = pan_fit_orthonormal(bt, x0, l2);
      const PanFit tangent = pan_fit_2d(bt, x0, l2);
      CHECK(max_abs_diff_vec(closed.beta_hat.beta, tangent.beta_hat.beta) < 1e-8);
    }
  }
}
