#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pan/csv.hpp"
#include "pan/dataset.hpp"
#include "pan/errors.hpp"
#include "pan/estimators.hpp"
#include "pan/hypersphere.hpp"
#include "pan/rng.hpp"

using namespace pan;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

Vec random_vec(std::size_t p, RandomStream& rng) {
  Vec v(p);
  for (double& x : v) x = rng.normal();
  return v;
}

double rel_err(const Vec& a, const Vec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}
}  // namespace

TEST_CASE("to_hyperspherical on axis vectors") {
  auto c = to_hyperspherical({1.0, 0.0});
  CHECK(c.r == doctest::Approx(1.0));
  CHECK(c.angles[0] == doctest::Approx(0.0));

  c = to_hyperspherical({0.0, 1.0});
  CHECK(c.r == doctest::Approx(1.0));
  CHECK(c.angles[0] == doctest::Approx(kPi / 2));
}

TEST_CASE("from_hyperspherical hand cases") {
  Vec v = from_hyperspherical({1.0, {kPi / 2}});
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(1.0));

  v = from_hyperspherical({2.0, {0.0, 0.0}});
  CHECK(v[0] == doctest::Approx(2.0));
  CHECK(v[1] == doctest::Approx(0.0));
  CHECK(v[2] == doctest::Approx(0.0));

  v = from_hyperspherical({1.0, {kPi / 2, kPi / 4}});
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(v[2] == doctest::Approx(std::sqrt(2.0) / 2));
}

TEST_CASE("round trip for a seeded 6-vector") {
  RandomStream rng(42, 0);
  const Vec v = random_vec(6, rng);
  CHECK(rel_err(from_hyperspherical(to_hyperspherical(v)), v) < 1e-10);
}

TEST_CASE("round trip property over dimensions 1..20") {
  RandomStream rng(7, 1);
  for (int rep = 0; rep < 400; ++rep) {
    const std::size_t p = 1 + static_cast<std::size_t>(rng.next_u64() % 20);
    Vec v = random_vec(p, rng);
    if (norm(v) == 0.0) continue;
    const HypersphericalCoords c = to_hyperspherical(v);
    CHECK(rel_err(from_hyperspherical(c), v) < 1e-10);
    // range invariants
    for (std::size_t k = 0; k + 1 < c.angles.size(); ++k) {
      CHECK(c.angles[k] >= 0.0);
      CHECK(c.angles[k] <= kPi);
    }
    if (!c.angles.empty()) {
      CHECK(c.angles.back() > -kPi);
      CHECK(c.angles.back() <= kPi);
    }
  }
}

TEST_CASE("norm preservation") {
  RandomStream rng(9, 2);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng.next_u64() % 15);
    HypersphericalCoords c;
    c.r = std::abs(rng.normal()) * 3.0;
    c.angles = random_vec(p - 1, rng);
    const double n = norm(from_hyperspherical(c));
    CHECK(n == doctest::Approx(std::abs(c.r)).epsilon(1e-12));
  }
}

TEST_CASE("zero vector maps to zero coordinates") {
  const auto c = to_hyperspherical({0.0, 0.0, 0.0});
  CHECK(c.r == 0.0);
  for (double a : c.angles) CHECK(a == 0.0);
}

TEST_CASE("cosine similarity basics") {
  CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0));
  CHECK(cosine_similarity({1.0, 1.0}, {2.0, 2.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_similarity({0.0, 0.0}, {1.0, 0.0}), DegenerateInputError);
}

TEST_CASE("cosine similarity scale invariance") {
  RandomStream rng(11, 3);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t p = 2 + static_cast<std::size_t>(rng.next_u64() % 10);
    const Vec a = random_vec(p, rng), b = random_vec(p, rng);
    if (norm(a) == 0.0 || norm(b) == 0.0) continue;
    const double c = std::abs(rng.normal()) + 0.1;
    const double d = std::abs(rng.normal()) + 0.1;
    CHECK(cosine_similarity(a, b) ==
          doctest::Approx(cosine_similarity(scaled(a, c), scaled(b, d))).epsilon(1e-12));
  }
}

TEST_CASE("centering") {
  Dataset d;
  d.x = Matrix(2, 1);
  d.x(0, 0) = 1.0;
  d.x(1, 0) = 3.0;
  d.y = {4.0, 6.0};
  const Dataset c = center(d);
  CHECK(c.x(0, 0) == doctest::Approx(-1.0));
  CHECK(c.x(1, 0) == doctest::Approx(1.0));

  Dataset dy;
  dy.x = Matrix(3, 1);
  dy.y = {5.0, 5.0, 5.0};
  const Dataset cy = center(dy);
  CHECK(cy.y_mean == doctest::Approx(5.0));
  for (double v : cy.y) CHECK(v == doctest::Approx(0.0));

  Dataset tiny;
  tiny.x = Matrix(1, 1);
  tiny.y = {1.0};
  CHECK_THROWS_AS(center(tiny), InsufficientDataError);
}

TEST_CASE("prostate column means vanish after centering") {
  Dataset d = ingest_csv(std::string(PAN_DATA_DIR) + "/prostate.csv", "lpsa");
  REQUIRE(d.n() == 97);
  REQUIRE(d.p() == 6);
  const Dataset c = center(d);
  for (std::size_t j = 0; j < c.p(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.n(); ++i) s += c.x(i, j);
    CHECK(std::abs(s) < 1e-9 * static_cast<double>(c.n()));
  }
}

TEST_CASE("orthonormalize gives X'X = I within 1e-9") {
  RandomStream rng(1, 4);
  Matrix z(50, 6);
  for (double& v : z.data) v = rng.normal();
  const Matrix q = orthonormalize(z);
  CHECK(max_abs_diff(gram(q), Matrix::identity(6)) < 1e-9);

  const Matrix qn = orthonormalize(z, OrthoScale::sqrt_n);
  Matrix fifty = Matrix::identity(6);
  for (std::size_t i = 0; i < 6; ++i) fifty(i, i) = 50.0;
  CHECK(max_abs_diff(gram(qn), fifty) < 1e-9);
}

TEST_CASE("orthonormalize leaves an orthonormal matrix unchanged") {
  RandomStream rng(2, 5);
  Matrix z(30, 4);
  for (double& v : z.data) v = rng.normal();
  const Matrix q = orthonormalize(z);
  const Matrix q2 = orthonormalize(q);
  CHECK(max_abs_diff(q, q2) < 1e-9);
}

TEST_CASE("orthonormalize rejects rank-deficient input") {
  Matrix z(10, 2);
  for (std::size_t i = 0; i < 10; ++i) {
    z(i, 0) = static_cast<double>(i);
    z(i, 1) = 2.0 * static_cast<double>(i);
  }
  CHECK_THROWS_AS(orthonormalize(z), RankError);
}
