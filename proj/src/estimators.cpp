#include "pan/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "pan/errors.hpp"

namespace pan {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::ols: return "ols";
    case Method::ridge: return "ridge";
    case Method::pan: return "pan";
    case Method::pan_ridge: return "pan_ridge";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "ols") return Method::ols;
  if (name == "ridge") return Method::ridge;
  if (name == "pan") return Method::pan;
  if (name == "pan_ridge" || name == "pan-ridge") return Method::pan_ridge;
  throw UsageError("unknown method '" + name + "'");
}

CoefficientVector ols_fit(const Dataset& data) {
  return CoefficientVector{lstsq(data.x, data.y)};
}

CoefficientVector ridge_fit(const Dataset& data, double lambda1) {
  if (lambda1 < 0.0)
    throw DomainError("ridge parameter must be nonnegative (negative values belong to lambda2)");
  Matrix g = gram(data.x);
  for (std::size_t j = 0; j < g.rows; ++j) g(j, j) += lambda1;
  return CoefficientVector{solve_spd(std::move(g), tmatvec(data.x, data.y))};
}

PanFit pan_ridge_fit_orthonormal(const CoefficientVector& beta_ols, const Vec& x0,
                                 double lambda1, double lambda2) {
  if (lambda1 < 0.0) throw DomainError("lambda1 must be nonnegative");
  const Vec& bt = beta_ols.beta;
  if (bt.size() != x0.size()) throw DomainError("dimension mismatch between estimate and x0");
  const double s = norm2(bt);
  const double h2 = norm2(x0);
  if (s == 0.0) throw DegenerateInputError("zero OLS estimate: PAN penalty undefined");
  if (h2 == 0.0) throw DegenerateInputError("zero covariate vector x0");

  const double big = (1.0 + lambda1) * lambda2;  // effective angle parameter
  const double proj = dot(x0, bt);
  const double q = proj * proj / h2;
  const double disc = std::max((s + big) * (s + big) - 4.0 * big * q, 0.0);
  const double sq = std::sqrt(disc);
  const double c = sq > 0.0 ? std::clamp((s * (s + big) - 2.0 * big * q) / (s * sq), -1.0, 1.0)
                            : 0.0;

  PanFit fit;
  fit.x0 = x0;
  fit.lambda1 = lambda1;
  fit.lambda2 = lambda2;
  fit.c_value = c;
  fit.cos_sim = proj / std::sqrt(s * h2);
  fit.reference_prediction = proj;
  fit.shrinkage_factor = (sq > 0.0 ? 0.5 + 0.5 * (s - big) / sq : 0.5) / (1.0 + lambda1);
  fit.method = lambda1 == 0.0 ? Method::pan : Method::pan_ridge;

  const double cross = s * h2 - proj * proj;
  Vec beta;
  if (cross < 1e-12 * s * h2) {
    // x0 parallel to the estimate: the u2 term vanishes in the limit
    beta = scaled(bt, 0.5 * (1.0 + c) / (1.0 + lambda1));
  } else {
    // top eigenvector of the rank-2 matrix expanded in the {u1, u2} basis
    const double e1 = std::sqrt(0.5 + 0.5 * c);
    double e2 = std::sqrt(std::max(0.5 - 0.5 * c, 0.0));
    if (big * proj < 0.0) e2 = -e2;  // off-diagonal sign flips the second component
    Vec gamma = scaled(bt, e1 / std::sqrt(s));
    const double u2scale = 1.0 / (std::sqrt(s) * std::sqrt(cross));
    axpy(-e2 * s * u2scale, x0, gamma);
    axpy(e2 * proj * u2scale, bt, gamma);
    const double len = dot(bt, gamma) / (1.0 + lambda1);
    beta = scaled(gamma, len);
  }
  fit.beta_hat = CoefficientVector{std::move(beta)};
  return fit;
}

PanFit pan_fit_orthonormal(const CoefficientVector& beta_ols, const Vec& x0, double lambda2) {
  return pan_ridge_fit_orthonormal(beta_ols, x0, 0.0, lambda2);
}

double pan_predict(const PanFit& fit) { return dot(fit.x0, fit.beta_hat.beta); }

double prediction_factor_sq(double s, double q, double lambda1, double lambda2) {
  const double big = (1.0 + lambda1) * lambda2;
  const double disc = std::max((s + big) * (s + big) - 4.0 * big * q, 0.0);
  const double sq = std::sqrt(disc);
  return (sq > 0.0 ? 0.5 + 0.5 * (s - big) / sq : 0.5) / (1.0 + lambda1);
}

double shrinkage_factor(double cos_sim, double beta_norm, double lambda1, double lambda2) {
  if (std::abs(cos_sim) > 1.0) throw DomainError("cosine similarity outside [-1, 1]");
  if (beta_norm <= 0.0) throw DegenerateInputError("beta norm must be positive");
  if (lambda1 < 0.0) throw DomainError("lambda1 must be nonnegative");
  const double s = beta_norm * beta_norm;
  return prediction_factor_sq(s, s * cos_sim * cos_sim, lambda1, lambda2);
}

PanFit pan_fit_2d(const CoefficientVector& beta_ols, const Vec& x0, double lambda2) {
  if (beta_ols.dim() != 2 || x0.size() != 2) throw DomainError("pan_fit_2d needs p = 2");
  const Vec& bt = beta_ols.beta;
  const double rt = norm(bt);
  const double h = norm(x0);
  if (rt == 0.0) throw DegenerateInputError("zero OLS estimate");
  if (h == 0.0) throw DegenerateInputError("zero covariate vector x0");
  const double at = std::atan2(bt[1], bt[0]);
  const double a0 = std::atan2(x0[1], x0[0]);

  // tan 2a = (rt^2 sin 2at - l sin 2a0) / (rt^2 cos 2at - l cos 2a0); the
  // stationary lines are a and a + pi/2, the penalized RSS picks the minimum.
  const double num = rt * rt * std::sin(2.0 * at) - lambda2 * std::sin(2.0 * a0);
  const double den = rt * rt * std::cos(2.0 * at) - lambda2 * std::cos(2.0 * a0);
  const double base = 0.5 * std::atan2(num, den);

  double best_g = 0.0, best_a = at, best_r = rt;
  bool first = true;
  for (int k = 0; k < 2; ++k) {
    const double a = base + 0.5 * kPi * k;
    const double r = rt * std::cos(at - a);
    const double co = std::cos(a - a0);
    const double g = r * r - 2.0 * r * rt * std::cos(at - a) + lambda2 * co * co;
    if (first || g < best_g) {
      best_g = g;
      best_a = a;
      best_r = r;
      first = false;
    }
  }
  if (best_r < 0.0) {  // canonical orientation
    best_r = -best_r;
    best_a += best_a > 0.0 ? -kPi : kPi;
  }

  PanFit fit;
  fit.beta_hat = CoefficientVector{Vec{best_r * std::cos(best_a), best_r * std::sin(best_a)}};
  fit.x0 = x0;
  fit.lambda2 = lambda2;
  fit.cos_sim = dot(x0, bt) / (h * rt);
  fit.reference_prediction = dot(x0, bt);
  fit.c_value = 2.0 * (best_r / rt) * (best_r / rt) - 1.0;  // from r = sqrt((1+c)/2) rt
  fit.shrinkage_factor =
      fit.reference_prediction != 0.0 ? pan_predict(fit) / fit.reference_prediction : 1.0;
  fit.method = Method::pan;
  return fit;
}

}  // namespace pan
