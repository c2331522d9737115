#include "pan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pan/errors.hpp"

namespace pan {

namespace {

// Fit one personalized estimate on (x, y) for target x0, routing through the
// closed form when the design allows it.
Vec fit_for_target(const Dataset& d, const Vec& x0, Method method, double l1, double l2,
                   const OptimizerConfig& cfg) {
  switch (method) {
    case Method::ols:
      return ols_fit(d).beta;
    case Method::ridge:
      return ridge_fit(d, l1).beta;
    case Method::pan:
    case Method::pan_ridge:
      if (is_orthonormal(d.x))
        return pan_ridge_fit_orthonormal(ols_fit(d), x0, l1, l2).beta_hat.beta;
      return fit_general(d, x0, l1, l2, cfg).beta_hat.beta;
  }
  throw DomainError("unknown method");
}

}  // namespace

double test_mse(const std::vector<Vec>& beta_hats, const std::vector<Vec>& x_test,
                const Vec& beta_true) {
  if (beta_hats.size() != x_test.size())
    throw DomainError("one coefficient vector per test row required");
  if (x_test.empty()) throw DomainError("empty test set");
  double acc = 0.0;
  for (std::size_t i = 0; i < x_test.size(); ++i) {
    if (x_test[i].size() != beta_true.size() || beta_hats[i].size() != beta_true.size())
      throw DomainError("dimension mismatch in test_mse");
    const double e = dot(x_test[i], beta_hats[i]) - dot(x_test[i], beta_true);
    acc += e * e;
  }
  return acc / static_cast<double>(x_test.size());
}

EvaluationReport loocv(const Dataset& data, Method method, double lambda1, double lambda2,
                       const EvaluationOptions& options) {
  const std::size_t n = data.n(), p = data.p();
  if (n < 3) throw InsufficientDataError("leave-one-out needs n >= 3");

  double acc = 0.0;
  Dataset fold;
  fold.x = Matrix(n - 1, p);
  fold.y.resize(n - 1);
  for (std::size_t hold = 0; hold < n; ++hold) {
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == hold) continue;
      for (std::size_t j = 0; j < p; ++j) fold.x(r, j) = data.x(i, j);
      fold.y[r] = data.y[i];
      ++r;
    }
    Vec x0 = data.x.row(hold);
    double intercept = 0.0;
    Dataset train = fold;
    if (options.fold_recenter) {
      train = center(fold);
      for (std::size_t j = 0; j < p; ++j) x0[j] -= train.column_means[j];
      intercept = train.y_mean;
    }
    const Vec beta = fit_for_target(train, x0, method, lambda1, lambda2, options.optimizer);
    const double e = data.y[hold] - (intercept + dot(x0, beta));
    acc += e * e;
  }

  EvaluationReport rep;
  rep.method = method;
  rep.lambda1 = lambda1;
  rep.lambda2 = lambda2;
  rep.metric_name = "loocv_error";
  rep.value = acc / static_cast<double>(n);
  return rep;
}

EvaluationReport per_observation_report(const Dataset& data, double lambda2, int k_extremes,
                                        const EvaluationOptions& options) {
  const std::size_t n = data.n();
  if (k_extremes < 1) throw DomainError("k_extremes must be positive");
  const std::size_t k = static_cast<std::size_t>(k_extremes);
  if (n < 2 * k) throw InsufficientDataError("per-observation report needs n >= 2k");

  const Vec beta_tilde = ols_fit(data).beta;
  Vec cs(n);
  for (std::size_t i = 0; i < n; ++i) cs[i] = cosine_similarity(data.x.row(i), beta_tilde);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(cs[a]) < std::abs(cs[b]);
  });

  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < k; ++i) picks.push_back(order[i]);            // least aligned
  for (std::size_t i = 0; i < k; ++i) picks.push_back(order[n - k + i]);    // most aligned

  EvaluationReport rep;
  rep.method = Method::pan;
  rep.lambda2 = lambda2;
  rep.metric_name = "per_observation";
  const bool ortho = is_orthonormal(data.x);
  const CoefficientVector ols{beta_tilde};
  for (std::size_t idx : picks) {
    ObservationRow row;
    row.index = idx + 1;
    row.cos_sim = cs[idx];
    const Vec xi = data.x.row(idx);
    row.ols_prediction = dot(xi, beta_tilde);
    row.coefficients = ortho ? pan_fit_orthonormal(ols, xi, lambda2).beta_hat.beta
                             : fit_general(data, xi, 0.0, lambda2, options.optimizer)
                                   .beta_hat.beta;
    row.pan_prediction = dot(xi, row.coefficients);
    rep.per_observation.push_back(std::move(row));
  }
  rep.value = 0.0;
  return rep;
}

}  // namespace pan
