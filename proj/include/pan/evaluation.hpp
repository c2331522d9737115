#ifndef PAN_EVALUATION_HPP
#define PAN_EVALUATION_HPP

#include <string>
#include <vector>

#include "pan/dataset.hpp"
#include "pan/estimators.hpp"
#include "pan/optimizer.hpp"

namespace pan {

struct ObservationRow {
  std::size_t index = 0;  // 1-based row number in the dataset
  double cos_sim = 0.0;
  double ols_prediction = 0.0;
  double pan_prediction = 0.0;
  Vec coefficients;  // personalized coefficients for this observation
};

struct EvaluationReport {
  Method method = Method::ols;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::string metric_name;  // "loocv_error" or "test_mse_vs_truth"
  double value = 0.0;
  std::vector<ObservationRow> per_observation;
};

struct EvaluationOptions {
  // When set, every fold is re-centered with its own training means and x0 is
  // centered the same way. Off by default: the published errors correspond to
  // one global centering.
  bool fold_recenter = false;
  OptimizerConfig optimizer;
};

// Mean of (x_i' bhat_i - x_i' beta)^2 over the test rows; beta_hats holds the
// per-target personalized coefficient vectors (a single shared fit may be
// passed by repeating it).
double test_mse(const std::vector<Vec>& beta_hats, const std::vector<Vec>& x_test,
                const Vec& beta_true);

// Leave-one-out cross-validation with tuning parameters held fixed across
// folds. Personalized methods refit for each held-out row.
EvaluationReport loocv(const Dataset& data, Method method, double lambda1, double lambda2,
                       const EvaluationOptions& options = {});

// The k most and k least aligned observations (by |cos| between the centered
// row and the OLS estimate), with OLS/PAN predictions and the personalized
// coefficients at the given lambda2.
EvaluationReport per_observation_report(const Dataset& data, double lambda2, int k_extremes,
                                        const EvaluationOptions& options = {});

}  // namespace pan

#endif
