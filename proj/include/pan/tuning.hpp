#ifndef PAN_TUNING_HPP
#define PAN_TUNING_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pan/dataset.hpp"
#include "pan/optimizer.hpp"

namespace pan {

struct TuningGrid {
  Vec lambda1_values = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  Vec lambda2_values = {-8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0,
                        2.0,  2.5,  3.0,  4.0,  6.0,  8.0, 12.0};
  int bootstrap_samples = 2000;
  std::uint64_t seed = 1;
};

enum class TuneMethod { ridge_only, pan_only, pan_ridge, pan_given_lambda1 };

struct SigmaEstimate {
  double sigma;
  double sigma2;
};

// sigma2 = RSS/(n-p) from the OLS fit; requires n > p.
SigmaEstimate estimate_sigma(const Dataset& data);

struct TuningResult {
  Vec lambda1_axis;
  Vec lambda2_axis;
  Matrix mse_surface;      // lambda1_axis.size() x lambda2_axis.size()
  double lambda1 = 0.0;    // selected
  double lambda2 = 0.0;
  double sigma_hat = 0.0;
  long long fit_failures = 0;
  int bootstrap_samples = 0;
  std::uint64_t seed = 0;
};

// Parametric-bootstrap selection: B outcome vectors Y_r = X b + eps are drawn
// around the plug-in estimate, each grid point is scored by the average of
// (x_i' bhat_r - x_i' b)^2 over rows and replicates, and the minimizer is
// selected (ties: smallest |lambda2|, then smallest lambda1). Bit-reproducible
// for fixed seed and grid regardless of the worker count.
TuningResult bootstrap_tune(const Dataset& data, const TuningGrid& grid, TuneMethod method,
                            double lambda1_fixed = 0.0, int threads = 0);

// Same procedure with the true (beta, sigma) in place of the plug-ins;
// lambda1 stays fixed and lambda2 is searched.
TuningResult oracle_tune(const std::vector<Vec>& x_rows, const Vec& beta_true,
                         double sigma_true, const TuningGrid& grid, double lambda1_fixed,
                         std::pair<std::size_t, std::size_t> data_shape, int threads = 0);

}  // namespace pan

#endif
