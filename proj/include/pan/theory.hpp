#ifndef PAN_THEORY_HPP
#define PAN_THEORY_HPP

#include <cstdint>
#include <vector>

#include "pan/linalg.hpp"

namespace pan {

struct TheoryInstance {
  Vec x0;
  Vec beta_true;
  double sigma = 1.0;
  long n = 100;
  double lambda1 = 0.0;
};

// d MSE / d lambda2 at lambda2 = 0 under the scaled orthogonal design
// X'X = n I_p (leading term, the O(n^-3) remainder dropped).
double mse_derivative_at_zero(const TheoryInstance& inst);

// Ridge level at which the beneficial sign of lambda2 flips; negative when
// |cos| > 1/2 (meaning every lambda1 >= 0 already exceeds it).
double lambda1_star(const Vec& x0, const Vec& beta, double sigma);

// sigma^2 ||x0||^2 / (x0'beta)^2, the prediction-risk-optimal ridge level
// for the single target x0.
double oracle_fridge_lambda(const Vec& x0, const Vec& beta, double sigma);

// Density of the normalized inner product x0'beta/(||x0|| ||beta||) for
// standard normal x0 in dimension p.
double inner_product_density(double z, int p);

// Integral of the density over (-t, t).
double proportion_within(double t, int p);

struct McMsePoint {
  double lambda2 = 0.0;
  double mse = 0.0;
  double std_error = 0.0;       // Monte-Carlo standard error of mse
  double diff_vs_first = 0.0;   // mse - mse(first grid entry), paired
  double diff_std_error = 0.0;  // standard error of the paired difference
};

// Empirical MSE of the personalized prediction across replicated noise draws
// on one fixed scaled-orthogonal design. Deterministic per seed and worker
// count.
std::vector<McMsePoint> mc_mse_curve(const TheoryInstance& inst, const Vec& lambda2_values,
                                     long long replications, std::uint64_t seed,
                                     int threads = 0);

}  // namespace pan

#endif
