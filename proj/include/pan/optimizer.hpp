#ifndef PAN_OPTIMIZER_HPP
#define PAN_OPTIMIZER_HPP

#include <cstdint>
#include <vector>

#include "pan/dataset.hpp"
#include "pan/estimators.hpp"
#include "pan/hypersphere.hpp"

namespace pan {

struct OptimizerConfig {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-10;
  enum class Parametrization { cartesian, hyperspherical };
  Parametrization parametrization = Parametrization::cartesian;
  enum class Initializer { ols, ridge };
  Initializer initializer = Initializer::ols;
  int extra_starts = 4;  // perturbed restarts, lowest objective wins
  std::uint64_t seed = 0x5eed5eed5eedull;
};

// Penalized objective of the personalized estimator for a general design:
// sum (y_i - x_i'b)^2 + l1 b'b + (l2/x0'x0) (x0'b)^2 / b'b.
double objective(const Vec& beta, const Dataset& data, const Vec& x0, double lambda1,
                 double lambda2);

// Analytic gradient of the objective (ridge term included).
Vec gradient(const Vec& beta, const Dataset& data, const Vec& x0, double lambda1,
             double lambda2);

// Rows stored as (r_i, angles_i); inner products are evaluated through the
// angle cascade rather than Cartesian coordinates.
struct HypersphericalData {
  std::vector<HypersphericalCoords> rows;
  Vec y;
};
HypersphericalData to_hyperspherical_data(const Dataset& data);

double objective_hyperspherical(const HypersphericalCoords& coords,
                                const HypersphericalData& data,
                                const HypersphericalCoords& x0, double lambda2);

// Numerical minimizer for general (non-orthonormal) designs. Guarantees a
// non-increasing objective sequence; the returned point satisfies
// ||grad|| < tol (1 + |objective|). Throws ConvergenceError (carrying the
// best iterate) when the iteration budget is exhausted.
PanFit fit_general(const Dataset& data, const Vec& x0, double lambda1, double lambda2,
                   const OptimizerConfig& config = {});

// Reusable handle for many fits against one fixed design (bootstrap
// replicates swap the outcome, personalized fits swap x0). Caches X'X and the
// QR factorization.
class PanSolver {
 public:
  explicit PanSolver(Matrix x, OptimizerConfig config = {});

  void set_outcome(const Vec& y);
  const Vec& beta_ols() const { return beta_ols_; }

  // Coefficients minimizing the penalized objective for the current outcome.
  Vec solve(const Vec& x0, double lambda1, double lambda2) const;

 private:
  Matrix x_;
  Matrix xtx_;
  QrDecomposition qr_;
  Vec xty_;
  double yty_ = 0.0;
  Vec beta_ols_;
  OptimizerConfig cfg_;
};

}  // namespace pan

#endif
