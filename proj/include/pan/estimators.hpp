#ifndef PAN_ESTIMATORS_HPP
#define PAN_ESTIMATORS_HPP

#include <string>

#include "pan/dataset.hpp"
#include "pan/hypersphere.hpp"
#include "pan/linalg.hpp"

namespace pan {

enum class Method { ols, ridge, pan, pan_ridge };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

// Regression coefficients with an on-demand hyperspherical view.
struct CoefficientVector {
  Vec beta;

  HypersphericalCoords hyperspherical() const { return to_hyperspherical(beta); }
  std::size_t dim() const { return beta.size(); }
};

// A personalized fit for one prediction target x0.
struct PanFit {
  CoefficientVector beta_hat;
  Vec x0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double c_value = 1.0;          // eigen-structure constant C(l1,l2), c(l2) when l1=0
  double shrinkage_factor = 1.0; // multiplier on the reference prediction
  double cos_sim = 0.0;          // CosSim(x0, reference estimate)
  double reference_prediction = 0.0;  // x0' beta_tilde (OLS route)
  Method method = Method::pan;
};

CoefficientVector ols_fit(const Dataset& data);
CoefficientVector ridge_fit(const Dataset& data, double lambda1);

// Closed forms assume the caller guarantees an orthonormal design, X'X = I_p.
PanFit pan_fit_orthonormal(const CoefficientVector& beta_ols, const Vec& x0, double lambda2);
PanFit pan_ridge_fit_orthonormal(const CoefficientVector& beta_ols, const Vec& x0,
                                 double lambda1, double lambda2);

// x0' beta_hat.
double pan_predict(const PanFit& fit);

// The bracketed multiplier of the personalized prediction, including the
// 1/(1+lambda1) prefactor. Even in cos_sim.
double shrinkage_factor(double cos_sim, double beta_norm, double lambda1, double lambda2);

// Same multiplier in the (s = ||b||^2, q = (x0'b)^2/||x0||^2) parametrization;
// shared by the tuning and simulation kernels.
double prediction_factor_sq(double s, double q, double lambda1, double lambda2);

// Two-dimensional solution through the double-angle tangent relation;
// independent of the rank-2 route and used as its oracle.
PanFit pan_fit_2d(const CoefficientVector& beta_ols, const Vec& x0, double lambda2);

}  // namespace pan

#endif
