#include "pan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "pan/errors.hpp"
#include "pan/rng.hpp"

namespace pan {

namespace {

struct QuadraticForm {
  Matrix g;      // X'X
  Vec xty;       // X'y
  double yty;
};

QuadraticForm precompute(const Dataset& data) {
  return {gram(data.x), tmatvec(data.x, data.y), dot(data.y, data.y)};
}

double objective_precomp(const Vec& beta, const QuadraticForm& qf, const Vec& x0, double h2,
                         double lambda1, double lambda2) {
  const double bb = norm2(beta);
  if (bb == 0.0) throw DomainError("objective undefined at the origin");
  const Vec gb = matvec(qf.g, beta);
  const double xb = dot(x0, beta);
  return qf.yty - 2.0 * dot(qf.xty, beta) + dot(beta, gb) + lambda1 * bb +
         (lambda2 / h2) * xb * xb / bb;
}

Vec gradient_precomp(const Vec& beta, const QuadraticForm& qf, const Vec& x0, double h2,
                     double lambda1, double lambda2) {
  const double bb = norm2(beta);
  if (bb == 0.0) throw DomainError("gradient undefined at the origin");
  const double xb = dot(x0, beta);
  const double lp = lambda2 / h2;
  Vec g = matvec(qf.g, beta);
  for (std::size_t j = 0; j < g.size(); ++j) {
    g[j] = -2.0 * qf.xty[j] + 2.0 * g[j] + 2.0 * lambda1 * beta[j] +
           2.0 * lp * xb * x0[j] / bb - 2.0 * lp * xb * xb * beta[j] / (bb * bb);
  }
  return g;
}

// Compact L-BFGS with Armijo backtracking. Problem supplies value/grad and an
// optional point-admissibility test (used to keep iterates away from b = 0).
template <class Problem>
struct MinimizeResult {
  Vec x;
  double value;
  double grad_norm;
  bool converged;
};

template <class Problem>
MinimizeResult<Problem> minimize(const Problem& prob, Vec x, int max_iter, double tol) {
  const std::size_t dim = x.size();
  double f = prob.value(x);
  Vec g = prob.grad(x);

  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  const std::size_t memory = 8;

  for (int iter = 0; iter < max_iter; ++iter) {
    const double gn = norm(g);
    if (gn <= tol * (1.0 + std::abs(f))) return {x, f, gn, true};

    // two-loop recursion
    Vec d = g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], d);
      axpy(-alpha[k], y_hist[k], d);
    }
    if (!s_hist.empty()) {
      const Vec& sl = s_hist.back();
      const Vec& yl = y_hist.back();
      const double scale = dot(sl, yl) / dot(yl, yl);
      for (double& v : d) v *= scale;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta_k = rho_hist[k] * dot(y_hist[k], d);
      axpy(alpha[k] - beta_k, s_hist[k], d);
    }
    for (double& v : d) v = -v;

    double slope = dot(g, d);
    if (!(slope < 0.0)) {  // not a descent direction: steepest-descent restart
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = scaled(g, -1.0);
      slope = -gn * gn;
    }

    double step = 1.0;
    Vec xn(dim);
    double fn = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x;
      axpy(step, d, xn);
      if (prob.admissible(xn)) {
        fn = prob.value(xn);
        if (fn <= f + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // numerically stuck; report whatever stationarity we reached
      return {x, f, gn, gn <= 1e3 * tol * (1.0 + std::abs(f))};
    }

    Vec gn_vec = prob.grad(xn);
    Vec s_vec(dim), y_vec(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      s_vec[j] = xn[j] - x[j];
      y_vec[j] = gn_vec[j] - g[j];
    }
    const double sy = dot(s_vec, y_vec);
    if (sy > 1e-12 * norm(s_vec) * norm(y_vec)) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = std::move(xn);
    f = fn;
    g = std::move(gn_vec);
  }
  return {x, f, norm(g), false};
}

struct CartesianProblem {
  const QuadraticForm& qf;
  const Vec& x0;
  double h2, lambda1, lambda2, floor2;

  double value(const Vec& b) const { return objective_precomp(b, qf, x0, h2, lambda1, lambda2); }
  Vec grad(const Vec& b) const { return gradient_precomp(b, qf, x0, h2, lambda1, lambda2); }
  bool admissible(const Vec& b) const { return norm2(b) > floor2; }
};

// theta = (r, a_1..a_{p-1}); beta = r * gamma(a); gradient by chain rule.
struct HypersphericalProblem {
  const QuadraticForm& qf;
  const Vec& x0;
  double h2, lambda1, lambda2, floor2;

  static Vec direction(const Vec& theta) {
    const std::size_t p = theta.size();
    Vec gamma(p, 0.0);
    double sinprod = 1.0;
    for (std::size_t k = 0; k + 1 < p; ++k) {
      gamma[k] = sinprod * std::cos(theta[k + 1]);
      sinprod *= std::sin(theta[k + 1]);
    }
    gamma[p - 1] = sinprod;
    return gamma;
  }

  static Vec to_beta(const Vec& theta) {
    Vec beta = direction(theta);
    for (double& v : beta) v *= theta[0];
    return beta;
  }

  double value(const Vec& theta) const {
    return objective_precomp(to_beta(theta), qf, x0, h2, lambda1, lambda2);
  }

  Vec grad(const Vec& theta) const {
    const std::size_t p = theta.size();
    const Vec gamma = direction(theta);
    Vec beta = gamma;
    for (double& v : beta) v *= theta[0];
    const Vec gb = gradient_precomp(beta, qf, x0, h2, lambda1, lambda2);

    Vec out(p, 0.0);
    out[0] = dot(gamma, gb);
    // d beta_j / d a_m: replace sin a_m by cos a_m (j > m), or the trailing
    // cos a_j by -sin a_j (j == m); zero for j < m.
    for (std::size_t m = 0; m + 1 < p; ++m) {
      double acc = 0.0;
      double prod = 1.0;  // prod of sin a_k, k < m, then cos a_m, then sins
      for (std::size_t k = 0; k < m; ++k) prod *= std::sin(theta[k + 1]);
      const double head = prod;
      // j == m term
      acc += gb[m] * (-head * std::sin(theta[m + 1]));
      prod = head * std::cos(theta[m + 1]);
      for (std::size_t j = m + 1; j + 1 < p; ++j) {
        acc += gb[j] * prod * std::cos(theta[j + 1]);
        prod *= std::sin(theta[j + 1]);
      }
      acc += gb[p - 1] * prod;
      out[m + 1] = theta[0] * acc;
    }
    return out;
  }

  bool admissible(const Vec& theta) const { return theta[0] * theta[0] > floor2; }
};

}  // namespace

double objective(const Vec& beta, const Dataset& data, const Vec& x0, double lambda1,
                 double lambda2) {
  const double h2 = norm2(x0);
  if (h2 == 0.0) throw DegenerateInputError("zero covariate vector x0");
  Vec r = matvec(data.x, beta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = data.y[i] - r[i];
  const double bb = norm2(beta);
  if (bb == 0.0) throw DomainError("objective undefined at the origin");
  const double xb = dot(x0, beta);
  return norm2(r) + lambda1 * bb + (lambda2 / h2) * xb * xb / bb;
}

Vec gradient(const Vec& beta, const Dataset& data, const Vec& x0, double lambda1,
             double lambda2) {
  const double h2 = norm2(x0);
  if (h2 == 0.0) throw DegenerateInputError("zero covariate vector x0");
  QuadraticForm qf = precompute(data);
  return gradient_precomp(beta, qf, x0, h2, lambda1, lambda2);
}

HypersphericalData to_hyperspherical_data(const Dataset& data) {
  HypersphericalData hd;
  hd.rows.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) hd.rows.push_back(to_hyperspherical(data.x.row(i)));
  hd.y = data.y;
  return hd;
}

double objective_hyperspherical(const HypersphericalCoords& coords,
                                const HypersphericalData& data,
                                const HypersphericalCoords& x0, double lambda2) {
  if (coords.r == 0.0) throw DomainError("objective undefined at r = 0");
  const Vec gb = from_hyperspherical({1.0, coords.angles});
  double rss = 0.0;
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const Vec gi = from_hyperspherical({1.0, data.rows[i].angles});
    const double fit = coords.r * data.rows[i].r * dot(gb, gi);
    const double e = data.y[i] - fit;
    rss += e * e;
  }
  const Vec g0 = from_hyperspherical({1.0, x0.angles});
  const double u = dot(gb, g0);
  return rss + lambda2 * u * u;
}

PanFit fit_general(const Dataset& data, const Vec& x0, double lambda1, double lambda2,
                   const OptimizerConfig& config) {
  if (lambda1 < 0.0) throw DomainError("lambda1 must be nonnegative");
  const double h2 = norm2(x0);
  if (h2 == 0.0) throw DegenerateInputError("zero covariate vector x0");

  const QuadraticForm qf = precompute(data);
  CoefficientVector ref = ols_fit(data);

  Vec init;
  if (config.initializer == OptimizerConfig::Initializer::ridge ||
      condition_estimate(data.x) > 1e8) {
    init = ridge_fit(data, lambda1 > 0.0 ? lambda1 : 1.0).beta;
  } else {
    init = ref.beta;
  }
  const double init_norm = norm(init);
  if (init_norm == 0.0)
    throw DegenerateInputError("zero initializer: PAN penalty undefined at the origin");
  const double floor2 = std::pow(1e-10 * init_norm, 2);

  const bool cart = config.parametrization == OptimizerConfig::Parametrization::cartesian;
  RandomStream perturb(config.seed, 0);

  Vec best;
  double best_f = 0.0;
  double best_gn = 0.0;
  bool best_ok = false;
  bool have = false;
  const double f_init = objective_precomp(init, qf, x0, h2, lambda1, lambda2);

  for (int start = 0; start <= std::max(0, config.extra_starts); ++start) {
    Vec b0 = init;
    if (start > 0) {
      for (double& v : b0) v *= 1.0 + 0.3 * perturb.normal();
      const double shift = 0.1 * init_norm / std::sqrt(static_cast<double>(b0.size()));
      for (double& v : b0) v += shift * perturb.normal();
      if (norm2(b0) <= floor2) b0 = init;
    }

    Vec sol;
    double f, gn;
    bool ok;
    if (cart) {
      CartesianProblem prob{qf, x0, h2, lambda1, lambda2, floor2};
      auto res = minimize(prob, b0, config.max_iterations, config.gradient_tolerance);
      sol = res.x;
      f = res.value;
      gn = res.grad_norm;
      ok = res.converged;
    } else {
      HypersphericalCoords c0 = to_hyperspherical(b0);
      Vec theta(b0.size());
      theta[0] = c0.r;
      for (std::size_t k = 0; k + 1 < theta.size(); ++k) theta[k + 1] = c0.angles[k];
      HypersphericalProblem prob{qf, x0, h2, lambda1, lambda2, floor2};
      auto res = minimize(prob, theta, config.max_iterations, config.gradient_tolerance);
      sol = HypersphericalProblem::to_beta(res.x);
      f = res.value;
      gn = res.grad_norm;
      ok = res.converged;
    }
    if (!have || f < best_f) {
      best = sol;
      best_f = f;
      best_gn = gn;
      best_ok = ok;
      have = true;
    }
  }

  if (!best_ok)
    throw ConvergenceError("optimizer did not reach gradient tolerance within " +
                               std::to_string(config.max_iterations) + " iterations",
                           best, best_f);
  if (best_f > f_init + 1e-9 * (1.0 + std::abs(f_init))) {
    best = init;  // solver contract: never worse than the initializer
    best_f = f_init;
  }

  PanFit fit;
  fit.beta_hat = CoefficientVector{best};
  fit.x0 = x0;
  fit.lambda1 = lambda1;
  fit.lambda2 = lambda2;
  fit.method = lambda1 == 0.0 ? Method::pan : Method::pan_ridge;
  fit.reference_prediction = dot(x0, ref.beta);
  const double rn = norm(ref.beta);
  fit.cos_sim = rn > 0.0 ? dot(x0, ref.beta) / (std::sqrt(h2) * rn) : 0.0;
  fit.shrinkage_factor = std::abs(fit.reference_prediction) > 1e-300
                             ? dot(x0, best) / fit.reference_prediction
                             : 1.0;
  // orthonormal-case identity r_hat = sqrt((1+c)/2) ||ref|| / (1+l1); diagnostic only
  const double ratio = rn > 0.0 ? norm(best) * (1.0 + lambda1) / rn : 1.0;
  fit.c_value = std::clamp(2.0 * ratio * ratio - 1.0, -1.0, 1.0);
  (void)best_gn;
  return fit;
}

PanSolver::PanSolver(Matrix x, OptimizerConfig config)
    : x_(std::move(x)), xtx_(gram(x_)), qr_(householder_qr(x_)), cfg_(config) {}

void PanSolver::set_outcome(const Vec& y) {
  xty_ = tmatvec(x_, y);
  yty_ = dot(y, y);
  Vec b = tmatvec(qr_.q, y);
  for (std::size_t ii = x_.cols; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < x_.cols; ++k) s -= qr_.r(ii, k) * b[k];
    b[ii] = s / qr_.r(ii, ii);
  }
  beta_ols_ = std::move(b);
}

Vec PanSolver::solve(const Vec& x0, double lambda1, double lambda2) const {
  if (beta_ols_.empty()) throw DomainError("PanSolver has no outcome set");
  const double h2 = norm2(x0);
  if (h2 == 0.0) throw DegenerateInputError("zero covariate vector x0");
  const QuadraticForm qf{xtx_, xty_, yty_};
  const double init_norm = norm(beta_ols_);
  if (init_norm == 0.0) throw DegenerateInputError("zero OLS estimate");
  const double floor2 = std::pow(1e-10 * init_norm, 2);
  const double f_init = objective_precomp(beta_ols_, qf, x0, h2, lambda1, lambda2);

  CartesianProblem prob{qf, x0, h2, lambda1, lambda2, floor2};
  RandomStream perturb(cfg_.seed, 0);
  Vec best;
  double best_f = 0.0;
  bool best_ok = false, have = false;
  for (int start = 0; start <= std::max(0, cfg_.extra_starts); ++start) {
    Vec b0 = beta_ols_;
    if (start > 0) {
      for (double& v : b0) v *= 1.0 + 0.3 * perturb.normal();
      if (norm2(b0) <= floor2) b0 = beta_ols_;
    }
    auto res = minimize(prob, b0, cfg_.max_iterations, cfg_.gradient_tolerance);
    if (!have || res.value < best_f) {
      best = res.x;
      best_f = res.value;
      best_ok = res.converged;
      have = true;
    }
  }
  if (!best_ok)
    throw ConvergenceError("solver did not converge", best, best_f);
  if (best_f > f_init + 1e-9 * (1.0 + std::abs(f_init))) return beta_ols_;
  return best;
}

}  // namespace pan
