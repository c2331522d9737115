#include "pan/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "pan/errors.hpp"
#include "pan/parallel.hpp"
#include "pan/rng.hpp"

namespace pan {

namespace {

constexpr std::size_t kReplicateBlock = 32;

struct GridAxes {
  Vec l1;
  Vec l2;
};

GridAxes effective_axes(const TuningGrid& grid, TuneMethod method, double lambda1_fixed) {
  switch (method) {
    case TuneMethod::ridge_only:
      return {grid.lambda1_values, {0.0}};
    case TuneMethod::pan_only:
      return {{0.0}, grid.lambda2_values};
    case TuneMethod::pan_ridge:
      return {grid.lambda1_values, grid.lambda2_values};
    case TuneMethod::pan_given_lambda1:
      return {{lambda1_fixed}, grid.lambda2_values};
  }
  throw DomainError("unknown tuning method");
}

struct Partial {
  std::vector<double> sum;
  std::vector<long long> failures;
};

TuningResult tune_impl(const Matrix& x, const Vec& beta_center, double sigma2,
                       const GridAxes& axes, int bootstrap_samples, std::uint64_t seed,
                       int threads) {
  const std::size_t n = x.rows;
  const std::size_t npairs = axes.l1.size() * axes.l2.size();
  const Vec targets = matvec(x, beta_center);
  Vec h2(n);
  for (std::size_t i = 0; i < n; ++i) h2[i] = norm2(x.row(i));

  const bool ortho = is_orthonormal(x);
  const double sigma = std::sqrt(std::max(sigma2, 0.0));

  std::shared_ptr<const PanSolver> proto;
  Matrix xtx;
  if (!ortho) {
    OptimizerConfig cfg;
    cfg.gradient_tolerance = 1e-9;
    cfg.extra_starts = 0;
    proto = std::make_shared<PanSolver>(x, cfg);
    xtx = gram(x);
  }

  std::vector<double> sums(npairs, 0.0);
  std::vector<long long> fails(npairs, 0);

  auto block_fn = [&](std::size_t first, std::size_t last) {
    Partial part{std::vector<double>(npairs, 0.0), std::vector<long long>(npairs, 0)};
    // each worker clones the solver so outcome swaps stay private
    std::unique_ptr<PanSolver> solver;
    if (!ortho) solver = std::make_unique<PanSolver>(*proto);
    Vec yr(n), btr, pred_ref;
    for (std::size_t rep = first; rep < last; ++rep) {
      RandomStream rng(seed, rep);
      for (std::size_t i = 0; i < n; ++i) yr[i] = targets[i] + sigma * rng.normal();
      if (ortho) {
        btr = tmatvec(x, yr);
        const double s = norm2(btr);
        pred_ref = matvec(x, btr);
        std::size_t k = 0;
        for (double l1 : axes.l1) {
          for (double l2 : axes.l2) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              const double q = pred_ref[i] * pred_ref[i] / h2[i];
              const double e = prediction_factor_sq(s, q, l1, l2) * pred_ref[i] - targets[i];
              acc += e * e;
            }
            part.sum[k] += acc;
            ++k;
          }
        }
      } else {
        solver->set_outcome(yr);
        const Vec xty_r = tmatvec(x, yr);
        std::size_t k = 0;
        for (double l1 : axes.l1) {
          for (double l2 : axes.l2) {
            if (l2 == 0.0) {
              // plain ridge: exact closed form, one fit serves every row
              Matrix a = xtx;
              for (std::size_t j = 0; j < a.rows; ++j) a(j, j) += l1;
              const Vec bhat = solve_spd(std::move(a), xty_r);
              const Vec pr = matvec(x, bhat);
              for (std::size_t i = 0; i < n; ++i) {
                const double e = pr[i] - targets[i];
                part.sum[k] += e * e;
              }
            } else {
              for (std::size_t i = 0; i < n; ++i) {
                const Vec xi = x.row(i);
                try {
                  const Vec bhat = solver->solve(xi, l1, l2);
                  const double e = dot(xi, bhat) - targets[i];
                  part.sum[k] += e * e;
                } catch (const NumericError&) {
                  ++part.failures[k];
                }
              }
            }
            ++k;
          }
        }
      }
    }
    return part;
  };

  blocked_reduce_ordered<Partial>(
      static_cast<std::size_t>(bootstrap_samples), kReplicateBlock, threads, block_fn,
      [&](Partial&& part) {
        for (std::size_t k = 0; k < npairs; ++k) {
          sums[k] += part.sum[k];
          fails[k] += part.failures[k];
        }
      });

  TuningResult res;
  res.lambda1_axis = axes.l1;
  res.lambda2_axis = axes.l2;
  res.mse_surface = Matrix(axes.l1.size(), axes.l2.size());
  res.bootstrap_samples = bootstrap_samples;
  res.seed = seed;
  const double total = static_cast<double>(bootstrap_samples) * static_cast<double>(n);
  bool any_valid = false;
  double best_val = std::numeric_limits<double>::infinity();
  double best_abs2 = 0.0, best_l1 = 0.0, best_l2 = 0.0;
  std::size_t k = 0;
  for (std::size_t a = 0; a < axes.l1.size(); ++a) {
    for (std::size_t b = 0; b < axes.l2.size(); ++b, ++k) {
      res.fit_failures += fails[k];
      const double failed = static_cast<double>(fails[k]);
      if (failed > 0.01 * total) {
        res.mse_surface(a, b) = std::numeric_limits<double>::infinity();
        continue;
      }
      const double v = sums[k] / (total - failed);
      res.mse_surface(a, b) = v;
      const double l1 = axes.l1[a], l2 = axes.l2[b];
      const bool better =
          !any_valid || v < best_val ||
          (v == best_val && (std::abs(l2) < best_abs2 ||
                             (std::abs(l2) == best_abs2 && l1 < best_l1)));
      if (better) {
        any_valid = true;
        best_val = v;
        best_abs2 = std::abs(l2);
        best_l1 = l1;
        best_l2 = l2;
      }
    }
  }
  if (!any_valid)
    throw NumericError("bootstrap tuning failed: every grid point exceeded the failure budget");
  res.lambda1 = best_l1;
  res.lambda2 = best_l2;
  return res;
}

}  // namespace

SigmaEstimate estimate_sigma(const Dataset& data) {
  const std::size_t n = data.n(), p = data.p();
  if (n <= p)
    throw InsufficientDataError("sigma estimation needs n > p (got n = " + std::to_string(n) +
                                ", p = " + std::to_string(p) + ")");
  const Vec beta = ols_fit(data).beta;
  const Vec fitted = matvec(data.x, beta);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = data.y[i] - fitted[i];
    rss += e * e;
  }
  const double s2 = rss / static_cast<double>(n - p);
  return {std::sqrt(s2), s2};
}

TuningResult bootstrap_tune(const Dataset& data, const TuningGrid& grid, TuneMethod method,
                            double lambda1_fixed, int threads) {
  if (grid.bootstrap_samples < 1) throw DomainError("bootstrap sample count must be >= 1");
  if (grid.lambda1_values.empty() || grid.lambda2_values.empty())
    throw DomainError("tuning grid axes must be non-empty");
  const SigmaEstimate sig = estimate_sigma(data);
  const Vec beta_tilde = ols_fit(data).beta;
  const GridAxes axes = effective_axes(grid, method, lambda1_fixed);
  TuningResult res = tune_impl(data.x, beta_tilde, sig.sigma2, axes, grid.bootstrap_samples,
                               grid.seed, threads);
  res.sigma_hat = sig.sigma;
  return res;
}

TuningResult oracle_tune(const std::vector<Vec>& x_rows, const Vec& beta_true,
                         double sigma_true, const TuningGrid& grid, double lambda1_fixed,
                         std::pair<std::size_t, std::size_t> data_shape, int threads) {
  if (x_rows.empty()) throw InsufficientDataError("oracle tuning needs covariate rows");
  const std::size_t n = x_rows.size(), p = x_rows.front().size();
  if (data_shape.first != n || data_shape.second != p)
    throw DomainError("data_shape does not match the supplied covariate rows");
  if (grid.bootstrap_samples < 1) throw DomainError("bootstrap sample count must be >= 1");
  Matrix x(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) x(i, j) = x_rows[i][j];
  const GridAxes axes = effective_axes(grid, TuneMethod::pan_given_lambda1, lambda1_fixed);
  TuningResult res =
      tune_impl(x, beta_true, sigma_true * sigma_true, axes, grid.bootstrap_samples,
                grid.seed, threads);
  res.sigma_hat = sigma_true;
  return res;
}

}  // namespace pan
