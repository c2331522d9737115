#include "pan/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "pan/errors.hpp"
#include "pan/parallel.hpp"
#include "pan/report_json.hpp"
#include "pan/rng.hpp"

namespace pan {

namespace {

struct RepResult {
  // per (beta column, method): squared-error mean over the test set; NaN on failure
  std::vector<std::vector<double>> mse;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(seed ^ (a * 0x9e3779b97f4a7c15ull) ^ (b * 0xc2b2ae3d27d4eb4full));
  g.next();
  return g.next();
}

}  // namespace

std::string sim_method_name(SimMethod m) {
  switch (m) {
    case SimMethod::ols: return "ols";
    case SimMethod::pan: return "pan";
    case SimMethod::ridge: return "ridge";
    case SimMethod::pan_ridge_fixed_oracle: return "pan_ridge_fixed_oracle";
    case SimMethod::pan_ridge_fixed_estimated: return "pan_ridge_fixed_estimated";
    case SimMethod::pan_ridge_joint: return "pan_ridge_joint";
  }
  return "unknown";
}

SimMethod sim_method_from_name(const std::string& name) {
  for (SimMethod m : {SimMethod::ols, SimMethod::pan, SimMethod::ridge,
                      SimMethod::pan_ridge_fixed_oracle, SimMethod::pan_ridge_fixed_estimated,
                      SimMethod::pan_ridge_joint}) {
    if (sim_method_name(m) == name) return m;
  }
  throw UsageError("unknown simulation method '" + name + "'");
}

SimulationReport run_study(const SimulationConfig& config) {
  if (config.n < 1 || config.p < 1 || config.p > config.n)
    throw DomainError("simulation needs 1 <= p <= n");
  if (config.sigma < 0.0) throw DomainError("sigma must be nonnegative");
  if (config.replications < 1 || config.test_size < 1 || config.bootstrap_samples < 1)
    throw DomainError("replications, test_size and bootstrap_samples must be positive");
  if (config.beta_values.empty()) throw DomainError("at least one beta value required");

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = static_cast<std::size_t>(config.n);
  const std::size_t p = static_cast<std::size_t>(config.p);
  const std::size_t nb = config.beta_values.size();
  const std::size_t nm = config.methods.size();

  const bool need_ridge_level =
      std::count(config.methods.begin(), config.methods.end(), SimMethod::ridge) > 0 ||
      std::count(config.methods.begin(), config.methods.end(),
                 SimMethod::pan_ridge_fixed_oracle) > 0 ||
      std::count(config.methods.begin(), config.methods.end(),
                 SimMethod::pan_ridge_fixed_estimated) > 0;

  auto run_replication = [&](std::size_t rep) {
    RepResult out;
    out.mse.assign(nb, std::vector<double>(nm, std::numeric_limits<double>::quiet_NaN()));

    // design, shared across beta columns for this replication
    Matrix z(n, p);
    RandomStream design_rng(config.seed, mix_seed(1, rep, 0));
    for (double& v : z.data) v = design_rng.normal();
    const Matrix x = orthonormalize(z, OrthoScale::unit);
    std::vector<Vec> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = x.row(i);

    // fresh test set per replication
    const std::size_t ntest = static_cast<std::size_t>(config.test_size);
    Matrix xt(ntest, p);
    RandomStream test_rng(config.seed, mix_seed(2, rep, 0));
    for (double& v : xt.data) v = test_rng.normal();
    Vec h2t(ntest);
    for (std::size_t i = 0; i < ntest; ++i) h2t[i] = norm2(xt.row(i));

    for (std::size_t b = 0; b < nb; ++b) {
      const Vec beta(p, config.beta_values[b]);
      Dataset d;
      d.x = x;
      d.y = matvec(x, beta);
      RandomStream noise_rng(config.seed, mix_seed(3, rep, b));
      for (double& v : d.y) v += config.sigma * noise_rng.normal();

      const Vec bt = tmatvec(x, d.y);  // OLS under the orthonormal design
      const double s = norm2(bt);
      const Vec pred_ref = matvec(xt, bt);
      const Vec mean_true = matvec(xt, beta);

      auto score = [&](double l1, double l2) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ntest; ++i) {
          const double q = pred_ref[i] * pred_ref[i] / h2t[i];
          const double e =
              prediction_factor_sq(s, q, l1, l2) * pred_ref[i] - mean_true[i];
          acc += e * e;
        }
        return acc / static_cast<double>(ntest);
      };

      TuningGrid grid;
      grid.lambda1_values = config.lambda1_grid;
      grid.lambda2_values = config.lambda2_grid;
      grid.bootstrap_samples = config.bootstrap_samples;

      double ridge_level = 0.0;
      if (need_ridge_level) {
        grid.seed = mix_seed(config.seed, rep * nb + b, 10);
        ridge_level = bootstrap_tune(d, grid, TuneMethod::ridge_only, 0.0, 1).lambda1;
      }

      for (std::size_t m = 0; m < nm; ++m) {
        try {
          switch (config.methods[m]) {
            case SimMethod::ols:
              out.mse[b][m] = score(0.0, 0.0);
              break;
            case SimMethod::ridge:
              out.mse[b][m] = score(ridge_level, 0.0);
              break;
            case SimMethod::pan: {
              grid.seed = mix_seed(config.seed, rep * nb + b, 11);
              const double l2 = bootstrap_tune(d, grid, TuneMethod::pan_only, 0.0, 1).lambda2;
              out.mse[b][m] = score(0.0, l2);
              break;
            }
            case SimMethod::pan_ridge_fixed_oracle: {
              grid.seed = mix_seed(config.seed, rep * nb + b, 12);
              const double l2 =
                  oracle_tune(rows, beta, config.sigma, grid, ridge_level, {n, p}, 1).lambda2;
              out.mse[b][m] = score(ridge_level, l2);
              break;
            }
            case SimMethod::pan_ridge_fixed_estimated: {
              grid.seed = mix_seed(config.seed, rep * nb + b, 13);
              const double l2 =
                  bootstrap_tune(d, grid, TuneMethod::pan_given_lambda1, ridge_level, 1)
                      .lambda2;
              out.mse[b][m] = score(ridge_level, l2);
              break;
            }
            case SimMethod::pan_ridge_joint: {
              grid.seed = mix_seed(config.seed, rep * nb + b, 14);
              const TuningResult r = bootstrap_tune(d, grid, TuneMethod::pan_ridge, 0.0, 1);
              out.mse[b][m] = score(r.lambda1, r.lambda2);
              break;
            }
          }
        } catch (const Error&) {
          // leave NaN; counted as a failure
        }
      }
    }
    return out;
  };

  // accumulate mean and variance per cell in replication order
  std::vector<std::vector<double>> sum(nb, std::vector<double>(nm, 0.0));
  std::vector<std::vector<double>> sumsq(nb, std::vector<double>(nm, 0.0));
  std::vector<std::vector<long long>> count(nb, std::vector<long long>(nm, 0));

  blocked_reduce_ordered<std::vector<RepResult>>(
      static_cast<std::size_t>(config.replications), 1, config.threads,
      [&](std::size_t first, std::size_t last) {
        std::vector<RepResult> partial;
        for (std::size_t rep = first; rep < last; ++rep)
          partial.push_back(run_replication(rep));
        return partial;
      },
      [&](std::vector<RepResult>&& partial) {
        for (const RepResult& r : partial) {
          for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t m = 0; m < nm; ++m) {
              const double v = r.mse[b][m];
              if (std::isnan(v)) continue;
              sum[b][m] += v;
              sumsq[b][m] += v * v;
              ++count[b][m];
            }
        }
      });

  SimulationReport report;
  report.config = config;
  report.cells.assign(nm, std::vector<SimulationCell>(nb));
  for (std::size_t m = 0; m < nm; ++m) {
    for (std::size_t b = 0; b < nb; ++b) {
      SimulationCell& cell = report.cells[m][b];
      const long long c = count[b][m];
      cell.failures = config.replications - c;
      if (c > 0) {
        cell.mse = sum[b][m] / static_cast<double>(c);
        const double var =
            c > 1 ? std::max(sumsq[b][m] / c - cell.mse * cell.mse, 0.0) : 0.0;
        cell.std_error = c > 1 ? std::sqrt(var / static_cast<double>(c - 1)) : 0.0;
      }
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string emit_table(const SimulationReport& report, TableFormat format) {
  std::ostringstream os;
  const auto& cfg = report.config;
  if (format == TableFormat::text) {
    os << "method";
    for (double b : cfg.beta_values) {
      os << "\tb=" << b;
    }
    os << "\n";
    os.setf(std::ios::fixed);
    os.precision(3);
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      os << sim_method_name(cfg.methods[m]);
      for (std::size_t b = 0; b < cfg.beta_values.size(); ++b)
        os << "\t" << report.cells[m][b].mse;
      os << "\n";
    }
  } else if (format == TableFormat::csv) {
    os << "method,beta,mse,std_error,failures\n";
    for (std::size_t m = 0; m < cfg.methods.size(); ++m)
      for (std::size_t b = 0; b < cfg.beta_values.size(); ++b) {
        const SimulationCell& c = report.cells[m][b];
        os << sim_method_name(cfg.methods[m]) << "," << cfg.beta_values[b] << "," << c.mse
           << "," << c.std_error << "," << c.failures << "\n";
      }
  } else {
    return simulation_report_json(report).dump(2) + "\n";
  }
  return os.str();
}

}  // namespace pan
