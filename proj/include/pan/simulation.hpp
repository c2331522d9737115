#ifndef PAN_SIMULATION_HPP
#define PAN_SIMULATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pan/tuning.hpp"

namespace pan {

enum class SimMethod {
  ols,
  pan,
  ridge,
  pan_ridge_fixed_oracle,
  pan_ridge_fixed_estimated,
  pan_ridge_joint,
};

std::string sim_method_name(SimMethod m);
SimMethod sim_method_from_name(const std::string& name);

struct SimulationConfig {
  long n = 50;
  long p = 6;
  double sigma = 3.0;
  Vec beta_values = {0.05, 0.10, 0.15, 0.20};  // equal coefficients per column
  long replications = 200;
  long test_size = 1000;
  int bootstrap_samples = 2000;
  std::uint64_t seed = 1;
  std::vector<SimMethod> methods = {SimMethod::ols,
                                    SimMethod::pan,
                                    SimMethod::ridge,
                                    SimMethod::pan_ridge_fixed_oracle,
                                    SimMethod::pan_ridge_fixed_estimated,
                                    SimMethod::pan_ridge_joint};
  Vec lambda1_grid = TuningGrid{}.lambda1_values;
  Vec lambda2_grid = TuningGrid{}.lambda2_values;
  int threads = 0;
};

struct SimulationCell {
  double mse = 0.0;
  double std_error = 0.0;
  long long failures = 0;
};

struct SimulationReport {
  SimulationConfig config;
  // cells[m][b]: method m (config.methods order), beta column b
  std::vector<std::vector<SimulationCell>> cells;
  double wall_seconds = 0.0;
};

// One full study: per replication draw an orthonormalized design and a noisy
// outcome, tune each method by its protocol, and score personalized
// predictions on a fresh standard-normal test set against x'beta.
// Deterministic per seed, independent of the worker count.
SimulationReport run_study(const SimulationConfig& config);

enum class TableFormat { text, json, csv };
std::string emit_table(const SimulationReport& report, TableFormat format);

}  // namespace pan

#endif
