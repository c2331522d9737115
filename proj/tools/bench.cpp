// Times the hot kernels with the serial reference path (1 worker) against the
// OpenMP path, and checks that both produce identical numbers.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include <omp.h>

#include "pan/dataset.hpp"
#include "pan/rng.hpp"
#include "pan/simulation.hpp"
#include "pan/theory.hpp"
#include "pan/tuning.hpp"

using namespace pan;

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Dataset synthetic_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  Matrix z(n, p);
  RandomStream rng(seed, 0);
  for (double& v : z.data) v = rng.normal();
  Dataset d;
  d.x = orthonormalize(z);
  d.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.y[i] = 0.3 * d.x(i, 0) + 0.15 * rng.normal();
  return d;
}

template <class Fn>
double timed(const char* name, int threads, Fn&& fn) {
  const double t0 = now();
  const double checksum = fn();
  const double dt = now() - t0;
  std::printf("%-28s %2d worker(s)  %8.3f s   checksum %.12g\n", name, threads, dt, checksum);
  return checksum;
}

}  // namespace

int main(int argc, char** argv) {
  int workers = omp_get_max_threads();
  if (argc > 1) workers = std::max(2, std::atoi(argv[1]));
  std::printf("serial reference vs OpenMP (%d workers)\n\n", workers);

  {
    Dataset d = synthetic_data(50, 6, 7);
    TuningGrid grid;
    grid.bootstrap_samples = 4000;
    grid.seed = 11;
    auto run = [&](int t) {
      return [&, t] {
        TuningResult r = bootstrap_tune(d, grid, TuneMethod::pan_ridge, 0.0, t);
        double s = 0.0;
        for (double v : r.mse_surface.data) s += v;
        return s;
      };
    };
    const double a = timed("bootstrap_tune pan_ridge", 1, run(1));
    const double b = timed("bootstrap_tune pan_ridge", workers, run(workers));
    std::printf("  identical: %s\n\n", a == b ? "yes" : "NO");
  }

  {
    TheoryInstance inst;
    inst.x0 = {1.0, 0.3};
    inst.beta_true = {0.25, 0.6};
    inst.sigma = 1.0;
    inst.n = 400;
    const Vec grid = {-1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0};
    auto run = [&](int t) {
      return [&, t] {
        auto curve = mc_mse_curve(inst, grid, 2000000, 5, t);
        double s = 0.0;
        for (const auto& pt : curve) s += pt.mse;
        return s;
      };
    };
    const double a = timed("mc_mse_curve 2e6 reps", 1, run(1));
    const double b = timed("mc_mse_curve 2e6 reps", workers, run(workers));
    std::printf("  identical: %s\n\n", a == b ? "yes" : "NO");
  }

  {
    SimulationConfig cfg;
    cfg.replications = 20;
    cfg.bootstrap_samples = 200;
    cfg.beta_values = {0.05};
    cfg.sigma = 1.0 / std::sqrt(50.0);
    cfg.seed = 3;
    auto run = [&](int t) {
      return [&, t] {
        cfg.threads = t;
        SimulationReport r = run_study(cfg);
        double s = 0.0;
        for (const auto& row : r.cells)
          for (const auto& cell : row) s += cell.mse;
        return s;
      };
    };
    const double a = timed("run_study 20 reps", 1, run(1));
    const double b = timed("run_study 20 reps", workers, run(workers));
    std::printf("  identical: %s\n", a == b ? "yes" : "NO");
  }
  return 0;
}
