#include "pan/theory.hpp"

#include <algorithm>
#include <cmath>

#include "pan/dataset.hpp"
#include "pan/errors.hpp"
#include "pan/estimators.hpp"
#include "pan/parallel.hpp"
#include "pan/rng.hpp"

namespace pan {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_instance(const TheoryInstance& inst) {
  if (norm2(inst.x0) == 0.0 || norm2(inst.beta_true) == 0.0)
    throw DegenerateInputError("theory instance needs nonzero x0 and beta");
  if (inst.sigma < 0.0) throw DomainError("sigma must be nonnegative");
  if (inst.n < 1) throw DomainError("n must be positive");
  if (inst.lambda1 < 0.0) throw DomainError("lambda1 must be nonnegative");
}

// Gauss-Kronrod 7-15 on one interval.
struct GkResult {
  double value;
  double error;
};

template <class F>
GkResult gk15(const F& f, double a, double b) {
  static const double xk[8] = {0.0,
                               0.2077849550078985,
                               0.4058451513773972,
                               0.5860872354676911,
                               0.7415311855993945,
                               0.8648644233597691,
                               0.9491079123427585,
                               0.9914553711208126};
  static const double wk[8] = {0.2094821410847278, 0.2044329400752989, 0.1903505780647854,
                               0.1690047266392679, 0.1406532597155259, 0.1047900103222502,
                               0.0630920926299786, 0.0229353220105292};
  static const double wg[4] = {0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
                               0.1294849661688697};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double resk = wk[0] * f(c);
  double resg = wg[0] * f(c);
  for (int i = 1; i < 8; ++i) {
    const double fv = f(c - h * xk[i]) + f(c + h * xk[i]);
    resk += wk[i] * fv;
    if (i % 2 == 0) resg += wg[i / 2] * fv;
  }
  return {resk * h, std::abs(resk - resg) * h};
}

template <class F>
double adaptive_quad(const F& f, double a, double b, double abstol, int depth = 0) {
  const GkResult r = gk15(f, a, b);
  if (r.error <= abstol || depth >= 40) return r.value;
  const double m = 0.5 * (a + b);
  return adaptive_quad(f, a, m, 0.5 * abstol, depth + 1) +
         adaptive_quad(f, m, b, 0.5 * abstol, depth + 1);
}

double density_constant(int p) {
  // Gamma(p/2) / (sqrt(pi) Gamma((p-1)/2))
  return std::exp(std::lgamma(0.5 * p) - std::lgamma(0.5 * (p - 1))) / std::sqrt(kPi);
}

}  // namespace

double mse_derivative_at_zero(const TheoryInstance& inst) {
  check_instance(inst);
  const double h2 = norm2(inst.x0);
  const double b2 = norm2(inst.beta_true);
  const double pb = dot(inst.x0, inst.beta_true);
  const double pb2 = pb * pb;
  const double n = static_cast<double>(inst.n);
  const double c1 =
      (2.0 / n) * (h2 * b2 - pb2) / ((n + inst.lambda1) * h2 * b2 * b2);
  const double core = inst.lambda1 * pb2 -
                      inst.sigma * inst.sigma * h2 * (1.0 - 4.0 * pb2 / (h2 * b2));
  return c1 * core;
}

double lambda1_star(const Vec& x0, const Vec& beta, double sigma) {
  const double h2 = norm2(x0);
  const double b2 = norm2(beta);
  if (h2 == 0.0 || b2 == 0.0) throw DegenerateInputError("zero-norm input");
  const double pb = dot(x0, beta);
  if (pb == 0.0)
    throw DomainError("lambda1* undefined for x0 orthogonal to beta (division by zero)");
  return sigma * sigma * h2 / (pb * pb) * (1.0 - 4.0 * pb * pb / (h2 * b2));
}

double oracle_fridge_lambda(const Vec& x0, const Vec& beta, double sigma) {
  const double h2 = norm2(x0);
  if (h2 == 0.0 || norm2(beta) == 0.0) throw DegenerateInputError("zero-norm input");
  const double pb = dot(x0, beta);
  if (pb == 0.0)
    throw DomainError("oracle ridge level undefined for x0 orthogonal to beta");
  return sigma * sigma * h2 / (pb * pb);
}

double inner_product_density(double z, int p) {
  if (p < 2) throw DomainError("density defined for p >= 2");
  if (std::abs(z) >= 1.0) throw DomainError("density support is (-1, 1)");
  return density_constant(p) * std::pow(1.0 - z * z, 0.5 * (p - 3));
}

double proportion_within(double t, int p) {
  if (p < 2) throw DomainError("density defined for p >= 2");
  if (t <= 0.0 || t > 1.0) throw DomainError("t must lie in (0, 1]");
  // substitution z = sin(theta) tames the p = 2 endpoint singularity:
  // integrand becomes cos(theta)^(p-2)
  const double k = density_constant(p);
  const double upper = std::asin(std::min(t, 1.0));
  const auto f = [&](double th) { return k * std::pow(std::cos(th), p - 2); };
  const double half = adaptive_quad(f, 0.0, upper, 5e-11);
  return std::min(2.0 * half, 1.0);
}

std::vector<McMsePoint> mc_mse_curve(const TheoryInstance& inst, const Vec& lambda2_values,
                                     long long replications, std::uint64_t seed,
                                     int threads) {
  check_instance(inst);
  if (replications < 1) throw DomainError("replications must be >= 1");
  if (lambda2_values.empty()) throw DomainError("lambda2 grid must be non-empty");

  const std::size_t p = inst.beta_true.size();
  const std::size_t n = static_cast<std::size_t>(inst.n);
  if (n < p) throw DomainError("n >= p required");
  const double dn = static_cast<double>(inst.n);

  // one fixed design per curve: X'X = n I_p
  Matrix z(n, p);
  RandomStream xs(seed, 0x00d5ea11);
  for (double& v : z.data) v = xs.normal();
  const Matrix x = orthonormalize(z, OrthoScale::sqrt_n);

  const Vec mean_y = matvec(x, inst.beta_true);
  const double h2 = norm2(inst.x0);
  const double mu0 = dot(inst.x0, inst.beta_true);
  const std::size_t nl = lambda2_values.size();

  struct Accum {
    std::vector<double> sum, sumsq, cross;
    Accum() = default;
    explicit Accum(std::size_t m) : sum(m, 0.0), sumsq(m, 0.0), cross(m, 0.0) {}
  };
  Accum total(nl);

  auto block_fn = [&](std::size_t first, std::size_t last) {
    Accum acc(nl);
    Vec eps(n), btr(p);
    std::vector<double> sq(nl);
    for (std::size_t rep = first; rep < last; ++rep) {
      RandomStream rng(seed, rep + 1);
      for (std::size_t i = 0; i < n; ++i) eps[i] = inst.sigma * rng.normal();
      btr = tmatvec(x, eps);
      for (std::size_t j = 0; j < p; ++j) btr[j] = inst.beta_true[j] + btr[j] / dn;
      const double s = norm2(btr);
      const double pr = dot(inst.x0, btr);
      const double q = pr * pr / h2;
      for (std::size_t k = 0; k < nl; ++k) {
        // scaled design: tuning parameters enter through lambda/n
        const double f =
            prediction_factor_sq(s, q, inst.lambda1 / dn, lambda2_values[k] / dn);
        const double e = f * pr - mu0;
        sq[k] = e * e;
      }
      for (std::size_t k = 0; k < nl; ++k) {
        acc.sum[k] += sq[k];
        acc.sumsq[k] += sq[k] * sq[k];
        acc.cross[k] += sq[k] * sq[0];
      }
    }
    return acc;
  };

  blocked_reduce_ordered<Accum>(static_cast<std::size_t>(replications), 1024, threads,
                                block_fn, [&](Accum&& acc) {
                                  for (std::size_t k = 0; k < nl; ++k) {
                                    total.sum[k] += acc.sum[k];
                                    total.sumsq[k] += acc.sumsq[k];
                                    total.cross[k] += acc.cross[k];
                                  }
                                });

  const double m = static_cast<double>(replications);
  std::vector<McMsePoint> out(nl);
  const double mean0 = total.sum[0] / m;
  const double var0 = std::max(total.sumsq[0] / m - mean0 * mean0, 0.0);
  for (std::size_t k = 0; k < nl; ++k) {
    McMsePoint& pt = out[k];
    pt.lambda2 = lambda2_values[k];
    pt.mse = total.sum[k] / m;
    const double vark = std::max(total.sumsq[k] / m - pt.mse * pt.mse, 0.0);
    pt.std_error = m > 1 ? std::sqrt(vark / (m - 1)) : 0.0;
    const double cov = total.cross[k] / m - pt.mse * mean0;
    const double vard = std::max(vark + var0 - 2.0 * cov, 0.0);
    pt.diff_vs_first = pt.mse - mean0;
    pt.diff_std_error = m > 1 ? std::sqrt(vard / (m - 1)) : 0.0;
  }
  return out;
}

}  // namespace pan
