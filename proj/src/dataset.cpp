#include "pan/dataset.hpp"

#include <cmath>

#include "pan/errors.hpp"

namespace pan {

Dataset center(const Dataset& d) {
  if (d.n() < 2) throw InsufficientDataError("centering needs at least 2 rows");
  Dataset out = d;
  out.column_means.assign(d.p(), 0.0);
  for (std::size_t i = 0; i < d.n(); ++i)
    for (std::size_t j = 0; j < d.p(); ++j) out.column_means[j] += d.x(i, j);
  for (std::size_t j = 0; j < d.p(); ++j) out.column_means[j] /= static_cast<double>(d.n());
  out.y_mean = 0.0;
  for (double v : d.y) out.y_mean += v;
  out.y_mean /= static_cast<double>(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j < d.p(); ++j) out.x(i, j) = d.x(i, j) - out.column_means[j];
    out.y[i] = d.y[i] - out.y_mean;
  }
  out.centered = true;
  return out;
}

Dataset standardize(const Dataset& d) {
  Dataset out = center(d);
  const double dn = static_cast<double>(d.n() - 1);
  for (std::size_t j = 0; j < d.p(); ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < d.n(); ++i) ss += out.x(i, j) * out.x(i, j);
    const double sd = std::sqrt(ss / dn);
    if (sd == 0.0) throw DegenerateInputError("constant covariate column cannot be standardized");
    for (std::size_t i = 0; i < d.n(); ++i) out.x(i, j) /= sd;
  }
  double ss = 0.0;
  for (double v : out.y) ss += v * v;
  const double sdy = std::sqrt(ss / dn);
  if (sdy == 0.0) throw DegenerateInputError("constant outcome cannot be standardized");
  for (double& v : out.y) v /= sdy;
  return out;
}

Matrix orthonormalize(const Matrix& x, OrthoScale scale) {
  if (x.rows < x.cols) throw RankError("orthonormalization needs n >= p");
  QrDecomposition qr = householder_qr(x);
  Matrix q = qr.q;
  for (std::size_t j = 0; j < q.cols; ++j) {
    double lead = 0.0;
    for (std::size_t i = 0; i < q.rows; ++i) {
      if (std::abs(q(i, j)) > 1e-14) {
        lead = q(i, j);
        break;
      }
    }
    if (lead < 0.0)
      for (std::size_t i = 0; i < q.rows; ++i) q(i, j) = -q(i, j);
  }
  if (scale == OrthoScale::sqrt_n) {
    const double s = std::sqrt(static_cast<double>(x.rows));
    for (double& v : q.data) v *= s;
  }
  return q;
}

}  // namespace pan
