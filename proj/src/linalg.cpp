#include "pan/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "pan/errors.hpp"

namespace pan {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return dot(v, v); }

double norm(const Vec& v) { return std::sqrt(norm2(v)); }

Vec scaled(const Vec& v, double s) {
  Vec out(v);
  for (double& x : out) x *= s;
  return out;
}

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec matvec(const Matrix& m, const Vec& v) {
  Vec out(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    const double* row = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

Vec tmatvec(const Matrix& m, const Vec& v) {
  Vec out(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + i * m.cols;
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j] * vi;
  }
  return out;
}

Matrix gram(const Matrix& m) {
  Matrix g(m.cols, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + i * m.cols;
    for (std::size_t a = 0; a < m.cols; ++a)
      for (std::size_t b = a; b < m.cols; ++b) g(a, b) += row[a] * row[b];
  }
  for (std::size_t a = 0; a < m.cols; ++a)
    for (std::size_t b = 0; b < a; ++b) g(a, b) = g(b, a);
  return g;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

Vec solve_spd(Matrix a, Vec b) {
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0) throw RankError("matrix not positive definite");
    d = std::sqrt(d);
    a(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / d;
    }
  }
  // forward then backward substitution, L L^T x = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a(k, ii) * b[k];
    b[ii] = s / a(ii, ii);
  }
  return b;
}

QrDecomposition householder_qr(const Matrix& x) {
  const std::size_t n = x.rows, p = x.cols;
  if (n < p) throw RankError("QR needs rows >= cols");
  Matrix a = x;
  std::vector<Vec> hh;  // Householder vectors
  hh.reserve(p);
  double col_scale = 0.0;
  for (double v : x.data) col_scale = std::max(col_scale, std::abs(v));
  if (col_scale == 0.0) throw RankError("zero matrix has no QR basis");

  for (std::size_t k = 0; k < p; ++k) {
    double nrm = 0.0;
    for (std::size_t i = k; i < n; ++i) nrm += a(i, k) * a(i, k);
    nrm = std::sqrt(nrm);
    if (nrm <= 1e-12 * col_scale * std::sqrt(static_cast<double>(n)))
      throw RankError("rank-deficient design matrix");
    const double alpha = a(k, k) >= 0 ? -nrm : nrm;
    Vec v(n - k, 0.0);
    v[0] = a(k, k) - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i - k] = a(i, k);
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 > 0.0) {
      for (std::size_t j = k; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += v[i - k] * a(i, j);
        s *= 2.0 / vnorm2;
        for (std::size_t i = k; i < n; ++i) a(i, j) -= s * v[i - k];
      }
    }
    hh.push_back(std::move(v));
    a(k, k) = alpha;
  }

  QrDecomposition out;
  out.r = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) out.r(i, j) = a(i, j);

  // accumulate thin Q by applying reflectors to the leading p columns of I
  out.q = Matrix(n, p);
  for (std::size_t j = 0; j < p; ++j) out.q(j, j) = 1.0;
  for (std::size_t k = p; k-- > 0;) {
    const Vec& v = hh[k];
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 == 0.0) continue;
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i - k] * out.q(i, j);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k; i < n; ++i) out.q(i, j) -= s * v[i - k];
    }
  }

  // normalize sign so R has nonnegative diagonal
  for (std::size_t k = 0; k < p; ++k) {
    if (out.r(k, k) < 0.0) {
      for (std::size_t j = k; j < p; ++j) out.r(k, j) = -out.r(k, j);
      for (std::size_t i = 0; i < n; ++i) out.q(i, k) = -out.q(i, k);
    }
  }
  return out;
}

Vec lstsq(const Matrix& x, const Vec& y) {
  QrDecomposition qr = householder_qr(x);
  Vec b = tmatvec(qr.q, y);
  for (std::size_t ii = x.cols; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < x.cols; ++k) s -= qr.r(ii, k) * b[k];
    b[ii] = s / qr.r(ii, ii);
  }
  return b;
}

double condition_estimate(const Matrix& x) {
  QrDecomposition qr = householder_qr(x);
  double lo = qr.r(0, 0), hi = qr.r(0, 0);
  for (std::size_t k = 1; k < x.cols; ++k) {
    lo = std::min(lo, qr.r(k, k));
    hi = std::max(hi, qr.r(k, k));
  }
  if (lo <= 0.0) return 1e300;
  return (hi / lo) * (hi / lo);
}

bool is_orthonormal(const Matrix& x, double tol) {
  if (x.rows < x.cols) return false;
  return max_abs_diff(gram(x), Matrix::identity(x.cols)) <= tol;
}

}  // namespace pan
