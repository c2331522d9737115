#ifndef PAN_LINALG_HPP
#define PAN_LINALG_HPP

#include <cstddef>
#include <vector>

namespace pan {

using Vec = std::vector<double>;

// Dense row-major matrix. Sizes here are small (p <= ~30, n <= ~1000),
// so plain loops are fine.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  Vec row(std::size_t i) const {
    return Vec(data.begin() + static_cast<std::ptrdiff_t>(i * cols),
               data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double norm2(const Vec& v);  // squared norm
Vec scaled(const Vec& v, double s);
void axpy(double a, const Vec& x, Vec& y);  // y += a*x

Vec matvec(const Matrix& m, const Vec& v);    // m v
Vec tmatvec(const Matrix& m, const Vec& v);   // m^T v
Matrix gram(const Matrix& m);                 // m^T m
double max_abs_diff(const Matrix& a, const Matrix& b);

// Cholesky solve of an SPD system. Throws RankError if not positive definite.
Vec solve_spd(Matrix a, Vec b);

// Thin Householder QR. q is n x p with orthonormal columns, r upper triangular
// with nonnegative diagonal. Throws RankError when columns are dependent.
struct QrDecomposition {
  Matrix q;
  Matrix r;
};
QrDecomposition householder_qr(const Matrix& x);

// Least-squares solve min ||x b - y|| via QR.
Vec lstsq(const Matrix& x, const Vec& y);

// Ratio (max diag R / min diag R)^2, a cheap condition estimate of x^T x.
double condition_estimate(const Matrix& x);

// True when ||x^T x - I||_max <= tol.
bool is_orthonormal(const Matrix& x, double tol = 1e-8);

}  // namespace pan

#endif
