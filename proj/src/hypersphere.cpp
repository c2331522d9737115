#include "pan/hypersphere.hpp"

#include <algorithm>
#include <cmath>

#include "pan/errors.hpp"

namespace pan {

HypersphericalCoords to_hyperspherical(const Vec& v) {
  const std::size_t p = v.size();
  if (p == 0) throw DomainError("empty vector");
  HypersphericalCoords c;
  c.angles.assign(p - 1, 0.0);
  c.r = norm(v);
  if (p == 1) {
    c.r = v[0] >= 0.0 ? c.r : -c.r;  // no angle available to carry the sign
    return c;
  }
  if (c.r == 0.0) return c;

  // tail[k] = sqrt(v_k^2 + ... + v_{p-1}^2)
  Vec tail(p, 0.0);
  double acc = 0.0;
  for (std::size_t k = p; k-- > 0;) {
    acc += v[k] * v[k];
    tail[k] = std::sqrt(acc);
  }
  for (std::size_t k = 0; k + 2 < p; ++k) {
    if (tail[k] == 0.0) break;  // remaining coordinates all zero
    double ratio = std::clamp(v[k] / tail[k], -1.0, 1.0);
    c.angles[k] = std::acos(ratio);
  }
  const double last = tail[p - 2];
  if (last > 0.0) {
    double a = std::acos(std::clamp(v[p - 2] / last, -1.0, 1.0));
    c.angles[p - 2] = v[p - 1] >= 0.0 ? a : -a;
    if (c.angles[p - 2] <= -3.141592653589793) c.angles[p - 2] = 3.141592653589793;
  }
  return c;
}

Vec from_hyperspherical(const HypersphericalCoords& c) {
  const std::size_t p = c.dim();
  Vec v(p, 0.0);
  if (p == 1) {
    v[0] = c.r;
    return v;
  }
  double sinprod = c.r;
  for (std::size_t k = 0; k < p - 1; ++k) {
    v[k] = sinprod * std::cos(c.angles[k]);
    sinprod *= std::sin(c.angles[k]);
  }
  v[p - 1] = sinprod;
  return v;
}

double cosine_similarity(const Vec& a, const Vec& b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0)
    throw DegenerateInputError("cosine similarity undefined for zero-norm input");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

}  // namespace pan
