#ifndef PAN_HYPERSPHERE_HPP
#define PAN_HYPERSPHERE_HPP

#include "pan/linalg.hpp"

namespace pan {

// Length r plus p-1 angles. angles[0..p-3] lie in [0, pi], the last angle in
// (-pi, pi]. A 1-vector has no angular freedom: the angle list is empty and
// r carries the sign so the round trip stays exact.
struct HypersphericalCoords {
  double r = 0.0;
  Vec angles;

  std::size_t dim() const { return angles.size() + 1; }
};

// Inverse transform (arccos chain, sign case on the last coordinate).
// The zero vector maps to r = 0 with all angles 0.
HypersphericalCoords to_hyperspherical(const Vec& v);

// Forward cos/sin product cascade.
Vec from_hyperspherical(const HypersphericalCoords& c);

// a^T b / (||a|| ||b||). Throws DegenerateInputError on a zero-norm input.
double cosine_similarity(const Vec& a, const Vec& b);

}  // namespace pan

#endif
