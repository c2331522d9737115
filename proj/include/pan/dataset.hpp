#ifndef PAN_DATASET_HPP
#define PAN_DATASET_HPP

#include <string>
#include <vector>

#include "pan/linalg.hpp"

namespace pan {

struct Dataset {
  Matrix x;                 // n x p design
  Vec y;                    // n outcomes
  Vec column_means;         // applied to covariates when centered
  double y_mean = 0.0;
  bool centered = false;
  std::vector<std::string> column_names;  // optional, from CSV ingestion

  std::size_t n() const { return x.rows; }
  std::size_t p() const { return x.cols; }
};

// Subtracts column means from X and the mean from Y, recording them.
// Requires n >= 2.
Dataset center(const Dataset& d);

// In-place standardization to zero mean and unit sample variance (divisor
// n-1), covariates and outcome both. Means are recorded as in center().
Dataset standardize(const Dataset& d);

enum class OrthoScale { unit, sqrt_n };

// QR-based column orthonormalization: X^T X = I_p (unit) or n I_p (sqrt_n).
// Column span is preserved; each output column has its first nonzero entry
// positive. Throws RankError on dependent columns.
Matrix orthonormalize(const Matrix& x, OrthoScale scale = OrthoScale::unit);

}  // namespace pan

#endif
