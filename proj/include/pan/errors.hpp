#ifndef PAN_ERRORS_HPP
#define PAN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace pan {

// Exit-code buckets used by the CLI: 2 usage, 3 data, 4 numeric, 5 internal.
struct Error : std::runtime_error {
  int exit_code;
  explicit Error(const std::string& msg, int code = 5)
      : std::runtime_error(msg), exit_code(code) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(msg, 2) {}
};

struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(msg, 3) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(msg, 4) {}
};

struct ParseError : DataError {
  using DataError::DataError;
};

struct SchemaError : DataError {
  using DataError::DataError;
};

struct InsufficientDataError : DataError {
  using DataError::DataError;
};

struct DegenerateInputError : NumericError {
  using NumericError::NumericError;
};

struct RankError : NumericError {
  using NumericError::NumericError;
};

struct DomainError : NumericError {
  using NumericError::NumericError;
};

// Carries the best iterate found before iteration budget ran out.
struct ConvergenceError : NumericError {
  std::vector<double> best_point;
  double best_value;
  ConvergenceError(const std::string& msg, std::vector<double> best, double value)
      : NumericError(msg), best_point(std::move(best)), best_value(value) {}
};

}  // namespace pan

#endif
