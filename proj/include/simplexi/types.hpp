#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace simplexi {

using Index = std::int64_t;

// Column-major, matching the storage order every factor in the library assumes.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad shapes or out-of-range indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed text input (edge lists, snapshots, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

// An algorithm could not produce a usable answer (degenerate direction,
// oracle size limit, and so on).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Caller supplied parameters outside the documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace simplexi
