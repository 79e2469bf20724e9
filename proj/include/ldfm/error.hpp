#pragma once

#include <stdexcept>
#include <string>

namespace ldfm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input files, schema mismatches, unusable models.
class DataError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Q^0 has no positive determinant: the assignment has zero probability
// under the model (no spanning tree of positive weight).
class SingularLaplacian : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace ldfm
