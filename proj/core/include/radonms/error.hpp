#pragma once

#include <stdexcept>
#include <string>

namespace radonms {

/// Bad input: invalid sizes, mismatched grids, unparsable files.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Grid/geometry pairs that do not belong together.
class GeometryMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Image support reaches beyond the offset range of a projection geometry.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear system that cannot be solved without regularization.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested dense operator exceeds the configured memory cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace radonms
