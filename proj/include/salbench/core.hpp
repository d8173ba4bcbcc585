#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace salbench {

using Vec3 = Eigen::Vector3d;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, out-of-range indices, inconsistent sizes.
/// The CLI maps this to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal diagnostics collected along a computation. Functions that can
/// degrade gracefully take an optional `Warnings*` and append to it.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* warnings, std::string message) {
  if (warnings != nullptr) warnings->push_back(std::move(message));
}

}  // namespace salbench
