#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace steklame {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class ErrorKind {
  invalid_argument,
  singular_parametrization,
  self_intersection,
  orientation,
  invalid_offset,
  singular_kernel,
  insufficient_resolution,
  multiplicity,
  untrustworthy_pair,
  config,
  internal,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when fewer eigenpairs than requested survive the spurious filters.
/// Carries the survivor count so callers can decide how much to raise N.
class InsufficientResolution : public Error {
 public:
  InsufficientResolution(int requested, int survivors)
      : Error(ErrorKind::insufficient_resolution,
              "only " + std::to_string(survivors) + " of " +
                  std::to_string(requested) +
                  " eigenvalues survived filtering; increase the number of "
                  "sources"),
        requested_(requested),
        survivors_(survivors) {}

  int requested() const noexcept { return requested_; }
  int survivors() const noexcept { return survivors_; }

 private:
  int requested_;
  int survivors_;
};

}  // namespace steklame
