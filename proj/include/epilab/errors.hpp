#pragma once

#include <stdexcept>
#include <string>

namespace epilab {

/// A moment needed by the caller does not exist (e.g. variance of a heavy Pareto tail).
class InfiniteMomentError : public std::domain_error {
 public:
  explicit InfiniteMomentError(const std::string& what) : std::domain_error(what) {}
};

/// The numerics produced something that cannot be trusted: NaN from an
/// integrand, a zero density at a sampled point, a negative distance to
/// normality beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace epilab
