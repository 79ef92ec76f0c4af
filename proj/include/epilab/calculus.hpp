#pragma once

// Adaptive quadrature, deterministic inverse-cdf sampling and the Monte
// Carlo entropy estimator used to cross-check quadrature results.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "epilab/density.hpp"

namespace epilab {

using RealFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t subdivisions = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_subdivisions = 4000;
  // Segments whose endpoint ratio exceeds this are integrated in u = log x.
  double log_substitution_ratio = 1e4;
};

/// Globally adaptive Gauss-Kronrod (21 point) quadrature. Endpoints are
/// never evaluated, so open intervals and log-singular endpoints need no
/// special treatment. Infinite endpoints are mapped onto (0, 1). A NaN from
/// `f` throws NumericalError.
QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureOptions& options = {});
QuadratureResult integrate(const RealFunction& f, double a, double b, double tol);

/// Integrates over (breaks.front(), breaks.back()), splitting at every
/// interior break. The error budget is shared by all segments.
QuadratureResult integrate_piecewise(const RealFunction& f, std::span<const double> breaks,
                                     const QuadratureOptions& options = {});

/// x -> -p(x) log p(x), with 0 log 0 = 0.
RealFunction entropy_integrand(const PiecewiseDensity& d);

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// The i-th uniform variate in (0, 1) of the stream identified by `seed`.
/// Counter based, so any index range can be generated independently.
double uniform_variate(std::uint64_t seed, std::uint64_t index);

std::vector<double> sample(const PiecewiseDensity& d, std::size_t n, std::uint64_t seed);

/// Estimates h = E[-log p(X)] from n inverse-cdf samples.
MCEstimate entropy_mc(const PiecewiseDensity& d, std::size_t n, std::uint64_t seed);

}  // namespace epilab
