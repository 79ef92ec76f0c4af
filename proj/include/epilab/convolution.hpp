#pragma once

// Densities of sums and differences of independent random variables.

#include "epilab/calculus.hpp"
#include "epilab/density.hpp"

namespace epilab {

enum class Sign { plus, minus };

/// Density g of X_b + Y_b for iid truncated Pareto X_b, Y_b on (1, b):
///   g(x) = 2 log(x - 1) / (x log^2 b)        on (2, b + 1)
///   g(x) = 2 log(b / (x - b)) / (x log^2 b)  on (b + 1, 2b)
PiecewiseDensity sum_density_truncated_pareto(double log_b);

/// Even density of X_b - Y_b on (-(b - 1), b - 1):
///   h(x) = log((b - |x|)(|x| + 1) / b) / (|x| log^2 b),  h(0) = (1 - 1/b) / log^2 b.
PiecewiseDensity diff_density_truncated_pareto(double log_b);

/// Below this |x| the difference density switches to its Taylor expansion.
double diff_density_series_cutoff(double log_b);

struct ConvolutionOptions {
  // Absolute tolerance of the quadrature performed at every evaluation.
  double abs_tol = 1e-13;
  std::size_t max_subdivisions = 2000;
};

/// Lazily evaluated density of X + Y (plus) or X - Y (minus). Each call
/// integrates f1(x -/+ y) f2(y) over the overlap, split at every knot of
/// both inputs. Interior knots of the result are the pairwise knot sums
/// (differences), so entropy quadrature splits where the result is not smooth.
PiecewiseDensity convolve_numeric(const PiecewiseDensity& d1, const PiecewiseDensity& d2, Sign sign,
                                  const ConvolutionOptions& options = {});

/// Density of X + Y (or X - Y) using a closed form when one exists
/// (Gaussian pairs, identical truncated Pareto pairs) and convolve_numeric otherwise.
PiecewiseDensity combine(const PiecewiseDensity& d1, const PiecewiseDensity& d2, Sign sign,
                         const ConvolutionOptions& options = {});

}  // namespace epilab
