#pragma once

#include <string>

#include "epilab/density.hpp"

namespace epilab {

enum class EntropyMethod { closed_form, quadrature, monte_carlo };

std::string to_string(EntropyMethod method);

/// Differential entropy in nats together with its entropy power in log
/// form (log H = 2h in dimension one).
struct EntropyReport {
  double h = 0.0;
  double log_entropy_power = 0.0;
  EntropyMethod method = EntropyMethod::quadrature;
  double abs_error = 0.0;
  // False when quadrature failed to converge; h is then only indicative.
  bool conclusive = true;
};

EntropyReport make_report(double h, EntropyMethod method, double abs_error, bool conclusive = true);

enum class EntropyRoute {
  automatic,       // closed form when the family provides one
  quadrature_only  // always integrate -p log p
};

EntropyReport differential_entropy(const PiecewiseDensity& d, double tol = 1e-8,
                                   EntropyRoute route = EntropyRoute::automatic);

/// log log b + (log b)/2, evaluated in t = log b.
double entropy_closed_form_truncated_pareto(double log_b);

/// e^{2h}. Overflows to +inf for large h; use report.log_entropy_power there.
double entropy_power(const EntropyReport& report);

/// D(X) = h(Z) - h(X) for the Gaussian Z with matching mean and variance.
/// Throws InfiniteMomentError for infinite variance and NumericalError when
/// the result is negative beyond `tol`.
double d_to_normality(const PiecewiseDensity& d, double tol = 1e-8);
double d_to_normality(const PiecewiseDensity& d, const EntropyReport& entropy, double tol = 1e-8);

}  // namespace epilab
