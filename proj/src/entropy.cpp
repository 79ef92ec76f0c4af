#include "epilab/entropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "epilab/calculus.hpp"
#include "epilab/errors.hpp"

namespace epilab {

std::string to_string(EntropyMethod method) {
  switch (method) {
    case EntropyMethod::closed_form:
      return "closed-form";
    case EntropyMethod::quadrature:
      return "quadrature";
    case EntropyMethod::monte_carlo:
      return "monte-carlo";
  }
  return "unknown";
}

EntropyReport make_report(double h, EntropyMethod method, double abs_error, bool conclusive) {
  return EntropyReport{h, 2.0 * h, method, abs_error, conclusive};
}

EntropyReport differential_entropy(const PiecewiseDensity& d, double tol, EntropyRoute route) {
  if (route == EntropyRoute::automatic && d.closed_forms().entropy) {
    return make_report(*d.closed_forms().entropy, EntropyMethod::closed_form, 0.0);
  }
  std::vector<double> breaks = d.knots();
  const Interval s = d.support();
  if (!std::isfinite(s.lo)) breaks.insert(breaks.begin(), s.lo);
  if (!std::isfinite(s.hi)) breaks.push_back(s.hi);

  QuadratureOptions opts;
  opts.abs_tol = tol;
  const QuadratureResult r = integrate_piecewise(entropy_integrand(d), breaks, opts);
  return make_report(r.value, EntropyMethod::quadrature, r.abs_error_estimate, r.converged);
}

double entropy_closed_form_truncated_pareto(double log_b) {
  if (!(log_b > 0.0)) {
    throw std::domain_error("truncated Pareto entropy requires b > 1");
  }
  return std::log(log_b) + 0.5 * log_b;
}

double entropy_power(const EntropyReport& report) { return std::exp(report.log_entropy_power); }

double d_to_normality(const PiecewiseDensity& d, const EntropyReport& entropy, double tol) {
  const Moments m = moments(d);
  if (!std::isfinite(m.log_variance)) {
    throw InfiniteMomentError("distance to normality needs a finite positive variance");
  }
  const double gaussian_h = 0.5 * (std::log(2.0 * std::numbers::pi * std::numbers::e) + m.log_variance);
  const double dist = gaussian_h - entropy.h;
  if (dist < -tol - entropy.abs_error) {
    throw NumericalError("distance to normality is negative (" + std::to_string(dist) + ")");
  }
  return std::max(dist, 0.0);
}

double d_to_normality(const PiecewiseDensity& d, double tol) {
  return d_to_normality(d, differential_entropy(d, tol), tol);
}

}  // namespace epilab
