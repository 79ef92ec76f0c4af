#pragma once

// One-dimensional probability densities stored as ordered closed-form pieces.
//
// Every density is an immutable value: copies share the underlying pieces.
// Supports are open intervals and the density is 0 at every piece endpoint;
// suprema are one-sided limits.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epilab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo < x && x < hi; }
};

enum class Smoothness { none, log_singular, removable };
enum class Symmetry { none, even_about_zero };

/// One smooth piece of a density. `interior_knots` are points strictly
/// inside the interval where the evaluator is continuous but not smooth
/// (kinks, removable singularities); integrators split there.
struct Piece {
  Interval interval;
  std::function<double(double)> evaluator;
  Smoothness smoothness = Smoothness::none;
  std::vector<double> interior_knots;
};

/// Provenance of a density: the family name plus its parameters.
struct FamilyTag {
  std::string family;
  std::vector<std::pair<std::string, double>> params;

  std::optional<double> param(const std::string& key) const;
  std::string to_string() const;
};

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  // Stays finite when the variance itself overflows (truncated Pareto at huge b).
  double log_variance = 0.0;
};

/// Shape class of a density V^{-beta} with V convex, in dimension one.
struct ConvexityClassification {
  std::optional<double> beta;  // +inf for log-concave; unset when unknown
  double kappa = 0.0;          // -1/(beta - 1), 0 for log-concave, -inf for convex measures
  bool is_convex_measure = false;

  static ConvexityClassification from_beta(double beta);
  static ConvexityClassification log_concave();
  static ConvexityClassification convex_unspecified();
};

/// Optional analytic shortcuts attached by the family constructors.
struct ClosedForms {
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  std::optional<double> entropy;
  std::optional<double> sup;
  std::optional<Moments> moments;
  // Set when the second moment diverges; moments() then throws.
  bool infinite_second_moment = false;
};

class PiecewiseDensity {
 public:
  PiecewiseDensity(std::vector<Piece> pieces, Symmetry symmetry, std::optional<FamilyTag> tag,
                   std::optional<ConvexityClassification> classification = std::nullopt,
                   ClosedForms closed = {}, double truncated_mass = 0.0);

  double operator()(double x) const;

  const std::vector<Piece>& pieces() const;
  Interval support() const;
  Symmetry symmetry() const;
  const std::optional<FamilyTag>& tag() const;
  const std::optional<ConvexityClassification>& classification() const;
  const ClosedForms& closed_forms() const;
  /// Probability mass discarded by truncating an unbounded support.
  double truncated_mass() const;

  /// Sorted, deduplicated piece endpoints and interior knots (finite ones only).
  std::vector<double> knots() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Family constructors. Scale-like parameters must be positive; violations
// throw std::domain_error. The truncated Pareto family is parameterized by
// log_b = log b so that b = e^300 stays representable.
PiecewiseDensity truncated_pareto(double log_b);
PiecewiseDensity pareto(double beta);
PiecewiseDensity gaussian(double mu, double sigma2);
PiecewiseDensity uniform(double a, double b);
PiecewiseDensity exponential(double lambda);

/// Standard deviations kept on each side of a Gaussian; the dropped mass is below 1e-300.
inline constexpr double kGaussianHalfWidthSigmas = 40.0;
/// Exponential support is cut at kExponentialCutoff / lambda (tail mass e^-700).
inline constexpr double kExponentialCutoff = 700.0;

double pdf(const PiecewiseDensity& d, double x);
/// Essential supremum; +inf for unbounded densities.
double sup_density(const PiecewiseDensity& d);
Moments moments(const PiecewiseDensity& d);
/// Density of a*X + c.
PiecewiseDensity affine_transform(const PiecewiseDensity& d, double a, double c);
double cdf(const PiecewiseDensity& d, double x);
double inverse_cdf(const PiecewiseDensity& d, double u);

}  // namespace epilab
