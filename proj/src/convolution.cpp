#include "epilab/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace epilab {
namespace {

std::optional<double> log_b_of(const PiecewiseDensity& d) {
  if (d.tag() && d.tag()->family == "truncated_pareto") {
    return d.tag()->param("log_b");
  }
  return std::nullopt;
}

bool is_gaussian(const PiecewiseDensity& d) { return d.tag() && d.tag()->family == "gaussian"; }

}  // namespace

PiecewiseDensity sum_density_truncated_pareto(double log_b) {
  if (!(log_b > 0.0)) {
    throw std::domain_error("sum_density_truncated_pareto requires b > 1");
  }
  const double t = log_b;
  const double b = std::exp(t);
  const double scale = 2.0 / (t * t);
  Piece rising{{2.0, b + 1.0},
               [=](double x) { return scale * std::log(x - 1.0) / x; },
               Smoothness::log_singular,
               {}};
  // log(b / (x - b)) = -log1p((x - 2b) / b) keeps accuracy near x = 2b.
  // The log singularity at x = b sits just left of the piece; graded knots
  // b + e^j resolve the layer of width ~1 next to b + 1.
  std::vector<double> graded;
  for (double j = 1.0; j < t; j += 1.0) {
    graded.push_back(b + std::exp(j));
  }
  Piece falling{{b + 1.0, 2.0 * b},
                [=](double x) { return -scale * std::log1p((x - 2.0 * b) / b) / x; },
                Smoothness::log_singular,
                std::move(graded)};

  ClosedForms closed;
  const Moments& m = *truncated_pareto(t).closed_forms().moments;
  closed.moments = Moments{2.0 * m.mean, 2.0 * m.variance + 4.0 * m.mean * m.mean,
                           2.0 * m.variance, m.log_variance + std::log(2.0)};
  return PiecewiseDensity({std::move(rising), std::move(falling)}, Symmetry::none,
                          FamilyTag{"truncated_pareto_sum", {{"log_b", t}}}, std::nullopt,
                          std::move(closed));
}

double diff_density_series_cutoff(double log_b) {
  return 1e-6 * std::min(1.0, std::expm1(log_b));
}

PiecewiseDensity diff_density_truncated_pareto(double log_b) {
  if (!(log_b > 0.0)) {
    throw std::domain_error("diff_density_truncated_pareto requires b > 1");
  }
  const double t = log_b;
  const double b = std::exp(t);
  const double inv_b = std::exp(-t);
  const double bm1 = std::expm1(t);
  const double inv_t2 = 1.0 / (t * t);
  const double cutoff = diff_density_series_cutoff(t);
  // log((b - x)(x + 1)/b) / x = (1 - 1/b) - (1 + 1/b^2) x/2 + (1 - 1/b^3) x^2/3 - ...
  const double c0 = -std::expm1(-t);
  const double c1 = 0.5 * (1.0 + inv_b * inv_b);
  const double c2 = (1.0 - inv_b * inv_b * inv_b) / 3.0;
  Piece piece{{-bm1, bm1},
              [=](double x) {
                const double ax = std::abs(x);
                if (ax < cutoff) {
                  return (c0 - ax * (c1 - ax * c2)) * inv_t2;
                }
                // (b - x) loses all digits within ~1 of b once b > 2^53.
                return std::max(0.0, (std::log1p(-ax / b) + std::log1p(ax)) / ax * inv_t2);
              },
              Smoothness::removable,
              {0.0}};

  ClosedForms closed;
  closed.sup = c0 * inv_t2;
  const Moments& m = *truncated_pareto(t).closed_forms().moments;
  closed.moments = Moments{0.0, 2.0 * m.variance, 2.0 * m.variance, m.log_variance + std::log(2.0)};
  return PiecewiseDensity({std::move(piece)}, Symmetry::even_about_zero,
                          FamilyTag{"truncated_pareto_diff", {{"log_b", t}}}, std::nullopt,
                          std::move(closed));
}

PiecewiseDensity convolve_numeric(const PiecewiseDensity& d1, const PiecewiseDensity& d2, Sign sign,
                                  const ConvolutionOptions& options) {
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  const Interval s1 = d1.support();
  const Interval s2 = d2.support();
  const Interval support = sign == Sign::plus ? Interval{s1.lo + s2.lo, s1.hi + s2.hi}
                                              : Interval{s1.lo - s2.hi, s1.hi - s2.lo};
  if (!std::isfinite(support.lo) || !std::isfinite(support.hi)) {
    throw std::domain_error("convolve_numeric needs bounded supports");
  }

  std::vector<double> result_knots;
  const std::vector<double> k1 = d1.knots();
  const std::vector<double> k2 = d2.knots();
  for (double a : k1) {
    for (double b : k2) {
      result_knots.push_back(a + s * b);
    }
  }

  // For X + Y: f1(x - y) f2(y); for X - Y: f1(x + y) f2(y).
  auto evaluator = [d1, d2, s, k1, k2, options](double x) {
    QuadratureOptions qopts;
    qopts.abs_tol = options.abs_tol;
    qopts.max_subdivisions = options.max_subdivisions;
    auto integrand = [&](double y) { return d1(x - s * y) * d2(y); };

    // y-range where x - s*y lies in supp d1.
    const Interval s1 = d1.support();
    double lo = s > 0 ? x - s1.hi : s1.lo - x;
    double hi = s > 0 ? x - s1.lo : s1.hi - x;
    const Interval s2 = d2.support();
    lo = std::max(lo, s2.lo);
    hi = std::min(hi, s2.hi);
    if (!(lo < hi)) {
      return 0.0;
    }
    std::vector<double> breaks{lo};
    for (double k : k2) {
      if (k > lo && k < hi) breaks.push_back(k);
    }
    for (double k : k1) {
      const double y = s * (x - k);
      if (y > lo && y < hi) breaks.push_back(y);
    }
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    const QuadratureResult r = integrate_piecewise(integrand, breaks, qopts);
    return std::max(r.value, 0.0);
  };

  ClosedForms closed;
  const auto& m1 = d1.closed_forms().moments;
  const auto& m2 = d2.closed_forms().moments;
  if (m1 && m2) {
    Moments m;
    m.mean = m1->mean + s * m2->mean;
    m.variance = m1->variance + m2->variance;
    m.second_moment = m.variance + m.mean * m.mean;
    m.log_variance = std::log(m.variance);
    closed.moments = m;
  }

  const Symmetry symmetry =
      (sign == Sign::minus && d1.tag() && d2.tag() && d1.tag()->to_string() == d2.tag()->to_string())
          ? Symmetry::even_about_zero
          : Symmetry::none;
  FamilyTag tag{std::string(sign == Sign::plus ? "sum" : "difference") + "[" +
                    (d1.tag() ? d1.tag()->to_string() : "density") + ", " +
                    (d2.tag() ? d2.tag()->to_string() : "density") + "]",
                {}};
  Piece piece{support, std::move(evaluator), Smoothness::none, std::move(result_knots)};
  return PiecewiseDensity({std::move(piece)}, symmetry, std::move(tag), std::nullopt,
                          std::move(closed));
}

PiecewiseDensity combine(const PiecewiseDensity& d1, const PiecewiseDensity& d2, Sign sign,
                         const ConvolutionOptions& options) {
  if (is_gaussian(d1) && is_gaussian(d2)) {
    const double mu1 = *d1.tag()->param("mu");
    const double mu2 = *d2.tag()->param("mu");
    const double v = *d1.tag()->param("sigma2") + *d2.tag()->param("sigma2");
    return gaussian(sign == Sign::plus ? mu1 + mu2 : mu1 - mu2, v);
  }
  const auto t1 = log_b_of(d1);
  const auto t2 = log_b_of(d2);
  if (t1 && t2 && *t1 == *t2) {
    return sign == Sign::plus ? sum_density_truncated_pareto(*t1)
                              : diff_density_truncated_pareto(*t1);
  }
  return convolve_numeric(d1, d2, sign, options);
}

}  // namespace epilab
