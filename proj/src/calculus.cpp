#include "epilab/calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "epilab/errors.hpp"

namespace epilab {
namespace {

using GK21 = boost::math::quadrature::gauss_kronrod<double, 21>;
using G10 = boost::math::quadrature::gauss<double, 10>;

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  double roundoff;  // error attainable at best in double precision
  std::size_t transform;
};

struct WorseFirst {
  bool operator()(const Segment& a, const Segment& b) const { return a.error < b.error; }
};

class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const RealFunction& f, const QuadratureOptions& options)
      : f_(f), options_(options) {}

  void add_interval(double a, double b) {
    if (!(a < b)) {
      return;
    }
    const double ratio = options_.log_substitution_ratio;
    if (std::isinf(a) && std::isinf(b)) {
      add_interval(a, 0.0);
      add_interval(0.0, b);
    } else if (std::isinf(b)) {
      // x = a + (1 - s)/s
      add_segment(0.0, 1.0, [this, a](double s) {
        const double x = a + (1.0 - s) / s;
        return f_(x) / (s * s);
      });
    } else if (std::isinf(a)) {
      // x = b - (1 - s)/s
      add_segment(0.0, 1.0, [this, b](double s) {
        const double x = b - (1.0 - s) / s;
        return f_(x) / (s * s);
      });
    } else if (a >= 0.0) {
      if (a == 0.0 && b > ratio) {
        add_segment(0.0, 1.0, identity());
        add_log_segment(1.0, b);
      } else if (a > 0.0 && b / a > ratio) {
        add_log_segment(a, b);
      } else {
        add_segment(a, b, identity());
      }
    } else if (b <= 0.0) {
      if (b == 0.0 && -a > ratio) {
        add_segment(-1.0, 0.0, identity());
        add_negative_log_segment(a, -1.0);
      } else if (b < 0.0 && a / b > ratio) {
        add_negative_log_segment(a, b);
      } else {
        add_segment(a, b, identity());
      }
    } else if (std::max(-a, b) > ratio) {
      add_interval(a, 0.0);
      add_interval(0.0, b);
    } else {
      add_segment(a, b, identity());
    }
  }

  QuadratureResult run() {
    QuadratureResult result;
    double total_error = frozen_error_;
    double total_roundoff = 0.0;
    running_value_ = 0.0;
    for (const auto& s : heap_storage_) {
      total_error += s.error;
      total_roundoff += s.roundoff;
      running_value_ += s.value;
    }
    std::priority_queue<Segment, std::vector<Segment>, WorseFirst> heap(WorseFirst{},
                                                                        std::move(heap_storage_));
    // A request below the round-off floor is met once only round-off remains.
    auto tolerance = [&] {
      return std::max({options_.abs_tol, options_.rel_tol * std::abs(frozen_value_ + running_value_),
                       total_roundoff * (1.0 + 1e-9)});
    };

    while (!heap.empty() && total_error > tolerance() &&
           result.subdivisions < options_.max_subdivisions) {
      Segment worst = heap.top();
      heap.pop();
      const double mid = 0.5 * (worst.lo + worst.hi);
      if (!(worst.lo < mid && mid < worst.hi)) {
        // Cannot bisect further in floating point.
        frozen_value_ += worst.value;
        frozen_error_ += worst.error;
        frozen_roundoff_ += worst.roundoff;
        running_value_ -= worst.value;
        continue;
      }
      Segment left = evaluate(worst.lo, mid, worst.transform);
      Segment right = evaluate(mid, worst.hi, worst.transform);
      total_error += left.error + right.error - worst.error;
      total_roundoff += left.roundoff + right.roundoff - worst.roundoff;
      running_value_ += left.value + right.value - worst.value;
      heap.push(left);
      heap.push(right);
      ++result.subdivisions;
    }

    // Re-sum from scratch so the running updates do not accumulate drift.
    double value = frozen_value_;
    double error = frozen_error_;
    double roundoff = frozen_roundoff_;
    while (!heap.empty()) {
      value += heap.top().value;
      error += heap.top().error;
      roundoff += heap.top().roundoff;
      heap.pop();
    }
    result.value = value;
    result.abs_error_estimate = error;
    result.converged = error <= std::max({options_.abs_tol, options_.rel_tol * std::abs(value),
                                          roundoff * (1.0 + 1e-9)});
    return result;
  }

 private:
  std::size_t identity() {
    if (identity_index_ == kNone) {
      identity_index_ = transforms_.size();
      transforms_.emplace_back([this](double x) { return f_(x); });
    }
    return identity_index_;
  }

  void add_log_segment(double a, double b) {
    add_segment(std::log(a), std::log(b), [this](double u) {
      const double x = std::exp(u);
      return f_(x) * x;
    });
  }

  void add_negative_log_segment(double a, double b) {
    add_segment(std::log(-b), std::log(-a), [this](double u) {
      const double x = std::exp(u);
      return f_(-x) * x;
    });
  }

  void add_segment(double lo, double hi, RealFunction transformed) {
    transforms_.push_back(std::move(transformed));
    add_segment(lo, hi, transforms_.size() - 1);
  }

  void add_segment(double lo, double hi, std::size_t transform) {
    heap_storage_.push_back(evaluate(lo, hi, transform));
  }

  // One Gauss-Kronrod 10/21 panel with the QUADPACK error heuristic.
  Segment evaluate(double lo, double hi, std::size_t transform) const {
    const RealFunction& g = transforms_[transform];
    const auto& xk = GK21::abscissa();
    const auto& wk = GK21::weights();
    const auto& wg = G10::weights();
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 21> fv{};
    fv[0] = g(centre);
    for (std::size_t i = 1; i < xk.size(); ++i) {
      fv[2 * i - 1] = g(centre - half * xk[i]);
      fv[2 * i] = g(centre + half * xk[i]);
    }
    for (double v : fv) {
      if (!std::isfinite(v)) {
        throw NumericalError("integrand is not finite on (" + std::to_string(lo) + ", " +
                             std::to_string(hi) + ")");
      }
    }
    double kronrod = wk[0] * fv[0];
    double gauss = 0.0;
    double abs_sum = std::abs(kronrod);
    for (std::size_t i = 1; i < xk.size(); ++i) {
      const double pair = fv[2 * i - 1] + fv[2 * i];
      kronrod += wk[i] * pair;
      abs_sum += wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
      if (i % 2 == 1) {
        gauss += wg[i / 2] * pair;
      }
    }
    const double mean = 0.5 * kronrod;
    double asc = wk[0] * std::abs(fv[0] - mean);
    for (std::size_t i = 1; i < xk.size(); ++i) {
      asc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
    }
    const double value = kronrod * half;
    const double resabs = abs_sum * std::abs(half);
    const double resasc = asc * std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && error != 0.0) {
      error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double roundoff = 0.0;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
      roundoff = 50.0 * eps * resabs;
      error = std::max(roundoff, error);
    }
    return {lo, hi, value, error, roundoff, transform};
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const RealFunction& f_;
  QuadratureOptions options_;
  std::vector<RealFunction> transforms_;
  std::vector<Segment> heap_storage_;
  std::size_t identity_index_ = kNone;
  double frozen_value_ = 0.0;
  double frozen_error_ = 0.0;
  double frozen_roundoff_ = 0.0;
  double running_value_ = 0.0;
};

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

QuadratureResult integrate_piecewise(const RealFunction& f, std::span<const double> breaks,
                                     const QuadratureOptions& options) {
  if (breaks.size() < 2) {
    throw std::invalid_argument("integrate_piecewise needs at least two breaks");
  }
  if (!std::is_sorted(breaks.begin(), breaks.end())) {
    throw std::invalid_argument("integrate_piecewise breaks must be ascending");
  }
  AdaptiveIntegrator integrator(f, options);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    integrator.add_interval(breaks[i], breaks[i + 1]);
  }
  return integrator.run();
}

QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureOptions& options) {
  if (std::isnan(a) || std::isnan(b)) {
    throw std::invalid_argument("integration limits must not be NaN");
  }
  if (a == b) {
    return {0.0, 0.0, 0, true};
  }
  if (a > b) {
    QuadratureResult r = integrate(f, b, a, options);
    r.value = -r.value;
    return r;
  }
  const double breaks[] = {a, b};
  return integrate_piecewise(f, breaks, options);
}

QuadratureResult integrate(const RealFunction& f, double a, double b, double tol) {
  QuadratureOptions options;
  options.abs_tol = tol;
  return integrate(f, a, b, options);
}

RealFunction entropy_integrand(const PiecewiseDensity& d) {
  return [d](double x) {
    const double p = d(x);
    return p > 0.0 ? -p * std::log(p) : 0.0;
  };
}

double uniform_variate(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t z = mix64(mix64(seed) + (index + 1) * 0x9e3779b97f4a7c15ULL);
  // 53 random bits, centred in their cell so the result is never 0 or 1.
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample(const PiecewiseDensity& d, std::size_t n, std::uint64_t seed) {
  std::vector<double> xs(n);
  const auto& quantile = d.closed_forms().quantile;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform_variate(seed, i);
    xs[i] = quantile ? quantile(u) : inverse_cdf(d, u);
  }
  return xs;
}

MCEstimate entropy_mc(const PiecewiseDensity& d, std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("entropy_mc needs at least two samples");
  }
  const std::vector<double> xs = sample(d, n, seed);
  // Welford running mean and squared deviation.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    const double p = d(x);
    if (!(p > 0.0)) {
      throw NumericalError("density vanishes at sampled point " + std::to_string(x));
    }
    const double v = -std::log(p);
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  const double variance = m2 / static_cast<double>(n - 1);
  MCEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(variance / static_cast<double>(n));
  est.n_samples = n;
  est.seed = seed;
  return est;
}

}  // namespace epilab
