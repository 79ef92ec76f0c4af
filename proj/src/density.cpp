#include "epilab/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "epilab/calculus.hpp"
#include "epilab/errors.hpp"

namespace epilab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* message) {
  if (!ok) {
    throw std::domain_error(message);
  }
}
}  // namespace

// --- tags and classification ------------------------------------------------

std::optional<double> FamilyTag::param(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) {
      return v;
    }
  }
  return std::nullopt;
}

std::string FamilyTag::to_string() const {
  std::ostringstream os;
  os.precision(12);
  os << family << '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    os << (i ? ", " : "") << params[i].first << '=' << params[i].second;
  }
  os << ')';
  return os.str();
}

ConvexityClassification ConvexityClassification::from_beta(double beta) {
  require(beta >= 1.0, "convexity exponent beta must be >= 1");
  ConvexityClassification c;
  c.beta = beta;
  c.kappa = std::isinf(beta) ? 0.0 : (beta > 1.0 ? -1.0 / (beta - 1.0) : -kInf);
  c.is_convex_measure = true;
  return c;
}

ConvexityClassification ConvexityClassification::log_concave() { return from_beta(kInf); }

ConvexityClassification ConvexityClassification::convex_unspecified() {
  ConvexityClassification c;
  c.kappa = -kInf;
  c.is_convex_measure = true;
  return c;
}

// --- PiecewiseDensity -------------------------------------------------------

struct PiecewiseDensity::Impl {
  std::vector<Piece> pieces;
  Symmetry symmetry;
  std::optional<FamilyTag> tag;
  std::optional<ConvexityClassification> classification;
  ClosedForms closed;
  double truncated_mass;
};

PiecewiseDensity::PiecewiseDensity(std::vector<Piece> pieces, Symmetry symmetry,
                                   std::optional<FamilyTag> tag,
                                   std::optional<ConvexityClassification> classification,
                                   ClosedForms closed, double truncated_mass) {
  if (pieces.empty()) {
    throw std::invalid_argument("a density needs at least one piece");
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.interval.lo < b.interval.lo; });
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Interval& iv = pieces[i].interval;
    if (!(iv.lo < iv.hi)) {
      throw std::invalid_argument("piece intervals must be nonempty");
    }
    if (i > 0 && pieces[i - 1].interval.hi > iv.lo) {
      throw std::invalid_argument("pieces must be pairwise disjoint");
    }
    if (!pieces[i].evaluator) {
      throw std::invalid_argument("piece without evaluator");
    }
    auto& knots = pieces[i].interior_knots;
    std::erase_if(knots, [&](double k) { return !iv.contains(k); });
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  }
  impl_ = std::make_shared<const Impl>(Impl{std::move(pieces), symmetry, std::move(tag),
                                            std::move(classification), std::move(closed),
                                            truncated_mass});
}

double PiecewiseDensity::operator()(double x) const {
  const auto& ps = impl_->pieces;
  auto it = std::upper_bound(ps.begin(), ps.end(), x,
                             [](double v, const Piece& p) { return v < p.interval.lo; });
  if (it == ps.begin()) {
    return 0.0;
  }
  --it;
  if (it->interval.contains(x)) {
    return it->evaluator(x);
  }
  // A knot shared by two adjacent pieces lies inside the support.
  if (x == it->interval.lo && it != ps.begin() && std::prev(it)->interval.hi == x) {
    return it->evaluator(x);
  }
  return 0.0;
}

const std::vector<Piece>& PiecewiseDensity::pieces() const { return impl_->pieces; }

Interval PiecewiseDensity::support() const {
  return {impl_->pieces.front().interval.lo, impl_->pieces.back().interval.hi};
}

Symmetry PiecewiseDensity::symmetry() const { return impl_->symmetry; }
const std::optional<FamilyTag>& PiecewiseDensity::tag() const { return impl_->tag; }
const std::optional<ConvexityClassification>& PiecewiseDensity::classification() const {
  return impl_->classification;
}
const ClosedForms& PiecewiseDensity::closed_forms() const { return impl_->closed; }
double PiecewiseDensity::truncated_mass() const { return impl_->truncated_mass; }

std::vector<double> PiecewiseDensity::knots() const {
  std::vector<double> ks;
  for (const auto& p : impl_->pieces) {
    ks.push_back(p.interval.lo);
    ks.insert(ks.end(), p.interior_knots.begin(), p.interior_knots.end());
    ks.push_back(p.interval.hi);
  }
  std::erase_if(ks, [](double k) { return !std::isfinite(k); });
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

// --- families ---------------------------------------------------------------

PiecewiseDensity truncated_pareto(double log_b) {
  require(log_b > 0.0, "truncated_pareto requires b > 1 (log b > 0)");
  const double t = log_b;
  const double b = std::exp(t);
  Piece piece{{1.0, b}, [t](double x) { return 1.0 / (x * t); }, Smoothness::none, {}};

  ClosedForms closed;
  closed.cdf = [t, b](double x) {
    if (x <= 1.0) return 0.0;
    if (x >= b) return 1.0;
    return std::log(x) / t;
  };
  closed.quantile = [t](double u) { return std::exp(t * u); };
  closed.entropy = std::log(t) + 0.5 * t;
  closed.sup = 1.0 / t;
  Moments m;
  m.mean = std::expm1(t) / t;
  m.second_moment = std::expm1(2.0 * t) / (2.0 * t);
  // Var = b^2 [ (1 - b^-2)/(2t) - ((1 - 1/b)/t)^2 ]
  const double one_minus_inv_b = -std::expm1(-t);
  const double scaled_var =
      -std::expm1(-2.0 * t) / (2.0 * t) - (one_minus_inv_b / t) * (one_minus_inv_b / t);
  m.log_variance = 2.0 * t + std::log(scaled_var);
  m.variance = std::exp(m.log_variance);
  closed.moments = m;

  return PiecewiseDensity({std::move(piece)}, Symmetry::none,
                          FamilyTag{"truncated_pareto", {{"log_b", t}}},
                          ConvexityClassification::convex_unspecified(), std::move(closed));
}

PiecewiseDensity pareto(double beta) {
  require(beta > 1.0, "pareto requires beta > 1");
  Piece piece{{1.0, kInf},
              [beta](double x) { return (beta - 1.0) * std::pow(x, -beta); },
              Smoothness::none,
              {}};
  ClosedForms closed;
  closed.cdf = [beta](double x) { return x <= 1.0 ? 0.0 : -std::expm1((1.0 - beta) * std::log(x)); };
  closed.quantile = [beta](double u) { return std::exp(-std::log1p(-u) / (beta - 1.0)); };
  closed.entropy = -std::log(beta - 1.0) + beta / (beta - 1.0);
  closed.sup = beta - 1.0;
  if (beta > 3.0) {
    Moments m;
    m.mean = (beta - 1.0) / (beta - 2.0);
    m.second_moment = (beta - 1.0) / (beta - 3.0);
    m.variance = m.second_moment - m.mean * m.mean;
    m.log_variance = std::log(m.variance);
    closed.moments = m;
  } else {
    closed.infinite_second_moment = true;
  }
  return PiecewiseDensity({std::move(piece)}, Symmetry::none, FamilyTag{"pareto", {{"beta", beta}}},
                          ConvexityClassification::from_beta(beta), std::move(closed));
}

PiecewiseDensity gaussian(double mu, double sigma2) {
  require(sigma2 > 0.0, "gaussian requires sigma2 > 0");
  const double sigma = std::sqrt(sigma2);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma2);
  const double half = kGaussianHalfWidthSigmas * sigma;
  Piece piece{{mu - half, mu + half},
              [=](double x) {
                const double z = (x - mu) / sigma;
                return norm * std::exp(-0.5 * z * z);
              },
              Smoothness::none,
              {mu}};
  ClosedForms closed;
  closed.cdf = [=](double x) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2)); };
  closed.quantile = [=](double u) {
    return mu - sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
  };
  closed.entropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * sigma2);
  closed.sup = norm;
  closed.moments = Moments{mu, sigma2 + mu * mu, sigma2, std::log(sigma2)};
  // Two-sided tail beyond 40 sigma.
  const double dropped = std::erfc(kGaussianHalfWidthSigmas / std::numbers::sqrt2);
  return PiecewiseDensity({std::move(piece)}, mu == 0.0 ? Symmetry::even_about_zero : Symmetry::none,
                          FamilyTag{"gaussian", {{"mu", mu}, {"sigma2", sigma2}}},
                          ConvexityClassification::log_concave(), std::move(closed), dropped);
}

PiecewiseDensity uniform(double a, double b) {
  require(a < b, "uniform requires a < b");
  const double w = b - a;
  Piece piece{{a, b}, [w](double) { return 1.0 / w; }, Smoothness::none, {}};
  ClosedForms closed;
  closed.cdf = [=](double x) { return std::clamp((x - a) / w, 0.0, 1.0); };
  closed.quantile = [=](double u) { return a + w * u; };
  closed.entropy = std::log(w);
  closed.sup = 1.0 / w;
  const double mean = 0.5 * (a + b);
  closed.moments = Moments{mean, w * w / 12.0 + mean * mean, w * w / 12.0, std::log(w * w / 12.0)};
  return PiecewiseDensity({std::move(piece)}, a == -b ? Symmetry::even_about_zero : Symmetry::none,
                          FamilyTag{"uniform", {{"a", a}, {"b", b}}},
                          ConvexityClassification::log_concave(), std::move(closed));
}

PiecewiseDensity exponential(double lambda) {
  require(lambda > 0.0, "exponential requires lambda > 0");
  Piece piece{{0.0, kExponentialCutoff / lambda},
              [lambda](double x) { return lambda * std::exp(-lambda * x); },
              Smoothness::none,
              {}};
  ClosedForms closed;
  closed.cdf = [lambda](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); };
  closed.quantile = [lambda](double u) { return -std::log1p(-u) / lambda; };
  closed.entropy = 1.0 - std::log(lambda);
  closed.sup = lambda;
  const double var = 1.0 / (lambda * lambda);
  closed.moments = Moments{1.0 / lambda, 2.0 * var, var, std::log(var)};
  return PiecewiseDensity({std::move(piece)}, Symmetry::none,
                          FamilyTag{"exponential", {{"lambda", lambda}}},
                          ConvexityClassification::log_concave(), std::move(closed),
                          std::exp(-kExponentialCutoff));
}

// --- operations -------------------------------------------------------------

double pdf(const PiecewiseDensity& d, double x) { return d(x); }

double sup_density(const PiecewiseDensity& d) {
  if (d.closed_forms().sup) {
    return *d.closed_forms().sup;
  }
  double best = 0.0;
  for (const auto& piece : d.pieces()) {
    const Interval iv = piece.interval;
    if (!std::isfinite(iv.width())) {
      throw std::domain_error("sup_density fallback needs bounded pieces");
    }
    // One-sided limits at the open endpoints.
    const double inset = 1e-12 * iv.width();
    best = std::max({best, piece.evaluator(iv.lo + inset), piece.evaluator(iv.hi - inset)});
    // Brent's method on -f over the piece (exact for monotone and unimodal pieces).
    std::vector<double> cuts{iv.lo};
    cuts.insert(cuts.end(), piece.interior_knots.begin(), piece.interior_knots.end());
    cuts.push_back(iv.hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      auto neg = [&](double x) { return -piece.evaluator(x); };
      const auto [x, fx] = boost::math::tools::brent_find_minima(neg, cuts[i] + inset,
                                                                 cuts[i + 1] - inset, 40);
      (void)x;
      best = std::max(best, -fx);
      if (i + 1 < cuts.size() - 1) {
        best = std::max(best, piece.evaluator(cuts[i + 1]));
      }
    }
    if (std::isinf(best)) {
      return best;
    }
  }
  return best;
}

Moments moments(const PiecewiseDensity& d) {
  const ClosedForms& closed = d.closed_forms();
  if (closed.infinite_second_moment) {
    throw InfiniteMomentError("second moment of " + (d.tag() ? d.tag()->to_string() : "density") +
                              " is infinite");
  }
  if (closed.moments) {
    return *closed.moments;
  }
  const std::vector<double> breaks = [&] {
    auto ks = d.knots();
    const Interval s = d.support();
    if (!std::isfinite(s.lo)) ks.insert(ks.begin(), s.lo);
    if (!std::isfinite(s.hi)) ks.push_back(s.hi);
    return ks;
  }();
  QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  const auto first = integrate_piecewise([&](double x) { return x * d(x); }, breaks, opts);
  const auto second = integrate_piecewise([&](double x) { return x * x * d(x); }, breaks, opts);
  if (!first.converged || !second.converged || !std::isfinite(second.value)) {
    throw InfiniteMomentError("moment quadrature did not converge");
  }
  Moments m;
  m.mean = first.value;
  m.second_moment = second.value;
  m.variance = second.value - first.value * first.value;
  m.log_variance = std::log(m.variance);
  return m;
}

PiecewiseDensity affine_transform(const PiecewiseDensity& d, double a, double c) {
  require(a != 0.0 && std::isfinite(a), "affine_transform requires a nonzero finite scale");
  const double abs_a = std::abs(a);
  auto map = [=](double x) { return a * x + c; };

  std::vector<Piece> pieces;
  for (const auto& p : d.pieces()) {
    Piece q;
    const double lo = map(p.interval.lo);
    const double hi = map(p.interval.hi);
    q.interval = {std::min(lo, hi), std::max(lo, hi)};
    q.evaluator = [f = p.evaluator, a, c, abs_a](double y) { return f((y - c) / a) / abs_a; };
    q.smoothness = p.smoothness;
    for (double k : p.interior_knots) {
      q.interior_knots.push_back(map(k));
    }
    pieces.push_back(std::move(q));
  }

  const ClosedForms& base = d.closed_forms();
  ClosedForms closed;
  if (base.cdf) {
    closed.cdf = [F = base.cdf, a, c](double y) {
      const double x = (y - c) / a;
      return a > 0.0 ? F(x) : 1.0 - F(x);
    };
  }
  if (base.quantile) {
    closed.quantile = [Q = base.quantile, a, c](double u) {
      return a > 0.0 ? a * Q(u) + c : a * Q(1.0 - u) + c;
    };
  }
  if (base.entropy) closed.entropy = *base.entropy + std::log(abs_a);
  if (base.sup) closed.sup = *base.sup / abs_a;
  if (base.moments) {
    const Moments& m = *base.moments;
    Moments t;
    t.mean = a * m.mean + c;
    t.variance = a * a * m.variance;
    t.log_variance = m.log_variance + 2.0 * std::log(abs_a);
    t.second_moment = t.variance + t.mean * t.mean;
    closed.moments = t;
  }
  closed.infinite_second_moment = base.infinite_second_moment;

  const Symmetry sym = (d.symmetry() == Symmetry::even_about_zero && c == 0.0)
                           ? Symmetry::even_about_zero
                           : Symmetry::none;
  FamilyTag tag{"affine[" + (d.tag() ? d.tag()->to_string() : std::string("density")) + "]",
                {{"a", a}, {"c", c}}};
  return PiecewiseDensity(std::move(pieces), sym, std::move(tag), d.classification(),
                          std::move(closed), d.truncated_mass());
}

double cdf(const PiecewiseDensity& d, double x) {
  if (d.closed_forms().cdf) {
    return d.closed_forms().cdf(x);
  }
  const Interval s = d.support();
  if (x <= s.lo) return 0.0;
  if (x >= s.hi) return 1.0;
  std::vector<double> breaks{s.lo};
  for (double k : d.knots()) {
    if (k > s.lo && k < x) breaks.push_back(k);
  }
  breaks.push_back(x);
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  const auto r = integrate_piecewise([&](double y) { return d(y); }, breaks, opts);
  return std::clamp(r.value, 0.0, 1.0);
}

double inverse_cdf(const PiecewiseDensity& d, double u) {
  require(u > 0.0 && u < 1.0, "inverse_cdf requires u in (0, 1)");
  if (d.closed_forms().quantile) {
    return d.closed_forms().quantile(u);
  }
  const Interval s = d.support();
  if (!std::isfinite(s.lo) || !std::isfinite(s.hi)) {
    throw std::domain_error("numeric inverse_cdf needs a bounded support");
  }
  auto residual = [&](double x) { return cdf(d, x) - u; };
  boost::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      residual, s.lo, s.hi, -u, 1.0 - u,
      [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); },
      max_iter);
  return 0.5 * (lo + hi);
}

}  // namespace epilab
