#include "epilab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "epilab/calculus.hpp"

namespace epilab {
namespace {

nlohmann::json describe(const PiecewiseDensity& d) {
  nlohmann::json j;
  if (!d.tag()) {
    j["family"] = "unnamed";
    j["params"] = nlohmann::json::object();
    return j;
  }
  j["family"] = d.tag()->family;
  j["params"] = nlohmann::json::object();
  for (const auto& [k, v] : d.tag()->params) {
    j["params"][k] = v;
  }
  return j;
}

nlohmann::json describe_all(std::initializer_list<const PiecewiseDensity*> ds) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto* d : ds) {
    arr.push_back(describe(*d));
  }
  return arr;
}

EntropyReport entropy_of(const PiecewiseDensity& d, const CheckOptions& options) {
  return differential_entropy(d, options.tol);
}

// Slack in nats for the listed reports.
double slack_nats(std::initializer_list<const EntropyReport*> reports) {
  double s = 0.0;
  for (const auto* r : reports) {
    s += r->abs_error;
  }
  return kSlackSafetyFactor * s;
}

bool all_conclusive(std::initializer_list<const EntropyReport*> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const EntropyReport* r) { return r->conclusive; });
}

void stamp(InequalityVerdict& v, nlohmann::json inputs, const CheckOptions& options) {
  v.inputs = std::move(inputs);
  v.tolerances = {{"entropy_tol", options.tol},
                   {"convolution_tol", options.convolution.abs_tol},
                   {"slack_factor", kSlackSafetyFactor}};
}

double sup_log_inverse(const PiecewiseDensity& d) {
  const double sup = sup_density(d);
  return -std::log(sup);
}

}  // namespace

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::holds:
      return "holds";
    case VerdictStatus::violated:
      return "violated";
    case VerdictStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

nlohmann::json to_json(const InequalityVerdict& v) {
  return {{"name", v.name},     {"lhs", v.lhs},
          {"rhs", v.rhs},       {"margin", v.margin},
          {"slack", v.numeric_slack}, {"status", to_string(v.status)},
          {"inputs", v.inputs}, {"tolerances", v.tolerances}};
}

InequalityVerdict make_verdict(std::string name, double lhs, double rhs, double slack,
                               double report_tol, bool conclusive, std::string units) {
  InequalityVerdict v;
  v.name = std::move(name);
  v.lhs = lhs;
  v.rhs = rhs;
  v.margin = rhs - lhs;
  v.numeric_slack = slack;
  v.units = std::move(units);
  if (!conclusive || std::isnan(v.margin)) {
    v.status = VerdictStatus::inconclusive;
  } else if (v.margin >= -slack) {
    v.status = VerdictStatus::holds;
  } else if (v.margin < -slack - report_tol) {
    v.status = VerdictStatus::violated;
  } else {
    v.status = VerdictStatus::inconclusive;
  }
  return v;
}

InequalityVerdict check_epi(const PiecewiseDensity& x, const PiecewiseDensity& y,
                            const CheckOptions& options) {
  const EntropyReport hx = entropy_of(x, options);
  const EntropyReport hy = entropy_of(y, options);
  const EntropyReport hs = entropy_of(combine(x, y, Sign::plus, options.convolution), options);
  // log(e^{2hx} + e^{2hy}) without overflow.
  const double a = hx.log_entropy_power;
  const double b = hy.log_entropy_power;
  const double lhs = std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
  InequalityVerdict v = make_verdict("epi", lhs, hs.log_entropy_power,
                                     2.0 * slack_nats({&hx, &hy, &hs}), 2.0 * options.tol,
                                     all_conclusive({&hx, &hy, &hs}), "log-H");
  stamp(v, describe_all({&x, &y}), options);
  return v;
}

Lemma1Verdicts check_lemma1(const PiecewiseDensity& d, double beta, double beta0,
                            const CheckOptions& options) {
  if (!(beta0 > 1.0)) {
    throw std::domain_error("check_lemma1 requires beta0 > 1");
  }
  if (!(beta >= std::max(2.0, beta0))) {
    throw std::domain_error("check_lemma1 requires beta >= max(n + 1, beta0 n) with n = 1");
  }
  const double c = beta0 / (beta0 - 1.0);
  const EntropyReport h = entropy_of(d, options);
  const double log_inv_sup = sup_log_inverse(d);
  const double slack = slack_nats({&h});
  const bool ok = h.conclusive;

  Lemma1Verdicts out{
      make_verdict("lemma1_lower", log_inv_sup, h.h, slack, options.tol, ok, "nats"),
      make_verdict("lemma1_upper", h.h, c + log_inv_sup, slack, options.tol, ok, "nats")};
  nlohmann::json inputs = describe_all({&d});
  inputs.push_back({{"beta", beta}, {"beta0", beta0}});
  stamp(out.lower, inputs, options);
  stamp(out.upper, inputs, options);
  return out;
}

InequalityVerdict check_lemma1_lower(const PiecewiseDensity& d, const CheckOptions& options) {
  const EntropyReport h = entropy_of(d, options);
  InequalityVerdict v = make_verdict("lemma1_lower", sup_log_inverse(d), h.h, slack_nats({&h}),
                                     options.tol, h.conclusive, "nats");
  stamp(v, describe_all({&d}), options);
  return v;
}

InequalityVerdict check_submodularity(const PiecewiseDensity& x, const PiecewiseDensity& y,
                                      const PiecewiseDensity& z, const CheckOptions& options) {
  const auto& conv = options.convolution;
  const PiecewiseDensity xy = combine(x, y, Sign::plus, conv);
  const EntropyReport hxyz = entropy_of(combine(xy, z, Sign::plus, conv), options);
  const EntropyReport hz = entropy_of(z, options);
  const EntropyReport hxz = entropy_of(combine(x, z, Sign::plus, conv), options);
  const EntropyReport hyz = entropy_of(combine(y, z, Sign::plus, conv), options);
  InequalityVerdict v = make_verdict("submodularity", hxyz.h + hz.h, hxz.h + hyz.h,
                                     slack_nats({&hxyz, &hz, &hxz, &hyz}), options.tol,
                                     all_conclusive({&hxyz, &hz, &hxz, &hyz}), "nats");
  stamp(v, describe_all({&x, &y, &z}), options);
  return v;
}

InequalityVerdict check_jensen_step(const PiecewiseDensity& x, const CheckOptions& options) {
  const EntropyReport h = entropy_of(x, options);
  std::vector<double> breaks = x.knots();
  const Interval s = x.support();
  if (!std::isfinite(s.lo)) breaks.insert(breaks.begin(), s.lo);
  if (!std::isfinite(s.hi)) breaks.push_back(s.hi);
  QuadratureOptions q;
  q.abs_tol = 0.0;
  q.rel_tol = options.tol;
  const QuadratureResult sq = integrate_piecewise(
      [&](double t) {
        const double p = x(t);
        return p * p;
      },
      breaks, q);
  const double lhs = -std::log(sq.value);
  const double slack = slack_nats({&h}) + kSlackSafetyFactor * sq.abs_error_estimate / sq.value;
  InequalityVerdict v = make_verdict("jensen_step", lhs, h.h, slack, options.tol,
                                     h.conclusive && sq.converged, "nats");
  stamp(v, describe_all({&x}), options);
  return v;
}

InequalityVerdict check_sum_difference_chain(const PiecewiseDensity& x, const CheckOptions& options) {
  const EntropyReport hx = entropy_of(x, options);
  const EntropyReport hs = entropy_of(combine(x, x, Sign::plus, options.convolution), options);
  const EntropyReport hd = entropy_of(combine(x, x, Sign::minus, options.convolution), options);
  InequalityVerdict v = make_verdict("sum_difference_chain", hs.h + hx.h, 2.0 * hd.h,
                                     slack_nats({&hx, &hs, &hd, &hd}), options.tol,
                                     all_conclusive({&hx, &hs, &hd}), "nats");
  stamp(v, describe_all({&x}), options);
  return v;
}

PairVerdicts check_theorem2(const PiecewiseDensity& x, double beta0, bool hypothesis_asserted,
                            const CheckOptions& options) {
  if (!(beta0 > 1.0)) {
    throw std::domain_error("check_theorem2 requires beta0 > 1");
  }
  const double log_d = 2.0 * beta0 / (beta0 - 1.0);
  const EntropyReport hx = entropy_of(x, options);
  const EntropyReport hs = entropy_of(combine(x, x, Sign::plus, options.convolution), options);
  const EntropyReport hd = entropy_of(combine(x, x, Sign::minus, options.convolution), options);
  PairVerdicts out{
      make_verdict("theorem2_diff", hd.log_entropy_power, hx.log_entropy_power + log_d,
                   2.0 * slack_nats({&hx, &hd}), 2.0 * options.tol, all_conclusive({&hx, &hd}),
                   "log-H"),
      make_verdict("theorem2_sum", hs.log_entropy_power, hx.log_entropy_power + 2.0 * log_d,
                   2.0 * slack_nats({&hx, &hs}), 2.0 * options.tol, all_conclusive({&hx, &hs}),
                   "log-H")};
  nlohmann::json inputs = describe_all({&x});
  inputs.push_back({{"beta0", beta0}, {"difference_shape_hypothesis_asserted", hypothesis_asserted}});
  stamp(out.diff, inputs, options);
  stamp(out.sum, inputs, options);
  return out;
}

PairVerdicts check_corollary1(const PiecewiseDensity& x, const CheckOptions& options) {
  const EntropyReport hx = entropy_of(x, options);
  const EntropyReport hs = entropy_of(combine(x, x, Sign::plus, options.convolution), options);
  const EntropyReport hd = entropy_of(combine(x, x, Sign::minus, options.convolution), options);
  PairVerdicts out{make_verdict("corollary1_diff", hd.h, hx.h + 1.0, slack_nats({&hx, &hd}),
                                options.tol, all_conclusive({&hx, &hd}), "nats"),
                   make_verdict("corollary1_sum", hs.h, hx.h + 2.0, slack_nats({&hx, &hs}),
                                options.tol, all_conclusive({&hx, &hs}), "nats")};
  nlohmann::json inputs = describe_all({&x});
  inputs.push_back({{"log_concave_asserted", true}});
  stamp(out.diff, inputs, options);
  stamp(out.sum, inputs, options);
  return out;
}

InequalityVerdict check_epi_d_form(const PiecewiseDensity& x, const PiecewiseDensity& y,
                                   const CheckOptions& options) {
  const PiecewiseDensity s = combine(x, y, Sign::plus, options.convolution);
  const EntropyReport hx = entropy_of(x, options);
  const EntropyReport hy = entropy_of(y, options);
  const EntropyReport hs = entropy_of(s, options);
  const double dx = d_to_normality(x, hx, options.tol);
  const double dy = d_to_normality(y, hy, options.tol);
  const double ds = d_to_normality(s, hs, options.tol);
  InequalityVerdict v = make_verdict("epi_d_form", ds, std::max(dx, dy),
                                     slack_nats({&hx, &hy, &hs}), options.tol,
                                     all_conclusive({&hx, &hy, &hs}), "D");
  stamp(v, describe_all({&x, &y}), options);
  return v;
}

std::vector<InequalityVerdict> theorem3_verdicts(double log_b, const EntropyReport& sum,
                                                 const EntropyReport& diff, double tol) {
  const double t = log_b;
  const double h_x = entropy_closed_form_truncated_pareto(t);
  const double ln2 = std::numbers::ln2;
  const double l = t - ln2;  // log(b/2)
  const double diff_bound = 2.0 / (t * t) * (l * l * l / 3.0 - l * l / 2.0);
  const double s_sum = slack_nats({&sum});
  const double s_diff = slack_nats({&diff});
  std::vector<InequalityVerdict> out;
  out.push_back(make_verdict("theorem3_sum_entropy", 2.0 * t / 3.0 - ln2, sum.h, s_sum, tol,
                             sum.conclusive, "nats"));
  out.push_back(make_verdict("theorem3_sum_entropy_power", std::log(0.5) + 4.0 * t / 3.0,
                             sum.log_entropy_power, 2.0 * s_sum, 2.0 * tol, sum.conclusive, "log-H"));
  out.push_back(make_verdict("theorem3_sum_ratio", t / 3.0 - std::log(2.0 * t),
                             sum.log_entropy_power - 2.0 * h_x, 2.0 * s_sum, 2.0 * tol,
                             sum.conclusive, "log-H"));
  out.push_back(make_verdict("theorem3_diff_entropy", diff_bound, diff.h, s_diff, tol,
                             diff.conclusive, "nats"));
  return out;
}

std::vector<InequalityVerdict> check_theorem3_bounds(double log_b, const CheckOptions& options) {
  if (!(log_b >= 2.0)) {
    throw std::domain_error("check_theorem3_bounds requires log b >= 2");
  }
  const EntropyReport sum = entropy_of(sum_density_truncated_pareto(log_b), options);
  const EntropyReport diff = entropy_of(diff_density_truncated_pareto(log_b), options);
  std::vector<InequalityVerdict> out = theorem3_verdicts(log_b, sum, diff, options.tol);
  const nlohmann::json inputs =
      nlohmann::json::array({{{"family", "truncated_pareto"}, {"params", {{"log_b", log_b}}}}});
  for (auto& v : out) {
    stamp(v, inputs, options);
  }
  return out;
}

}  // namespace epilab
