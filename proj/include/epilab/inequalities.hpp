#pragma once

// Checkers for the entropy inequalities of the reverse-EPI study. Each
// returns a verdict recording both sides, the margin rhs - lhs (the
// inequality reads lhs <= rhs) and the numerical slack allowed for it.
//
// Entropy-power comparisons are made in log space: values labelled
// "log-H" are 2h, so nothing overflows at b = e^300.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "epilab/convolution.hpp"
#include "epilab/density.hpp"
#include "epilab/entropy.hpp"

namespace epilab {

enum class VerdictStatus { holds, violated, inconclusive };

std::string to_string(VerdictStatus status);

struct InequalityVerdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double numeric_slack = 0.0;
  VerdictStatus status = VerdictStatus::inconclusive;
  std::string units;  // "nats", "log-H" or "D"
  nlohmann::json inputs = nlohmann::json::array();
  nlohmann::json tolerances = nlohmann::json::object();

  bool holds() const { return status == VerdictStatus::holds; }
};

/// Serializes with the fields name, lhs, rhs, margin, slack, status, inputs, tolerances.
nlohmann::json to_json(const InequalityVerdict& verdict);

struct CheckOptions {
  // Entropy quadrature tolerance; also the band between holds and violated.
  double tol = 1e-8;
  ConvolutionOptions convolution;
};

/// Multiplier applied to the summed entropy errors to form numeric_slack.
inline constexpr double kSlackSafetyFactor = 4.0;

/// Classifies lhs <= rhs: holds when margin >= -slack, violated when
/// margin < -slack - report_tol, inconclusive in between or when any
/// contributing entropy failed to converge.
InequalityVerdict make_verdict(std::string name, double lhs, double rhs, double slack,
                               double report_tol, bool conclusive, std::string units);

/// H(X) + H(Y) <= H(X + Y), compared as log(H(X) + H(Y)) <= 2h(X + Y).
InequalityVerdict check_epi(const PiecewiseDensity& x, const PiecewiseDensity& y,
                            const CheckOptions& options = {});

struct Lemma1Verdicts {
  InequalityVerdict lower;
  InequalityVerdict upper;
};

/// log(1/||f||_inf) <= h(X) <= c + log(1/||f||_inf) with c = beta0/(beta0 - 1).
/// `beta` is the caller-asserted exponent of f = V^{-beta} (+inf for
/// log-concave); beta >= max(2, beta0) and beta0 > 1 are required.
Lemma1Verdicts check_lemma1(const PiecewiseDensity& d, double beta, double beta0,
                            const CheckOptions& options = {});

/// The general half of the max-norm sandwich: log(1/||f||_inf) <= h(X).
InequalityVerdict check_lemma1_lower(const PiecewiseDensity& d, const CheckOptions& options = {});

/// h(X + Y + Z) + h(Z) <= h(X + Z) + h(Y + Z).
InequalityVerdict check_submodularity(const PiecewiseDensity& x, const PiecewiseDensity& y,
                                      const PiecewiseDensity& z, const CheckOptions& options = {});

/// Jensen step: log(1/f_{X-Y}(0)) <= h(X), where f_{X-Y}(0) = integral of p^2.
InequalityVerdict check_jensen_step(const PiecewiseDensity& x, const CheckOptions& options = {});

/// h(X + Y) + h(X) <= 2 h(X - Y) for iid X, Y.
InequalityVerdict check_sum_difference_chain(const PiecewiseDensity& x,
                                             const CheckOptions& options = {});

struct PairVerdicts {
  InequalityVerdict diff;
  InequalityVerdict sum;
};

/// log-H form of H(X - Y) <= D H(X) and H(X + Y) <= D^2 H(X) with
/// log D = 2 beta0/(beta0 - 1). The shape hypothesis on X - Y is not
/// verified; `hypothesis_asserted` is recorded in the verdict inputs.
PairVerdicts check_theorem2(const PiecewiseDensity& x, double beta0, bool hypothesis_asserted,
                            const CheckOptions& options = {});

/// h(X - Y) <= h(X) + 1 and h(X + Y) <= h(X) + 2 for log-concave X (caller asserted).
PairVerdicts check_corollary1(const PiecewiseDensity& x, const CheckOptions& options = {});

/// D(X + Y) <= max(D(X), D(Y)).
InequalityVerdict check_epi_d_form(const PiecewiseDensity& x, const PiecewiseDensity& y,
                                   const CheckOptions& options = {});

/// Lower bounds from the truncated Pareto counterexample at b = e^t, t >= 2:
/// h(X+Y) > 2t/3 - log 2, 2h(X+Y) > log(1/2) + 4t/3,
/// 2h(X+Y) - 2h(X) > t/3 - log(2t), and the difference bound
/// h(X-Y) > (2/t^2)((t - log 2)^3/3 - (t - log 2)^2/2).
std::vector<InequalityVerdict> check_theorem3_bounds(double log_b, const CheckOptions& options = {});

/// As above, reusing already computed entropies of X+Y and X-Y.
std::vector<InequalityVerdict> theorem3_verdicts(double log_b, const EntropyReport& sum,
                                                 const EntropyReport& diff, double tol);

}  // namespace epilab
