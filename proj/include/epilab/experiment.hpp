#pragma once

// Grid experiments on the truncated Pareto family X_b, b = e^t: growth of
// H(X_b +/- Y_b)/H(X_b) and of the distance-to-normality gaps.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "epilab/inequalities.hpp"

namespace epilab {

struct ExperimentRow {
  double t = 0.0;  // log b
  double h_X = 0.0;
  double h_sum = 0.0;
  double h_diff = 0.0;
  double logH_X = 0.0;
  double logH_sum = 0.0;
  double logH_diff = 0.0;
  double log_ratio_sum = 0.0;
  double log_ratio_diff = 0.0;
  double paper_lb_log_ratio = 0.0;  // t/3 - log(2t)
  double D_X = 0.0;
  double D_sum = 0.0;
  double D_diff = 0.0;
  bool all_bounds_hold = false;

  // Not serialized.
  bool conclusive = true;
  std::vector<InequalityVerdict> verdicts;

  double gap_sum() const { return D_X - D_sum; }
  double gap_diff() const { return D_X - D_diff; }
  double slope_X() const { return D_X / t; }
  double slope_sum() const { return D_sum / t; }
};

struct ExperimentOptions {
  double tol = 1e-9;
  // Grid points are independent and may be evaluated concurrently.
  bool parallel = true;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks that the grid is nonempty, ascending and every t >= 2.
void validate_grid(const std::vector<double>& t_grid);

/// One row per t: h_X in closed form, h(X+Y) and h(X-Y) by quadrature, plus
/// the lower-bound verdicts of the counterexample. A quadrature failure marks
/// the row inconclusive instead of aborting the run.
std::vector<ExperimentRow> run_divergence_experiment(const std::vector<double>& t_grid,
                                                     const ExperimentOptions& options = {});

/// Same rows; the verdicts additionally include D(X+/-Y) <= D(X).
std::vector<ExperimentRow> run_d_experiment(const std::vector<double>& t_grid,
                                            const ExperimentOptions& options = {});

/// X, Y ~ N(0, 1): every D column is 0. t is set to 0.
ExperimentRow gaussian_control_row(const ExperimentOptions& options = {});

struct VerifyOptions {
  double tol = 1e-8;
  std::uint64_t seed = 7;
  std::size_t mc_samples = 200000;
  std::vector<double> t_grid = {2, 4, 8, 12, 16};
};

struct SuiteResult {
  // Verdicts whose hypotheses hold; a violation here means a bug.
  std::vector<InequalityVerdict> verdicts;
  // Bounds applied outside their hypotheses (the counterexample at work).
  std::vector<InequalityVerdict> demonstrations;
};

/// Runs every inequality checker over the library families.
SuiteResult run_verification_suite(const VerifyOptions& options = {});

/// 0 all hold, 1 any violated, 3 any inconclusive (violations win).
int exit_code_for(const std::vector<InequalityVerdict>& verdicts);
int exit_code_for(const std::vector<ExperimentRow>& rows);

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

inline constexpr const char* kCsvHeader =
    "t,h_X,h_sum,h_diff,logH_X,logH_sum,logH_diff,log_ratio_sum,log_ratio_diff,"
    "paper_lb_log_ratio,D_X,D_sum,D_diff,all_bounds_hold";

/// Renders rows; floats with 12 significant digits.
std::string render(const std::vector<ExperimentRow>& rows, OutputFormat format);

/// Writes render(rows, format) to `path`. Empty rows throw UsageError, an
/// unwritable path throws IoError.
void emit(const std::vector<ExperimentRow>& rows, OutputFormat format,
          const std::filesystem::path& path);

std::vector<ExperimentRow> parse_csv(const std::string& text);
std::vector<ExperimentRow> parse_json(const std::string& text);

/// Verdicts as a JSON array, or CSV with columns name,lhs,rhs,margin,slack,status.
std::string render_verdicts(const std::vector<InequalityVerdict>& verdicts, OutputFormat format);

}  // namespace epilab
