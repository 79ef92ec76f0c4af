#include "epilab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "epilab/convolution.hpp"
#include "epilab/calculus.hpp"
#include "epilab/entropy.hpp"

namespace epilab {
namespace {

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);  // no "-0"
  return buf;
}

ExperimentRow compute_row(double t, bool with_d_checks, double tol) {
  ExperimentRow row;
  row.t = t;
  const PiecewiseDensity x = truncated_pareto(t);
  const PiecewiseDensity sum = sum_density_truncated_pareto(t);
  const PiecewiseDensity diff = diff_density_truncated_pareto(t);

  const EntropyReport hx = differential_entropy(x, tol);
  const EntropyReport hs = differential_entropy(sum, tol);
  const EntropyReport hd = differential_entropy(diff, tol);

  row.h_X = hx.h;
  row.h_sum = hs.h;
  row.h_diff = hd.h;
  row.logH_X = hx.log_entropy_power;
  row.logH_sum = hs.log_entropy_power;
  row.logH_diff = hd.log_entropy_power;
  row.log_ratio_sum = row.logH_sum - row.logH_X;
  row.log_ratio_diff = row.logH_diff - row.logH_X;
  row.paper_lb_log_ratio = t / 3.0 - std::log(2.0 * t);
  row.conclusive = hx.conclusive && hs.conclusive && hd.conclusive;

  row.D_X = d_to_normality(x, hx, tol);
  row.D_sum = d_to_normality(sum, hs, tol);
  row.D_diff = d_to_normality(diff, hd, tol);

  row.verdicts = theorem3_verdicts(t, hs, hd, tol);
  if (with_d_checks) {
    const double slack_s = kSlackSafetyFactor * hs.abs_error;
    const double slack_d = kSlackSafetyFactor * hd.abs_error;
    row.verdicts.push_back(
        make_verdict("d_sum_below_d_x", row.D_sum, row.D_X, slack_s, tol, hs.conclusive, "D"));
    row.verdicts.push_back(
        make_verdict("d_diff_below_d_x", row.D_diff, row.D_X, slack_d, tol, hd.conclusive, "D"));
  }
  const nlohmann::json inputs =
      nlohmann::json::array({{{"family", "truncated_pareto"}, {"params", {{"log_b", t}}}}});
  for (auto& v : row.verdicts) {
    v.inputs = inputs;
    v.tolerances = {{"entropy_tol", tol}, {"slack_factor", kSlackSafetyFactor}};
  }
  row.all_bounds_hold = std::all_of(row.verdicts.begin(), row.verdicts.end(),
                                    [](const InequalityVerdict& v) { return v.holds(); });
  return row;
}

std::vector<ExperimentRow> run_grid(const std::vector<double>& t_grid, bool with_d_checks,
                                    const ExperimentOptions& options) {
  validate_grid(t_grid);
  std::vector<ExperimentRow> rows(t_grid.size());
  if (options.parallel) {
    std::vector<std::future<ExperimentRow>> jobs;
    for (double t : t_grid) {
      jobs.push_back(std::async(std::launch::async, compute_row, t, with_d_checks, options.tol));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      rows[i] = jobs[i].get();
    }
  } else {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      rows[i] = compute_row(t_grid[i], with_d_checks, options.tol);
    }
  }
  return rows;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw UsageError("not a boolean: " + s);
}

}  // namespace

void validate_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) {
    throw UsageError("t grid is empty");
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 2.0)) {
      throw UsageError("every grid point needs t = log b >= 2, got " + fmt12(t_grid[i]));
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw UsageError("t grid must be strictly ascending");
    }
  }
}

std::vector<ExperimentRow> run_divergence_experiment(const std::vector<double>& t_grid,
                                                     const ExperimentOptions& options) {
  return run_grid(t_grid, false, options);
}

std::vector<ExperimentRow> run_d_experiment(const std::vector<double>& t_grid,
                                            const ExperimentOptions& options) {
  return run_grid(t_grid, true, options);
}

ExperimentRow gaussian_control_row(const ExperimentOptions& options) {
  const PiecewiseDensity x = gaussian(0.0, 1.0);
  const PiecewiseDensity sum = combine(x, x, Sign::plus);
  const PiecewiseDensity diff = combine(x, x, Sign::minus);
  ExperimentRow row;
  const EntropyReport hx = differential_entropy(x, options.tol);
  const EntropyReport hs = differential_entropy(sum, options.tol);
  const EntropyReport hd = differential_entropy(diff, options.tol);
  row.h_X = hx.h;
  row.h_sum = hs.h;
  row.h_diff = hd.h;
  row.logH_X = hx.log_entropy_power;
  row.logH_sum = hs.log_entropy_power;
  row.logH_diff = hd.log_entropy_power;
  row.log_ratio_sum = row.logH_sum - row.logH_X;
  row.log_ratio_diff = row.logH_diff - row.logH_X;
  row.paper_lb_log_ratio = std::nan("");
  row.D_X = d_to_normality(x, hx, options.tol);
  row.D_sum = d_to_normality(sum, hs, options.tol);
  row.D_diff = d_to_normality(diff, hd, options.tol);
  row.all_bounds_hold = row.D_sum <= row.D_X && row.D_diff <= row.D_X;
  return row;
}

SuiteResult run_verification_suite(const VerifyOptions& options) {
  validate_grid(options.t_grid);
  CheckOptions check;
  check.tol = options.tol;
  SuiteResult out;
  auto add = [&](InequalityVerdict v) { out.verdicts.push_back(std::move(v)); };

  const PiecewiseDensity g = gaussian(0.0, 1.0);
  const PiecewiseDensity u = uniform(0.0, 1.0);
  const PiecewiseDensity e = exponential(1.0);
  const PiecewiseDensity tp = truncated_pareto(2.0);
  const std::vector<PiecewiseDensity> library{g, u, e, tp};

  for (std::size_t i = 0; i < library.size(); ++i) {
    for (std::size_t j = i; j < library.size(); ++j) {
      add(check_epi(library[i], library[j], check));
      add(check_epi_d_form(library[i], library[j], check));
    }
  }

  for (double beta : {2.0, 3.0, 5.0}) {
    const Lemma1Verdicts l = check_lemma1(pareto(beta), beta, beta, check);
    add(l.lower);
    add(l.upper);
  }
  for (const auto& d : {g, u, e, tp, truncated_pareto(1.0), pareto(2.0)}) {
    add(check_lemma1_lower(d, check));
  }

  for (const auto& d : {g, u, e}) {
    const PairVerdicts c = check_corollary1(d, check);
    add(c.diff);
    add(c.sum);
  }
  for (const auto& d : {g, u, e, truncated_pareto(1.0)}) {
    add(check_jensen_step(d, check));
    add(check_sum_difference_chain(d, check));
  }

  add(check_submodularity(g, g, g, check));
  {
    const PiecewiseDensity tp1 = truncated_pareto(1.0);
    add(check_submodularity(tp1, tp1, affine_transform(tp1, -1.0, 0.0), check));
  }

  // X - Y is Gaussian, resp. Laplace: both log-concave, so the hypothesis holds.
  for (const auto& d : {g, e}) {
    const PairVerdicts t2 = check_theorem2(d, 2.0, true, check);
    add(t2.diff);
    add(t2.sum);
  }
  {
    const PairVerdicts t2 = check_theorem2(truncated_pareto(40.0), 2.0, false, check);
    out.demonstrations.push_back(t2.diff);
    out.demonstrations.push_back(t2.sum);
  }

  for (double t : options.t_grid) {
    for (auto& v : check_theorem3_bounds(t, check)) {
      add(std::move(v));
    }
  }

  for (const auto& d : {g, u, e, tp, pareto(5.0)}) {
    const MCEstimate mc = entropy_mc(d, options.mc_samples, options.seed);
    const double h = *d.closed_forms().entropy;
    InequalityVerdict v = make_verdict("monte_carlo_agreement", std::abs(mc.value - h),
                                       3.0 * mc.std_error, 0.0, 0.0, true, "nats");
    v.inputs = nlohmann::json::array({{{"family", d.tag()->family}, {"label", d.tag()->to_string()}}});
    v.tolerances = {{"n_samples", options.mc_samples}, {"seed", options.seed}, {"sigmas", 3.0}};
    add(std::move(v));
  }
  return out;
}

int exit_code_for(const std::vector<InequalityVerdict>& verdicts) {
  bool inconclusive = false;
  for (const auto& v : verdicts) {
    if (v.status == VerdictStatus::violated) return 1;
    if (v.status == VerdictStatus::inconclusive) inconclusive = true;
  }
  return inconclusive ? 3 : 0;
}

int exit_code_for(const std::vector<ExperimentRow>& rows) {
  std::vector<InequalityVerdict> all;
  bool inconclusive = false;
  for (const auto& r : rows) {
    all.insert(all.end(), r.verdicts.begin(), r.verdicts.end());
    inconclusive = inconclusive || !r.conclusive;
  }
  const int code = exit_code_for(all);
  return code == 0 && inconclusive ? 3 : code;
}

std::string render_verdicts(const std::vector<InequalityVerdict>& verdicts, OutputFormat format) {
  if (format == OutputFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : verdicts) arr.push_back(to_json(v));
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "name,lhs,rhs,margin,slack,status\n";
  for (const auto& v : verdicts) {
    os << v.name << ',' << fmt12(v.lhs) << ',' << fmt12(v.rhs) << ',' << fmt12(v.margin) << ','
       << fmt12(v.numeric_slack) << ',' << to_string(v.status) << '\n';
  }
  return os.str();
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw UsageError("unknown format '" + name + "' (expected csv or json)");
}

std::string render(const std::vector<ExperimentRow>& rows, OutputFormat format) {
  if (rows.empty()) {
    throw UsageError("no rows to emit");
  }
  if (format == OutputFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      // Round through the 12-digit text form so CSV and JSON carry the same values.
      auto v = [](double x) { return std::stod(fmt12(x)); };
      arr.push_back({{"t", v(r.t)},
                     {"h_X", v(r.h_X)},
                     {"h_sum", v(r.h_sum)},
                     {"h_diff", v(r.h_diff)},
                     {"logH_X", v(r.logH_X)},
                     {"logH_sum", v(r.logH_sum)},
                     {"logH_diff", v(r.logH_diff)},
                     {"log_ratio_sum", v(r.log_ratio_sum)},
                     {"log_ratio_diff", v(r.log_ratio_diff)},
                     {"paper_lb_log_ratio", v(r.paper_lb_log_ratio)},
                     {"D_X", v(r.D_X)},
                     {"D_sum", v(r.D_sum)},
                     {"D_diff", v(r.D_diff)},
                     {"all_bounds_hold", r.all_bounds_hold}});
    }
    return arr.dump(2) + "\n";
  }
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    for (double v : {r.t, r.h_X, r.h_sum, r.h_diff, r.logH_X, r.logH_sum, r.logH_diff,
                     r.log_ratio_sum, r.log_ratio_diff, r.paper_lb_log_ratio, r.D_X, r.D_sum,
                     r.D_diff}) {
      os << fmt12(v) << ',';
    }
    os << (r.all_bounds_hold ? "true" : "false") << '\n';
  }
  return os.str();
}

void emit(const std::vector<ExperimentRow>& rows, OutputFormat format,
          const std::filesystem::path& path) {
  const std::string text = render(rows, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << text;
  out.flush();
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

std::vector<ExperimentRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw UsageError("CSV header mismatch");
  }
  std::vector<ExperimentRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 14) {
      throw UsageError("CSV row has " + std::to_string(cells.size()) + " fields, expected 14");
    }
    ExperimentRow r;
    double* fields[] = {&r.t,         &r.h_X,           &r.h_sum,          &r.h_diff,
                        &r.logH_X,    &r.logH_sum,      &r.logH_diff,      &r.log_ratio_sum,
                        &r.log_ratio_diff, &r.paper_lb_log_ratio, &r.D_X, &r.D_sum, &r.D_diff};
    for (std::size_t i = 0; i < 13; ++i) {
      *fields[i] = std::stod(cells[i]);
    }
    r.all_bounds_hold = parse_bool(cells[13]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ExperimentRow> parse_json(const std::string& text) {
  const auto arr = nlohmann::json::parse(text);
  std::vector<ExperimentRow> rows;
  for (const auto& j : arr) {
    ExperimentRow r;
    r.t = j.at("t");
    r.h_X = j.at("h_X");
    r.h_sum = j.at("h_sum");
    r.h_diff = j.at("h_diff");
    r.logH_X = j.at("logH_X");
    r.logH_sum = j.at("logH_sum");
    r.logH_diff = j.at("logH_diff");
    r.log_ratio_sum = j.at("log_ratio_sum");
    r.log_ratio_diff = j.at("log_ratio_diff");
    r.paper_lb_log_ratio = j.at("paper_lb_log_ratio");
    r.D_X = j.at("D_X");
    r.D_sum = j.at("D_sum");
    r.D_diff = j.at("D_diff");
    r.all_bounds_hold = j.at("all_bounds_hold");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace epilab
