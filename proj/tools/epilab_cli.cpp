// Command-line runner for the truncated Pareto experiments and the
// inequality suite.
//
//   epilab divergence --t-grid 2,4,8,12,16 --tol 1e-9 --out rows.csv
//   epilab dgap --format json
//   epilab verify --seed 7
//
// Exit codes: 0 all checks hold, 1 a bound is violated, 2 usage or I/O
// error, 3 numerically inconclusive.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epilab/experiment.hpp"

namespace {

struct CommonFlags {
  std::vector<double> t_grid{2, 4, 8, 12, 16};
  double tol = 1e-9;
  std::uint64_t seed = 7;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--t-grid", flags.t_grid, "Grid of t = log b values (ascending, each >= 2)")
      ->delimiter(',');
  cmd->add_option("--tol", flags.tol, "Absolute quadrature tolerance for entropies")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Seed for the Monte Carlo cross-checks");
  cmd->add_option("--out", flags.out, "Output file (stdout when omitted)");
  cmd->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void write(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw epilab::IoError("cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw epilab::IoError("failed writing " + path);
}

void emit_rows(const std::vector<epilab::ExperimentRow>& rows, const CommonFlags& flags) {
  const auto format = epilab::parse_format(flags.format);
  if (flags.out.empty()) {
    write(epilab::render(rows, format), "");
  } else {
    epilab::emit(rows, format, flags.out);
  }
}

void print_dgap_summary(const std::vector<epilab::ExperimentRow>& rows, double tol) {
  epilab::ExperimentOptions opts;
  opts.tol = tol;
  const auto control = epilab::gaussian_control_row(opts);
  std::fprintf(stderr, "gaussian control: D_X=%.3g D_sum=%.3g D_diff=%.3g\n", control.D_X,
               control.D_sum, control.D_diff);
  std::fprintf(stderr, "%8s %14s %14s %12s %12s\n", "t", "D_X-D_sum", "D_X-D_diff", "D_X/t",
               "D_sum/t");
  for (const auto& r : rows) {
    std::fprintf(stderr, "%8.4g %14.8g %14.8g %12.8g %12.8g\n", r.t, r.gap_sum(), r.gap_diff(),
                 r.slope_X(), r.slope_sum());
  }
  const auto& last = rows.back();
  std::fprintf(stderr,
               "slopes at t=%g: D_X/t=%.6g (asymptotic claim 1.5), D_sum/t=%.6g (claim 4/3)\n",
               last.t, last.slope_X(), last.slope_sum());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy power inequality laboratory: truncated Pareto experiments"};
  app.require_subcommand(1);

  CommonFlags divergence_flags;
  auto* divergence = app.add_subcommand("divergence", "Growth of H(X_b +/- Y_b)/H(X_b) over a t grid");
  add_common(divergence, divergence_flags);

  CommonFlags dgap_flags;
  auto* dgap = app.add_subcommand("dgap", "Distance-to-normality gaps D(X_b) - D(X_b +/- Y_b)");
  add_common(dgap, dgap_flags);

  CommonFlags verify_flags;
  verify_flags.tol = 1e-8;
  verify_flags.format = "json";
  std::size_t mc_samples = 200000;
  auto* verify = app.add_subcommand("verify", "Run the full inequality suite");
  add_common(verify, verify_flags);
  verify->add_option("--mc-samples", mc_samples, "Samples per Monte Carlo entropy check")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*divergence || *dgap) {
      const bool is_dgap = static_cast<bool>(*dgap);
      const CommonFlags& flags = is_dgap ? dgap_flags : divergence_flags;
      epilab::ExperimentOptions opts;
      opts.tol = flags.tol;
      const auto rows = is_dgap ? epilab::run_d_experiment(flags.t_grid, opts)
                                : epilab::run_divergence_experiment(flags.t_grid, opts);
      emit_rows(rows, flags);
      if (is_dgap) print_dgap_summary(rows, flags.tol);
      return epilab::exit_code_for(rows);
    }
    epilab::VerifyOptions opts;
    opts.tol = verify_flags.tol;
    opts.seed = verify_flags.seed;
    opts.mc_samples = mc_samples;
    opts.t_grid = verify_flags.t_grid;
    const auto suite = epilab::run_verification_suite(opts);
    write(epilab::render_verdicts(suite.verdicts, epilab::parse_format(verify_flags.format)),
          verify_flags.out);
    for (const auto& v : suite.demonstrations) {
      std::fprintf(stderr, "demonstration %s (hypothesis not met): margin %.6g -> %s\n",
                   v.name.c_str(), v.margin, epilab::to_string(v.status).c_str());
    }
    return epilab::exit_code_for(suite.verdicts);
  } catch (const epilab::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const epilab::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
