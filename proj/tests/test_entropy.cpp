#include <cmath>
#include <numbers>

#include "doctest.h"
#include "epilab/calculus.hpp"
#include "epilab/convolution.hpp"
#include "epilab/entropy.hpp"
#include "epilab/errors.hpp"
#include "oracles.hpp"

using namespace epilab;
using doctest::Approx;

namespace {

std::vector<PiecewiseDensity> library() {
  return {truncated_pareto(1.0), truncated_pareto(2.0), truncated_pareto(8.0), pareto(2.0),
          pareto(3.0),           pareto(5.0),           gaussian(0.0, 1.0),    gaussian(3.0, 0.25),
          uniform(0.0, 1.0),     uniform(-2.0, 5.0),    exponential(1.0),      exponential(3.5)};
}

std::vector<PiecewiseDensity> finite_variance() {
  return {truncated_pareto(1.0), truncated_pareto(2.0), pareto(5.0), gaussian(0.0, 1.0),
          uniform(0.0, 1.0),     exponential(2.0)};
}

}  // namespace

TEST_CASE("differential_entropy examples") {
  const auto u = differential_entropy(uniform(0, 1));
  CHECK(u.h == 0.0);
  CHECK(u.method == EntropyMethod::closed_form);

  const auto tp = differential_entropy(truncated_pareto(2.0));
  CHECK(tp.h == Approx(std::numbers::ln2 + 1.0).epsilon(1e-15));
  CHECK(differential_entropy(gaussian(0, 1)).h == Approx(oracle::gaussian_entropy(1.0)).epsilon(1e-15));
  CHECK(differential_entropy(exponential(1)).h == Approx(1.0));
  CHECK(differential_entropy(pareto(2)).h == Approx(oracle::pareto_entropy(2)));

  for (const auto& d : library()) {
    const auto r = differential_entropy(d);
    CHECK(r.log_entropy_power == 2.0 * r.h);
  }
}

TEST_CASE("entropy_closed_form_truncated_pareto") {
  CHECK(entropy_closed_form_truncated_pareto(1.0) == 0.5);
  CHECK(entropy_closed_form_truncated_pareto(2.0) == Approx(1.6931472).epsilon(1e-7));
  CHECK(entropy_closed_form_truncated_pareto(300.0) == Approx(std::log(300.0) + 150.0));
  CHECK_THROWS_AS(entropy_closed_form_truncated_pareto(0.0), std::domain_error);
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const auto q = differential_entropy(truncated_pareto(t), 1e-10, EntropyRoute::quadrature_only);
    CAPTURE(t);
    CHECK(q.method == EntropyMethod::quadrature);
    CHECK(q.conclusive);
    CHECK(std::abs(q.h - entropy_closed_form_truncated_pareto(t)) <= 1e-8);
  }
}

TEST_CASE("quadrature entropies of the convolution densities") {
  const struct {
    double t, sum, diff;
  } cases[] = {{2.0, oracle::kSumEntropyT2, oracle::kDiffEntropyT2},
               {8.0, oracle::kSumEntropyT8, oracle::kDiffEntropyT8},
               {16.0, oracle::kSumEntropyT16, oracle::kDiffEntropyT16}};
  for (const auto& c : cases) {
    const auto s = differential_entropy(sum_density_truncated_pareto(c.t), 1e-10);
    const auto d = differential_entropy(diff_density_truncated_pareto(c.t), 1e-10);
    CAPTURE(c.t);
    CHECK(s.method == EntropyMethod::quadrature);
    CHECK(s.h == Approx(c.sum).epsilon(1e-9));
    CHECK(d.h == Approx(c.diff).epsilon(1e-9));
    CHECK(s.abs_error <= 1e-9);
  }
}

TEST_CASE("entropy_power") {
  CHECK(entropy_power(make_report(0.0, EntropyMethod::closed_form, 0.0)) == 1.0);
  CHECK(entropy_power(differential_entropy(truncated_pareto(2.0))) ==
        Approx(4.0 * std::exp(2.0)).epsilon(1e-14));
  CHECK(entropy_power(differential_entropy(gaussian(0, 1))) ==
        Approx(2.0 * std::numbers::pi * std::numbers::e).epsilon(1e-14));
  const auto big = differential_entropy(truncated_pareto(3000.0));
  CHECK(std::isinf(entropy_power(big)));
  CHECK(std::isfinite(big.log_entropy_power));
}

TEST_CASE("d_to_normality examples") {
  CHECK(d_to_normality(gaussian(0, 1)) == Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(d_to_normality(gaussian(-4, 9))) <= 1e-12);
  CHECK(d_to_normality(uniform(0, 1)) == Approx(oracle::kDistanceUniform).epsilon(1e-12));
  CHECK(d_to_normality(uniform(0, 1)) ==
        Approx(0.5 * std::log(std::numbers::pi * std::numbers::e / 6.0)).epsilon(1e-12));
  CHECK(d_to_normality(truncated_pareto(2.0)) == Approx(oracle::kDistanceToNormalityT2).epsilon(1e-12));
  const auto tri = convolve_numeric(uniform(0, 1), uniform(0, 1), Sign::plus);
  CHECK(d_to_normality(tri) == Approx(oracle::kDistanceTriangle).epsilon(1e-8));
  CHECK_THROWS_AS(d_to_normality(pareto(3.0)), InfiniteMomentError);
  CHECK_THROWS_AS(d_to_normality(pareto(2.5)), std::domain_error);
}

TEST_CASE("d_to_normality rejects inconsistent entropies") {
  const auto fake = make_report(10.0, EntropyMethod::quadrature, 0.0);
  CHECK_THROWS_AS(d_to_normality(uniform(0, 1), fake), NumericalError);
  // Within tolerance of zero is clipped, not rejected.
  const auto g = gaussian(0, 1);
  const auto nudged = make_report(oracle::gaussian_entropy(1.0) + 1e-10, EntropyMethod::quadrature, 0.0);
  CHECK(d_to_normality(g, nudged, 1e-8) == 0.0);
}

TEST_CASE("D grows with t for the truncated Pareto") {
  double previous = 0.0;
  for (double t : {2.0, 4.0, 8.0, 16.0, 40.0}) {
    const double d = d_to_normality(truncated_pareto(t));
    CAPTURE(t);
    CHECK(d > previous);
    previous = d;
  }
}

TEST_CASE("translation and scaling covariance") {
  for (const auto& d : library()) {
    const double h = differential_entropy(d, 1e-11, EntropyRoute::quadrature_only).h;
    CAPTURE(d.tag()->to_string());
    for (double c : {-3.0, 5.0}) {
      const auto shifted = affine_transform(d, 1.0, c);
      CHECK(std::abs(differential_entropy(shifted, 1e-11, EntropyRoute::quadrature_only).h - h) <= 1e-9);
      CHECK(std::abs(differential_entropy(shifted).h - h) <= 1e-9);
    }
    for (double a : {2.0, 1.0 / 3.0, -1.0}) {
      const auto scaled = affine_transform(d, a, 0.0);
      const double expected = h + std::log(std::abs(a));
      CHECK(std::abs(differential_entropy(scaled, 1e-11, EntropyRoute::quadrature_only).h - expected) <=
            1e-9);
      CHECK(std::abs(differential_entropy(scaled).h - expected) <= 1e-9);
    }
  }
}

TEST_CASE("affine invariance of D") {
  for (const auto& d : finite_variance()) {
    const double base = d_to_normality(d);
    for (auto [a, c] : {std::pair{2.0, 1.0}, std::pair{-0.5, 3.0}, std::pair{1.0 / 3.0, -7.0}}) {
      CAPTURE(d.tag()->to_string());
      CAPTURE(a);
      CHECK(std::abs(d_to_normality(affine_transform(d, a, c)) - base) <= 1e-8);
    }
  }
}

TEST_CASE("max-norm sandwich lower half") {
  auto all = library();
  all.push_back(sum_density_truncated_pareto(2.0));
  all.push_back(diff_density_truncated_pareto(2.0));
  all.push_back(sum_density_truncated_pareto(8.0));
  for (const auto& d : all) {
    CAPTURE(d.tag()->to_string());
    CHECK(differential_entropy(d).h >= -std::log(sup_density(d)) - 1e-9);
  }
}

TEST_CASE("closed form, quadrature and Monte Carlo agree") {
  for (const auto& d : library()) {
    const auto closed = differential_entropy(d);
    REQUIRE(closed.method == EntropyMethod::closed_form);
    const auto quad = differential_entropy(d, 1e-10, EntropyRoute::quadrature_only);
    const auto mc = entropy_mc(d, 1000000, 7);
    CAPTURE(d.tag()->to_string());
    CHECK(quad.conclusive);
    CHECK(std::abs(closed.h - quad.h) <= 1e-8);
    CHECK(std::abs(mc.value - quad.h) <= 3.0 * mc.std_error + 1e-12);
  }
}

TEST_CASE("method names") {
  CHECK(to_string(EntropyMethod::closed_form) == "closed-form");
  CHECK(to_string(EntropyMethod::quadrature) == "quadrature");
  CHECK(to_string(EntropyMethod::monte_carlo) == "monte-carlo");
}
