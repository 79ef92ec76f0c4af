#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "epilab/calculus.hpp"
#include "epilab/density.hpp"
#include "epilab/errors.hpp"
#include "oracles.hpp"
#include "probes.hpp"

using namespace epilab;
using doctest::Approx;

namespace {

std::vector<PiecewiseDensity> library() {
  return {truncated_pareto(1.0), truncated_pareto(2.0), truncated_pareto(8.0), pareto(2.0),
          pareto(3.0),           pareto(5.0),           gaussian(0.0, 1.0),    gaussian(3.0, 0.25),
          uniform(0.0, 1.0),     uniform(-2.0, 5.0),    exponential(1.0),      exponential(3.5)};
}

double total_mass(const PiecewiseDensity& d) {
  std::vector<double> breaks = d.knots();
  if (!std::isfinite(d.support().lo)) breaks.insert(breaks.begin(), d.support().lo);
  if (!std::isfinite(d.support().hi)) breaks.push_back(d.support().hi);
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  return integrate_piecewise([&](double x) { return d(x); }, breaks, o).value;
}

}  // namespace

TEST_CASE("truncated pareto density values") {
  const double e = std::numbers::e;
  CHECK(pdf(truncated_pareto(1.0), 2.0) == Approx(0.5).epsilon(1e-15));
  CHECK(pdf(truncated_pareto(2.0), std::nextafter(1.0, 0.0)) == 0.0);
  CHECK(pdf(truncated_pareto(2.0), 1.0) == 0.0);
  CHECK(pdf(truncated_pareto(2.0), e) == Approx(1.0 / (2.0 * e)).epsilon(1e-15));
  CHECK(pdf(truncated_pareto(2.0), 0.1839397) == 0.0);

  const auto d = truncated_pareto(2.0);
  const double mass = integrate([&](double x) { return d(x); }, 1.0, std::exp(2.0), 1e-12).value;
  CHECK(std::abs(mass - 1.0) <= 1e-10);
  CHECK(oracle::tanh_sinh([](double x) { return 1.0 / (2.0 * x); }, 1.0, std::exp(2.0)) ==
        Approx(1.0).epsilon(1e-13));
}

TEST_CASE("truncated pareto rejects b <= 1") {
  CHECK_THROWS_AS(truncated_pareto(0.0), std::domain_error);
  CHECK_THROWS_AS(truncated_pareto(-1.0), std::domain_error);
}

TEST_CASE("pareto density") {
  CHECK(pdf(pareto(2.0), 2.0) == Approx(0.25));
  CHECK(sup_density(pareto(3.0)) == Approx(2.0));
  CHECK(std::abs(total_mass(pareto(2.0)) - 1.0) <= 1e-10);
  CHECK(oracle::exp_sinh([](double x) { return std::pow(x, -2.0); }, 1.0) == Approx(1.0));
  CHECK_THROWS_AS(pareto(1.0), std::domain_error);
  CHECK_THROWS_AS(pareto(0.5), std::domain_error);
}

TEST_CASE("log-concave families") {
  CHECK(pdf(gaussian(0, 1), 0.0) == Approx(0.3989422804).epsilon(1e-10));
  CHECK(pdf(gaussian(0, 1), 1.0) == Approx(0.2419707245).epsilon(1e-9));
  CHECK(pdf(uniform(0, 1), 0.5) == 1.0);
  CHECK(pdf(exponential(1.0), 1e-300) == Approx(1.0));
  CHECK(pdf(exponential(1.0), 0.0) == 0.0);  // open endpoint
  CHECK_THROWS_AS(gaussian(0, 0), std::domain_error);
  CHECK_THROWS_AS(gaussian(0, -1), std::domain_error);
  CHECK_THROWS_AS(uniform(1, 1), std::domain_error);
  CHECK_THROWS_AS(exponential(0), std::domain_error);

  const auto g = gaussian(2.0, 4.0);
  CHECK(g.support().lo == Approx(2.0 - 80.0));
  CHECK(g.support().hi == Approx(2.0 + 80.0));
  CHECK(g.truncated_mass() < 1e-300);
  CHECK(exponential(2.0).truncated_mass() < 1e-300);
}

TEST_CASE("sup_density") {
  CHECK(sup_density(truncated_pareto(2.0)) == Approx(0.5));
  CHECK(sup_density(uniform(0, 1)) == 1.0);
  CHECK(sup_density(gaussian(0, 1)) == Approx(0.3989422804));

  // Fallback path: strip the closed forms by building the density by hand.
  Piece p{{0.0, 2.0}, [](double x) { return x < 1.0 ? 0.5 * x + 0.25 : 1.25 - 0.5 * x; },
          Smoothness::none, {1.0}};
  const PiecewiseDensity tent({p}, Symmetry::none, std::nullopt);
  CHECK(sup_density(tent) == Approx(0.75).epsilon(1e-9));
  Piece q{{1.0, 5.0}, [](double x) { return 0.25 / std::sqrt(x - 0.5); }, Smoothness::none, {}};
  const PiecewiseDensity decreasing({q}, Symmetry::none, std::nullopt);
  CHECK(sup_density(decreasing) == Approx(0.25 / std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("moments") {
  const auto m = moments(truncated_pareto(2.0));
  CHECK(m.mean == Approx(3.1945280494653).epsilon(1e-12));
  CHECK(m.second_moment == Approx(13.399537508286).epsilon(1e-12));
  CHECK(m.variance == Approx(m.second_moment - m.mean * m.mean).epsilon(1e-12));
  CHECK(moments(uniform(0, 1)).variance == Approx(1.0 / 12.0));
  CHECK_THROWS_AS(moments(pareto(3.0)), InfiniteMomentError);
  CHECK_THROWS_AS(moments(pareto(2.0)), InfiniteMomentError);
  CHECK(moments(pareto(5.0)).variance == Approx(4.0 / 2.0 - (4.0 / 3.0) * (4.0 / 3.0)));

  // log_variance stays finite where the variance overflows.
  const auto huge = moments(truncated_pareto(400.0));
  CHECK(std::isinf(huge.variance));
  CHECK(huge.log_variance == Approx(800.0 + std::log(1.0 / 800.0 - 1.0 / 160000.0)).epsilon(1e-12));

  // Quadrature path agrees with the closed form.
  const auto d = truncated_pareto(3.0);
  const PiecewiseDensity bare(std::vector<Piece>(d.pieces()), Symmetry::none, std::nullopt);
  const auto q = moments(bare);
  CHECK(q.mean == Approx(moments(d).mean).epsilon(1e-10));
  CHECK(q.variance == Approx(moments(d).variance).epsilon(1e-9));
}

TEST_CASE("affine_transform") {
  const auto shifted = affine_transform(uniform(0, 1), 1.0, 5.0);
  CHECK(shifted.support().lo == 5.0);
  CHECK(shifted.support().hi == 6.0);
  CHECK(pdf(shifted, 5.5) == 1.0);
  CHECK(pdf(shifted, 0.5) == 0.0);

  const double t = 2.0;
  const auto reflected = affine_transform(truncated_pareto(t), -1.0, 0.0);
  CHECK(reflected.support().lo == Approx(-std::exp(t)));
  CHECK(reflected.support().hi == -1.0);
  CHECK(pdf(reflected, -3.0) == Approx(1.0 / (3.0 * t)));

  const auto stretched = affine_transform(uniform(0, 1), 2.0, 0.0);
  CHECK(pdf(stretched, 1.7) == 0.5);
  CHECK(pdf(stretched, 0.1) == 0.5);
  CHECK_THROWS_AS(affine_transform(uniform(0, 1), 0.0, 1.0), std::domain_error);

  // Closed forms follow the map.
  CHECK(cdf(reflected, -std::exp(1.0)) == Approx(0.5));
  CHECK(inverse_cdf(reflected, 0.5) == Approx(-std::exp(1.0)));
  CHECK(moments(reflected).mean == Approx(-moments(truncated_pareto(t)).mean));
}

TEST_CASE("cdf and inverse_cdf") {
  const auto d = truncated_pareto(2.0);
  CHECK(cdf(d, std::numbers::e) == Approx(0.5));
  for (double t : {1.0, 2.0, 9.0}) {
    CHECK(inverse_cdf(truncated_pareto(t), 0.5) == Approx(std::exp(t / 2.0)));
  }
  CHECK(inverse_cdf(uniform(0, 1), 0.3) == Approx(0.3));
  CHECK_THROWS_AS(inverse_cdf(d, 0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_cdf(d, 1.0), std::domain_error);
  CHECK_THROWS_AS(inverse_cdf(d, 1.5), std::domain_error);

  // Numeric path: same density without closed forms.
  const PiecewiseDensity bare(std::vector<Piece>(d.pieces()), Symmetry::none, std::nullopt);
  CHECK(cdf(bare, std::numbers::e) == Approx(0.5).epsilon(1e-12));
  for (double u : {0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(std::abs(cdf(bare, inverse_cdf(bare, u)) - u) <= 1e-10);
    CHECK(inverse_cdf(bare, u) == Approx(std::exp(2.0 * u)).epsilon(1e-10));
  }
}

TEST_CASE("property: normalization, nonnegativity, sup dominance") {
  for (const auto& d : library()) {
    CAPTURE(d.tag()->to_string());
    CHECK(std::abs(total_mass(d) - 1.0) <= 1e-8);
    const double sup = sup_density(d);
    for (double x : probes::inside(d, 10000)) {
      const double p = d(x);
      REQUIRE(p >= 0.0);
      REQUIRE(p <= sup * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("property: cdf monotone and quantile round trip") {
  for (const auto& d : library()) {
    CAPTURE(d.tag()->to_string());
    auto xs = probes::inside(d, 2000);
    std::sort(xs.begin(), xs.end());
    double prev = 0.0;
    for (double x : xs) {
      const double c = cdf(d, x);
      REQUIRE(c >= prev);
      REQUIRE(c <= 1.0);
      prev = c;
    }
    const auto s = d.support();
    const double scale = std::isfinite(s.width()) ? s.width() : 1.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const double u = 0.001 + 0.998 * probes::weyl(i);
      const double x = inverse_cdf(d, u);
      REQUIRE(s.contains(x));
      const double back = inverse_cdf(d, cdf(d, x));
      REQUIRE(std::abs(back - x) <= 1e-8 * scale + 1e-12 * std::abs(x));
    }
  }
}

TEST_CASE("property: affine transform pulls back the density") {
  for (const auto& d : library()) {
    for (auto [a, c] : {std::pair{2.0, 0.0}, {-1.0, 0.0}, {1.0 / 3.0, -3.0}, {-2.5, 5.0}}) {
      const auto y = affine_transform(d, a, c);
      CAPTURE(d.tag()->to_string());
      CAPTURE(a);
      CHECK(std::abs(total_mass(y) - 1.0) <= 1e-8);
      for (double x : probes::inside(d, 500)) {
        REQUIRE(y(a * x + c) * std::abs(a) == Approx(d(x)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: even densities are symmetric") {
  for (const auto& d : {gaussian(0, 2), uniform(-1, 1)}) {
    REQUIRE(d.symmetry() == Symmetry::even_about_zero);
    for (double x : probes::inside(d, 500)) {
      CHECK(d(-x) == Approx(d(x)).epsilon(1e-15));
    }
  }
  CHECK(gaussian(1, 2).symmetry() == Symmetry::none);
}

TEST_CASE("convexity classification") {
  const auto c = *pareto(3.0).classification();
  CHECK(*c.beta == 3.0);
  CHECK(c.kappa * (*c.beta - 1.0) == Approx(-1.0));
  CHECK(c.is_convex_measure);
  const auto lc = *gaussian(0, 1).classification();
  CHECK(std::isinf(*lc.beta));
  CHECK(lc.kappa == 0.0);
  const auto tp = *truncated_pareto(2.0).classification();
  CHECK(tp.is_convex_measure);
  CHECK_FALSE(tp.beta.has_value());
  for (double beta : {1.5, 2.0, 7.0, 100.0}) {
    const auto k = ConvexityClassification::from_beta(beta);
    CHECK(k.kappa * (beta - 1.0) == Approx(-1.0));
  }
}

TEST_CASE("tags") {
  CHECK(truncated_pareto(2.0).tag()->to_string() == "truncated_pareto(log_b=2)");
  CHECK(*gaussian(1.5, 2.0).tag()->param("sigma2") == 2.0);
  CHECK_FALSE(gaussian(1.5, 2.0).tag()->param("beta").has_value());
}
