#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include "maxcox/obs_dist.hpp"

using namespace maxcox;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

}  // namespace

TEST_CASE("pareto cdf/tail closed forms") {
  const auto law = ObservationLaw::pareto(1.0, 1.0);
  CHECK(law.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(law.tail(999.0) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(law.cdf(1e18) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(law.tail(0.0) == 1.0);
  CHECK(ObservationLaw::pareto(2.0, 2.0).tail(0.0) == 1.0);
}

TEST_CASE("exponential endpoints") {
  const auto law = ObservationLaw::exponential(1.0);
  CHECK(law.cdf(0.0) == 0.0);
  CHECK(law.tail(0.0) == 1.0);
  CHECK(law.quantile(1.0 - std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quantile closed forms and generalized-inverse property") {
  const auto pareto = ObservationLaw::pareto(1.0, 1.0);
  // solve 1 - F(x) = 1/t at t = 10
  CHECK(pareto.quantile(1.0 - 0.1) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK_THROWS_AS(pareto.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(pareto.quantile(1.0), std::domain_error);

  const auto tab = ObservationLaw::tabulated({{0.0, 0.0}, {1.0, 0.5}, {2.0, 1.0}});
  CHECK(tab.quantile(0.5) == doctest::Approx(1.0).epsilon(1e-14));

  // cdf(quantile(u)) >= u, cdf(quantile(u) - eps) < u  on continuous families
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(1e-6, 1.0 - 1e-6);
  const std::vector<ObservationLaw> laws = {
      ObservationLaw::pareto(2.0, 1.5), ObservationLaw::exponential(0.7),
      ObservationLaw::bounded_power(0.0, 1.0, 2.0)};
  for (const auto& law : laws) {
    for (int i = 0; i < 200; ++i) {
      const double u = unif(rng);
      const double qx = law.quantile(u);
      const double eps = 1e-9 * (1.0 + std::abs(qx));
      CHECK(law.cdf(qx) >= u - 1e-12);
      CHECK(law.cdf(qx - eps) < u);
    }
  }
}

TEST_CASE("upper_quantile matches the tail deep down") {
  const auto law = ObservationLaw::pareto(1.0, 2.0);
  for (double w : {0.3, 1e-3, 1e-9, 1e-14}) {
    const double x = law.upper_quantile(w);
    CHECK(law.tail(x) == doctest::Approx(w).epsilon(1e-12));
  }
  CHECK(law.upper_quantile(1.0) == 0.0);
}

TEST_CASE("cdf + tail = 1") {
  const std::vector<ObservationLaw> laws = {
      ObservationLaw::pareto(1.0, 1.0), ObservationLaw::pareto(3.0, 2.5),
      ObservationLaw::exponential(2.0),
      ObservationLaw::bounded_power(0.0, 1.0, 2.0),
      ObservationLaw::tabulated({{0.0, 0.0}, {0.5, 0.25}, {1.5, 0.75}, {2.0, 1.0}})};
  for (const auto& law : laws) {
    for (double x = -1.0; x <= 5.0; x += 0.0625) {
      CHECK(law.cdf(x) + law.tail(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("pareto regular variation: tail(yx)/tail(y) -> x^-gamma") {
  const double y = 1e6;
  for (double gamma : {1.0, 2.5}) {
    const auto law = ObservationLaw::pareto(1.0, gamma);
    for (double x : {0.5, 0.8, 1.25, 2.0}) {
      const double ratio = law.tail(y * x) / law.tail(y);
      const double expected = std::pow(x, -gamma);
      CHECK(std::abs(ratio - expected) / expected < 1e-4);
    }
  }
}

TEST_CASE("mean excess") {
  SUBCASE("exponential is constant 1/rate") {
    const auto law = ObservationLaw::exponential(1.0);
    CHECK(law.mean_excess(3.0) == doctest::Approx(1.0).epsilon(1e-15));
    const auto law2 = ObservationLaw::exponential(2.0);
    CHECK(law2.mean_excess(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    for (double y = 0.0; y <= 20.0; y += 0.5)
      CHECK(std::abs(law.mean_excess(y) - 1.0) < 1e-10);
  }
  SUBCASE("pareto gamma <= 1 diverges") {
    const auto law = ObservationLaw::pareto(1.0, 1.0);
    CHECK_THROWS_WITH_AS(law.mean_excess(1.0),
                         doctest::Contains("not integrable"), std::domain_error);
  }
  SUBCASE("pareto gamma = 2 has an arctangent oracle") {
    // \int_1^inf dz/(1+z^2) = pi/4, tail(1) = 1/2  =>  R(1) = pi/2
    const auto law = ObservationLaw::pareto(1.0, 2.0);
    CHECK(law.mean_excess(1.0) ==
          doctest::Approx(1.5707963267948966).epsilon(1e-9));
    CHECK(law.mean_excess(5.0) ==
          doctest::Approx(5.1322845560968997).epsilon(1e-9));
  }
  SUBCASE("pareto gamma = 1.5, frozen quadrature oracle") {
    const auto law = ObservationLaw::pareto(1.0, 1.5);
    CHECK(law.mean_excess(1.0) ==
          doctest::Approx(3.3425953930588842).epsilon(1e-8));
  }
  SUBCASE("tabulated: exact trapezoid of the interpolant") {
    const auto tab = ObservationLaw::tabulated({{0.0, 0.0}, {2.0, 1.0}});
    // R(0) = integral of (1 - z/2) over [0,2] / 1 = 1
    CHECK(tab.mean_excess(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("y at or beyond rext is rejected") {
    const auto law = ObservationLaw::bounded_power(0.0, 1.0, 2.0);
    CHECK_THROWS_AS(law.mean_excess(1.0), std::domain_error);
  }
}

TEST_CASE("domain classification") {
  CHECK(ObservationLaw::pareto(3.0, 2.5).classify_domain().kind ==
        TailDomain::frechet);
  CHECK(ObservationLaw::pareto(3.0, 2.5).classify_domain().gamma ==
        doctest::Approx(2.5));
  CHECK(ObservationLaw::exponential(1.0).classify_domain().kind ==
        TailDomain::gumbel);
  const auto bp = ObservationLaw::bounded_power(1.0, 2.0);
  CHECK(bp.classify_domain().kind == TailDomain::weibull);
  CHECK(bp.classify_domain().gamma == doctest::Approx(2.0));

  SUBCASE("tabulated diagnostic recovers a pareto-like gamma") {
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);
    for (double x = 0.25; x <= 1e4; x *= 1.125) {
      pts.emplace_back(x, 1.0 - 1.0 / (x * x + 1.0));
    }
    pts.emplace_back(12000.0, 1.0);
    const auto tab = ObservationLaw::tabulated(pts);
    const auto tag = tab.classify_domain();
    CHECK(tag.kind == TailDomain::frechet);
    CHECK(std::abs(tag.gamma - 2.0) < 0.1);
  }
  SUBCASE("inconsistent tail slopes report unknown") {
    const auto tab = ObservationLaw::tabulated(
        {{0.0, 0.0}, {1.0, 0.9}, {2.0, 0.905}, {4.0, 0.99}, {8.0, 1.0}});
    CHECK(tab.classify_domain().kind == TailDomain::unknown);
  }
}

TEST_CASE("tabulated CSV loader") {
  SUBCASE("well-formed") {
    const auto path = write_temp("obs_ok.csv", "x,F\n0,0\n1,0.5\n2,1\n");
    const auto law = ObservationLaw::tabulated_from_csv(path);
    CHECK(law.cdf(1.0) == doctest::Approx(0.5));
    CHECK(law.rext() == 2.0);
  }
  SUBCASE("bad header") {
    const auto path = write_temp("obs_hdr.csv", "a,b\n0,0\n");
    CHECK_THROWS_WITH_AS(ObservationLaw::tabulated_from_csv(path),
                         doctest::Contains(":1:"), std::runtime_error);
  }
  SUBCASE("malformed number carries the line") {
    const auto path = write_temp("obs_bad.csv", "x,F\n0,0\noops,0.5\n2,1\n");
    CHECK_THROWS_WITH_AS(ObservationLaw::tabulated_from_csv(path),
                         doctest::Contains(":3:"), std::runtime_error);
  }
  SUBCASE("non-monotone x carries the line") {
    const auto path = write_temp("obs_mono.csv", "x,F\n0,0\n2,0.5\n1,1\n");
    CHECK_THROWS_WITH_AS(ObservationLaw::tabulated_from_csv(path),
                         doctest::Contains(":4:"), std::runtime_error);
  }
  SUBCASE("decreasing F rejected") {
    const auto path = write_temp("obs_decF.csv", "x,F\n0,0.5\n1,0.4\n");
    CHECK_THROWS_AS(ObservationLaw::tabulated_from_csv(path), std::runtime_error);
  }
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(ObservationLaw::pareto(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ObservationLaw::pareto(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ObservationLaw::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ObservationLaw::bounded_power(2.0, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ObservationLaw::tabulated({{0.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ObservationLaw::tabulated({{0.0, 0.0}, {0.0, 1.0}}),
                  std::invalid_argument);
}
