// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "corridor/errors.hpp"
#include "corridor/quadrature.hpp"

using namespace corridor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("Basic integrals", "[quadrature]") {
  CHECK_THAT(integrate([](double x) { return x; }, 0.0, 1.0).value, WithinAbs(0.5, 1e-14));
  CHECK_THAT(integrate([](double x) { return std::exp(-x); }, 0.0, kInf).value,
             WithinAbs(1.0, 1e-10));
  // reversed and doubly infinite bounds
  CHECK_THAT(integrate([](double x) { return x; }, 1.0, 0.0).value, WithinAbs(-0.5, 1e-14));
  CHECK_THAT(integrate([](double x) { return std::exp(-x * x); }, -kInf, kInf).value,
             WithinRel(std::sqrt(M_PI), 1e-9));
  CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("Link distance density normalizes", "[quadrature]") {
  const double h = 100.0, R = 500.0;
  const auto r =
      integrate([&](double d) { return d / (R * std::sqrt(d * d - h * h)); }, h, std::hypot(h, R));
  CHECK_THAT(r.value, WithinAbs(1.0, 1e-8));
}

TEST_CASE("Error estimates bound the true error on the self-test corpus", "[quadrature]") {
  struct Case {
    std::string name;
    double (*f)(double);
    double a, b, truth;
  };
  const Case corpus[] = {
      {"cubic", [](double x) { return 3 * x * x * x - x + 2; }, -1.0, 2.0, 15.75},
      {"degree 30", [](double x) { return std::pow(x, 30); }, 0.0, 1.0, 1.0 / 31.0},
      {"exp", [](double x) { return std::exp(x); }, 0.0, 3.0, std::exp(3.0) - 1.0},
      {"inverse sqrt", [](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 2.0},
      {"log", [](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
      {"peak", [](double x) { return 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)); }, 0.0, 1.0,
       100.0 * (std::atan(70.0) + std::atan(30.0))},
      {"gaussian tail", [](double x) { return std::exp(-x * x / 2); }, 0.0, kInf,
       std::sqrt(M_PI / 2)},
      {"rational tail", [](double x) { return 1.0 / (1.0 + x * x); }, 0.0, kInf, M_PI / 2},
  };
  const QuadratureConfig cfg{1e-10, 1e-13, 4000};
  for (const auto& c : corpus) {
    INFO(c.name);
    const auto r = integrate(c.f, c.a, c.b, cfg);
    const double err = std::abs(r.value - c.truth);
    CHECK(err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(c.truth)));
    CHECK(err <= r.error + 1e-15);
  }
}

TEST_CASE("Semi-infinite maps agree", "[quadrature]") {
  // exponential tails only: the log map turns algebraic decay into a near-singularity
  auto f = [](double x) { return std::exp(-x) * std::cos(x) + 2.0 * x * std::exp(-2.0 * x); };
  const QuadratureConfig cfg{1e-11, 1e-13, 4000};
  const double a = integrate(f, 0.0, kInf, cfg, SemiInfiniteMap::Rational).value;
  const double b = integrate(f, 0.0, kInf, cfg, SemiInfiniteMap::Exponential).value;
  CHECK_THAT(a, WithinAbs(1.0, 1e-10));
  CHECK_THAT(a, WithinAbs(b, 1e-10));
}

TEST_CASE("Non-convergence carries the best estimate", "[quadrature]") {
  const QuadratureConfig cfg{1e-14, 1e-300, 5};
  try {
    integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, cfg);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.best_estimate()));
    CHECK(e.error_estimate() > 0.0);
    CHECK(e.level().empty());
  }
  CHECK_THROWS_AS(QuadratureConfig({-1.0, 1e-12, 10}).validate(), ParameterError);
  CHECK_THROWS_AS(QuadratureConfig({1e-8, 1e-12, 0}).validate(), ParameterError);
}

TEST_CASE("Nested integration", "[quadrature]") {
  const auto tri = nested_integrate_2d([](double, double) { return 1.0; }, 0.0, 1.0,
                                       [](double) { return 0.0; }, [](double x) { return x; });
  CHECK_THAT(tri.value, WithinAbs(0.5, 1e-12));

  const auto ee =
      nested_integrate_2d([](double x, double y) { return std::exp(-x - y); }, 0.0, kInf,
                          [](double) { return 0.0; }, [](double) { return kInf; });
  CHECK_THAT(ee.value, WithinAbs(1.0, 1e-8));

  // volume of the unit simplex
  const auto simplex = nested_integrate_3d(
      [](double, double, double) { return 1.0; }, 0.0, 1.0, [](double) { return 0.0; },
      [](double x) { return 1.0 - x; }, [](double, double) { return 0.0; },
      [](double x, double y) { return 1.0 - x - y; });
  CHECK_THAT(simplex.value, WithinAbs(1.0 / 6.0, 1e-12));

  SECTION("inner failures name their level") {
    const QuadratureConfig cfg{1e-13, 1e-300, 3};
    try {
      nested_integrate_2d([](double x, double y) { return std::sin(1.0 / (x * y)); }, 1e-3, 1.0,
                          [](double) { return 1e-4; }, [](double) { return 1.0; }, cfg);
      FAIL("expected AccuracyError");
    } catch (const AccuracyError& e) {
      CHECK((e.level() == "inner" || e.level() == "outer"));
    }
  }
}
