// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Core>
#include <algorithm>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "corridor/core.hpp"
#include "corridor/distributions.hpp"
#include "corridor/errors.hpp"
#include "corridor/quadrature.hpp"
#include "corridor/random.hpp"
#include "corridor/stats.hpp"

using namespace corridor;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Covered:
// - path loss values, carrier factor, domain errors, monotonicity
// - link distance pdf/cdf and its Monte Carlo oracle
// - path-loss value density: normalization, endpoint singularity, chi-square oracle
// - inverse-gamma shadowing and Gamma fading: moments, mode, samplers
// - height models and RNG streams

TEST_CASE("Path loss", "[core]") {
  ChannelParams p;
  CHECK(path_loss(1.0, p) == 1.0);
  CHECK_THAT(path_loss(100.0, p), WithinRel(std::pow(10.0, -4.4), 1e-14));
  CHECK_THAT(path_loss(100.0, p), WithinRel(3.9811e-5, 1e-4));

  CHECK_THROWS_AS(path_loss(0.0, p), DomainError);
  CHECK_THROWS_AS(path_loss(-3.0, p), DomainError);

  double prev = path_loss(1.0, p);
  for (double d = 1.5; d < 2000.0; d *= 1.5) {
    const double v = path_loss(d, p);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("Carrier factor at a 15 cm wavelength", "[core]") {
  const double fc = kSpeedOfLight / 0.15;
  // independent evaluation: (lambda / (4 pi))^2
  const double k = std::pow(0.15 / (4.0 * std::numbers::pi), 2);
  CHECK_THAT(carrier_factor(fc), WithinRel(k, 1e-12));
  CHECK_THAT(carrier_factor(fc), WithinRel(1.4249e-4, 1e-4));

  ChannelParams p;
  p.carrier_frequency_hz = fc;
  CHECK_THAT(path_loss(100.0, p), WithinRel(k * std::pow(10.0, -4.4), 1e-12));
  CHECK_THROWS_AS(carrier_factor(0.0), ParameterError);
}

TEST_CASE("Channel parameter validation", "[core]") {
  ChannelParams p;
  CHECK(p.shadowing_scale() == 1.0);
  p.q = 1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.q = 2.0;
  p.m = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.m = 1.5;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(p.validate_integer_m(), ParameterError);
  p.alpha = -1.0;
  p.m = 1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_THROWS_AS(InverseGamma(1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(InverseGamma(2.0, 0.0), ParameterError);
  CHECK_THROWS_AS(GammaFading(0.0), ParameterError);
  CHECK_THROWS_AS(validate(SpatialModel{Bpp{0}}), ParameterError);
  CHECK_THROWS_AS(validate(SpatialModel{FiniteHppp{0.0}}), ParameterError);
  CHECK_THROWS_AS(CorridorGeometry(0.0, 100.0), ParameterError);
}

TEST_CASE("Link distance closed form", "[core]") {
  const LinkDistance ld(100.0, 500.0);
  CHECK_THAT(ld.cdf(300.0), WithinAbs(std::sqrt(80000.0) / 500.0, 1e-14));
  CHECK_THAT(ld.cdf(300.0), WithinAbs(0.56569, 1e-5));
  CHECK(ld.cdf(std::hypot(100.0, 500.0)) == 1.0);
  CHECK(ld.cdf(50.0) == 0.0);
  CHECK(ld.cdf(1e4) == 1.0);
  CHECK(ld.pdf(99.0) == 0.0);
  CHECK(ld.pdf(600.0) == 0.0);

  RandomStream rng(11);
  for (int i = 0; i < 100; ++i) {
    const double d = rng.uniform(100.0, std::hypot(100.0, 500.0));
    CHECK_THAT(ld.cdf(d), WithinAbs(std::sqrt(d * d - 1e4) / 500.0, 1e-12));
  }

  const auto mass =
      integrate([&](double d) { return ld.pdf(d); }, ld.min(), ld.max(), {1e-10, 1e-14, 2000});
  CHECK_THAT(mass.value, WithinAbs(1.0, 1e-8));
}

TEST_CASE("Link distance matches simulated distances", "[core][mc]") {
  const LinkDistance ld(100.0, 500.0);
  RandomStream rng(2024);
  Eigen::VectorXd d(1000000);
  for (auto& v : d) v = std::hypot(rng.uniform(-500.0, 500.0), 100.0);
  CHECK(ks_statistic(d, [&](double x) { return ld.cdf(x); }) < 0.005);
}

TEST_CASE("Path-loss value density", "[core]") {
  const double h = 100.0, R = 500.0, a = 2.2;
  const double lo = std::pow(h * h + R * R, -a / 2.0);
  const double hi = std::pow(h, -a);
  const QuadratureConfig cfg{1e-10, 1e-300, 4000};

  // Work in u = ln x where the density is x f(x).
  auto g = [&](double u) {
    const double x = std::exp(u);
    return x * pathloss_value_pdf(x, h, R, a);
  };
  CHECK_THAT(integrate(g, std::log(lo), std::log(hi), cfg).value, WithinAbs(1.0, 1e-6));
  CHECK(pathloss_value_pdf(lo * 0.99, h, R, a) == 0.0);
  CHECK(pathloss_value_pdf(hi * 1.01, h, R, a) == 0.0);

  // Subintervals touching the singular edge x = h^-alpha converge.
  for (double frac : {0.9, 0.99, 0.999}) {
    const double a0 = std::log(hi) + std::log(frac);
    CHECK_NOTHROW(integrate(g, a0, std::log(hi), cfg));
  }

  SECTION("histogram of simulated l(d)") {
    RandomStream rng(5);
    constexpr int bins = 40;
    const double ulo = std::log(lo), uhi = std::log(hi);
    Eigen::VectorXd observed = Eigen::VectorXd::Zero(bins);
    for (int t = 0; t < 1000000; ++t) {
      const double x = std::pow(std::hypot(rng.uniform(-R, R), h), -a);
      const int k = std::min(bins - 1, static_cast<int>((std::log(x) - ulo) / (uhi - ulo) * bins));
      observed(k) += 1.0;
    }
    Eigen::VectorXd prob(bins);
    for (int k = 0; k < bins; ++k) {
      const double u0 = ulo + (uhi - ulo) * k / bins;
      const double u1 = ulo + (uhi - ulo) * (k + 1) / bins;
      prob(k) = integrate(g, u0, u1, cfg).value;
    }
    CHECK(chi_square_p_value(observed, prob) > 0.01);
  }
}

TEST_CASE("Inverse-gamma shadowing", "[core]") {
  const InverseGamma s(2.0, 1.0);
  CHECK(s.mean() == 1.0);
  CHECK_THAT(s.mode(), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK(s.pdf_derivative(s.mode()) == Catch::Approx(0.0).margin(1e-12));
  CHECK(s.pdf(s.mode()) > s.pdf(s.mode() * 1.01));
  CHECK(s.pdf(s.mode()) > s.pdf(s.mode() * 0.99));
  CHECK(s.pdf(0.0) == 0.0);

  const auto mass = integrate([&](double x) { return s.pdf(x); }, 0.0,
                              std::numeric_limits<double>::infinity(), {1e-10, 1e-14, 2000});
  CHECK_THAT(mass.value, WithinAbs(1.0, 1e-8));
  CHECK_THAT(s.cdf(s.quantile(0.3)), WithinAbs(0.3, 1e-12));
  CHECK_THAT(s.ccdf(s.upper_quantile(1e-6)), WithinRel(1e-6, 1e-9));
  // E[S; S <= x] against direct quadrature
  for (double x : {0.1, 1.0, 7.0}) {
    const double direct =
        integrate([&](double y) { return y * s.pdf(y); }, 0.0, x, {1e-11, 1e-16, 2000}).value;
    CHECK_THAT(s.partial_mean(x), WithinRel(direct, 1e-9));
  }

  SECTION("sampler") {
    RandomStream rng(99);
    Eigen::VectorXd x(1000000);
    for (auto& v : x) v = s.sample(rng);
    // infinite variance at q = 2, so the mean converges slowly; the bound is loose on purpose
    CHECK(x.mean() > 0.99);
    CHECK(x.mean() < 1.01);
    std::vector<double> sorted(x.begin(), x.end());
    std::nth_element(sorted.begin(), sorted.begin() + 500000, sorted.end());
    CHECK_THAT(sorted[500000], WithinRel(s.median(), 5e-3));
    CHECK(ks_statistic(x, [&](double v) { return s.cdf(v); }) < 0.005);
  }
}

TEST_CASE("Gamma fading", "[core]") {
  const GammaFading f1(1.0);
  for (double x : {0.0, 0.3, 1.0, 4.0}) {
    CHECK_THAT(f1.pdf(x), WithinRel(std::exp(-x), 1e-14));
  }
  for (double m : {0.5, 1.0, 3.0, 7.5}) {
    const GammaFading f(m);
    CHECK(f.mean() == 1.0);
    const double mean = integrate([&](double x) { return x * f.pdf(x); }, 0.0,
                                  std::numeric_limits<double>::infinity(), {1e-10, 1e-14, 2000})
                            .value;
    CHECK_THAT(mean, WithinAbs(1.0, 1e-8));
  }

  RandomStream rng(3);
  const GammaFading f3(3.0);
  Eigen::VectorXd x(1000000);
  for (auto& v : x) v = f3.sample(rng);
  CHECK(ks_statistic(x, [&](double v) { return f3.cdf(v); }) < 0.005);
  CHECK_THAT(x.mean(), WithinAbs(1.0, 3e-3));
}

TEST_CASE("Height models", "[core]") {
  CHECK(height_from_uniform(FixedHeight{120.0}, 0.7) == 120.0);
  CHECK(height_from_uniform(UniformHeight{160.0, 240.0}, 0.25) == 180.0);
  CHECK_THAT(height_from_uniform(NormalHeight{200.0, 15.0}, 0.5), WithinAbs(200.0, 1e-9));
  CHECK_THAT(mean_height(NormalHeight{200.0, 15.0}), WithinAbs(200.0, 1e-9));
  // truncation at 0 shifts the mean up
  CHECK(mean_height(NormalHeight{10.0, 15.0}) > 10.0);
  CHECK(height_from_uniform(NormalHeight{10.0, 15.0}, 1e-9) > 0.0);
  CHECK_THROWS_AS(validate(HeightModel{UniformHeight{240.0, 160.0}}), ParameterError);
  CHECK_THROWS_AS(validate(HeightModel{NormalHeight{200.0, 0.0}}), ParameterError);
  CHECK_THROWS_AS(CorridorGeometry(500.0, UniformHeight{}).fixed_height(), ParameterError);

  const EmpiricalHeight emp({210.0, 190.0, 200.0, 205.0});
  CHECK(height_from_uniform(emp, 0.0) == 190.0);
  CHECK(height_from_uniform(emp, 0.999) == 210.0);
  CHECK(mean_height(emp) == 201.25);
}

TEST_CASE("Random streams are reproducible and independent", "[core]") {
  RandomStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);

  RandomStream t0 = RandomStream::for_trial(7, 0);
  RandomStream t0b = RandomStream::for_trial(7, 0);
  RandomStream t1 = RandomStream::for_trial(7, 1);
  CHECK(t0() == t0b());
  CHECK(t0() != t1());

  RandomStream rng(8);
  double sum = 0.0;
  for (int i = 0; i < 200000; ++i) sum += static_cast<double>(rng.poisson(37.5));
  CHECK_THAT(sum / 200000.0, WithinAbs(37.5, 0.05));
  double usum = 0.0;
  bool open = true;
  for (int i = 0; i < 200000; ++i) {
    const double u = rng.uniform_open();
    open = open && u > 0.0 && u < 1.0;
    usum += u;
  }
  CHECK(open);
  CHECK_THAT(usum / 200000.0, WithinAbs(0.5, 3e-3));
}
