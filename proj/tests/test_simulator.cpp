// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <cmath>

#include "corridor/errors.hpp"
#include "corridor/random.hpp"
#include "corridor/simulator.hpp"
#include "corridor/stats.hpp"

using namespace corridor;
using Catch::Matchers::WithinAbs;

namespace {

const CorridorGeometry kGeom{500.0, 100.0};

NetworkRealization fixed_network(std::initializer_list<double> powers) {
  NetworkRealization r;
  const auto n = static_cast<Eigen::Index>(powers.size());
  r.ground = Eigen::MatrixX2d::Zero(n, 2);
  r.heights = Eigen::VectorXd::Constant(n, 100.0);
  r.shadowing = Eigen::VectorXd::Ones(n);
  r.rx_powers.resize(n);
  Eigen::Index i = 0;
  for (double p : powers) {
    r.ground(i, 0) = static_cast<double>(i);
    r.rx_powers[i++] = p;
  }
  return r;
}

}  // namespace

TEST_CASE("Network sampling", "[simulator]") {
  const ChannelParams channel;

  SECTION("BPP ground positions are uniform on the corridor") {
    RandomStream rng(1);
    Eigen::VectorXd xs(20000);
    for (Eigen::Index t = 0; t < 2000; ++t) {
      const auto net = sample_network(Bpp{10}, kGeom, channel, rng);
      REQUIRE(net.size() == 10);
      CHECK(net.ground.col(1).isZero());
      xs.segment(t * 10, 10) = net.ground.col(0);
    }
    CHECK(ks_statistic(xs, [](double x) { return (x + 500.0) / 1000.0; }) < 1.63 / std::sqrt(2e4));
  }

  SECTION("HPPP count has mean lambda |L|") {
    RandomStream rng(2);
    double total = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t)
      total += sample_network(FiniteHppp{0.01}, kGeom, channel, rng).size();
    // Poisson(10): standard error of the mean is sqrt(10 / trials)
    CHECK_THAT(total / trials, WithinAbs(10.0, 4.0 * std::sqrt(10.0 / trials)));
  }

  SECTION("disc baseline distances") {
    RandomStream rng(3);
    Eigen::VectorXd ds(20000);
    for (Eigen::Index t = 0; t < 2000; ++t) {
      ds.segment(t * 10, 10) = sample_network(Disc2D{10}, kGeom, channel, rng).distances();
    }
    auto cdf = [](double d) { return (d * d - 1e4) / 25e4; };
    CHECK(ks_statistic(ds, cdf) < 1.63 / std::sqrt(2e4));
  }
}

TEST_CASE("Association", "[simulator]") {
  const auto lone = fixed_network({1e-6});
  CHECK(associate(lone, AssociationPolicy::MaxPower) == 0);
  CHECK(associate(lone, AssociationPolicy::MinDistance) == 0);
  CHECK_THROWS_AS(associate(NetworkRealization{}, AssociationPolicy::MaxPower), EmptyNetworkError);
  CHECK(associate(fixed_network({1.0, 3.0, 3.0}), AssociationPolicy::MaxPower) == 1);

  SECTION("without shadowing both policies pick the same UAV") {
    ChannelParams channel;
    RandomStream rng(4);
    for (int t = 0; t < 200; ++t) {
      auto net = sample_network(Bpp{10}, kGeom, channel, rng);
      net.shadowing.setOnes();
      const Eigen::VectorXd d = net.distances();
      for (Eigen::Index i = 0; i < d.size(); ++i) net.rx_powers[i] = path_loss(d[i], channel);
      CHECK(associate(net, AssociationPolicy::MaxPower) ==
            associate(net, AssociationPolicy::MinDistance));
    }
  }

  SECTION("heavy shadowing often overrides distance") {
    ChannelParams channel;
    RandomStream rng(5);
    int differ = 0;
    for (int t = 0; t < 2000; ++t) {
      const auto net = sample_network(Bpp{10}, kGeom, channel, rng);
      differ += associate(net, AssociationPolicy::MaxPower) !=
                associate(net, AssociationPolicy::MinDistance);
    }
    CHECK(differ > 600);
  }
}

TEST_CASE("SIR samples", "[simulator]") {
  ChannelParams no_fading;
  no_fading.m = std::numeric_limits<double>::infinity();
  RandomStream rng(6);

  CHECK(sir_sample(fixed_network({2.0, 2.0}), AssociationPolicy::MaxPower, no_fading, rng).sir ==
        1.0);
  const auto alone = sir_sample(fixed_network({2.0}), AssociationPolicy::MaxPower, no_fading, rng);
  CHECK(alone.infinite());
  CHECK(alone.n_uavs == 1);

  SECTION("two UAVs with Rayleigh fading") {
    // P(h0 rho / h1 > theta) = 1 / (1 + theta / rho) for unit exponentials
    const double rho = 4.0;
    const auto net = fixed_network({rho, 1.0});
    ChannelParams rayleigh;
    const int trials = 100000;
    for (double theta : {0.5, 2.0, 8.0}) {
      int covered = 0;
      for (int t = 0; t < trials; ++t) {
        covered += sir_sample(net, AssociationPolicy::MaxPower, rayleigh, rng).sir > theta;
      }
      CHECK_THAT(static_cast<double>(covered) / trials,
                 WithinAbs(1.0 / (1.0 + theta / rho), 0.005));
    }
  }
}

TEST_CASE("Empirical coverage", "[simulator]") {
  SimulationConfig cfg;
  MonteCarloOptions mc;
  mc.trials = 50000;
  mc.seed = 7;
  mc.workers = 1;
  Eigen::ArrayXd theta_db(4);
  theta_db << -60.0, -5.0, 0.0, 5.0;

  const auto curve = empirical_coverage(cfg, theta_db, mc);
  CHECK(curve.coverage[0] > 0.999);
  for (Eigen::Index i = 1; i < curve.coverage.size(); ++i) {
    CHECK(curve.coverage[i] <= curve.coverage[i - 1]);
    CHECK(curve.standard_error[i] > 0.0);
  }
  CHECK(curve.samples == mc.trials);

  SECTION("nearest association loses coverage") {
    SimulationConfig nearest = cfg;
    nearest.policy = AssociationPolicy::MinDistance;
    CHECK(empirical_coverage(nearest, theta_db, mc).coverage[2] < curve.coverage[2]);
  }

  SECTION("reruns are bitwise identical across worker counts") {
    const Eigen::VectorXd a = simulate_sir(cfg, mc);
    mc.workers = 3;
    const Eigen::VectorXd b = simulate_sir(cfg, mc);
    CHECK((a.array() == b.array()).all());
    mc.seed = 8;
    CHECK_FALSE((simulate_sir(cfg, mc).array() == a.array()).all());
  }

  SECTION("empty HPPP corridors are discarded") {
    SimulationConfig sparse = cfg;
    sparse.spatial = FiniteHppp{0.002};  // mean count 2
    mc.trials = 20000;
    const Eigen::VectorXd sir = simulate_sir(sparse, mc);
    const auto empty = sir.array().isNaN().count();
    CHECK(std::abs(empty / 20000.0 - std::exp(-2.0)) < 0.01);
    CHECK(coverage_from_sir(sir, theta_db).samples == static_cast<std::size_t>(20000 - empty));
  }
}

TEST_CASE("Variable height study", "[simulator]") {
  SimulationConfig cfg;
  MonteCarloOptions mc;
  mc.trials = 30000;
  Eigen::ArrayXd theta_db = Eigen::ArrayXd::LinSpaced(5, -10.0, 10.0);

  const auto same = variable_height_study(200.0, FixedHeight{200.0}, cfg, theta_db, mc);
  CHECK(same.max_gap == 0.0);

  const auto spread = variable_height_study(200.0, UniformHeight{160.0, 240.0}, cfg, theta_db, mc);
  CHECK(spread.max_gap > 0.0);
  CHECK(spread.max_gap < 0.05);
}

TEST_CASE("KL divergence", "[stats]") {
  RandomStream rng(12);
  Eigen::VectorXd a(5000), b(5000);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a[i] = rng.normal();
    b[i] = 0.5 + rng.normal();
  }
  const auto p = EmpiricalDistribution::from_samples(a, -5.0, 5.0, 40);
  const auto q = EmpiricalDistribution::from_samples(b, -5.0, 5.0, 40);
  CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(p, q) > 0.0);
  // two unit normals half a sigma apart: KL = 0.125
  CHECK_THAT(kl_divergence(p, q), WithinAbs(0.125, 0.04));
  CHECK_THROWS_AS(kl_divergence(p, EmpiricalDistribution::from_samples(b, -5.0, 5.0, 41)),
                  ContractError);

  CHECK_THAT(p.densities().sum() * p.bin_width(), WithinAbs(1.0, 1e-12));
  CHECK_THAT(p.cdf(5.0), WithinAbs(1.0, 1e-12));
  CHECK(p.cdf(-5.0) == 0.0);
}
