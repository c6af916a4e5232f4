// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "corridor/analytic.hpp"
#include "corridor/random.hpp"
#include "corridor/simulator.hpp"
#include "corridor/stats.hpp"
#include "corridor/trace.hpp"

using namespace corridor;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  fmt::print("C{:<2} {}  {}\n", id, pass ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
  failures += !pass;
}

Eigen::ArrayXd theta_grid_db() { return Eigen::ArrayXd::LinSpaced(21, -10.0, 10.0); }

Eigen::ArrayXd to_linear(const Eigen::ArrayXd& db) {
  return db.unaryExpr([](double d) { return db_to_linear(d); });
}

ChannelParams channel_q(double q) {
  ChannelParams c;
  c.q = q;
  return c;
}

double hppp_at(double theta_db, double lambda, double R, double h, double q) {
  const ReceivedPowerDistribution power(CorridorGeometry(R, h), channel_q(q));
  return coverage_hppp(db_to_linear(theta_db), lambda, power);
}

MonteCarloOptions mc(std::size_t trials, std::uint64_t seed) {
  MonteCarloOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

// C1, C2
void oracle_equivalence(int id, const SpatialModel& spatial) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::ArrayXd db = theta_grid_db();
  const ReceivedPowerDistribution power(CorridorGeometry(500.0, 100.0), ChannelParams{});
  const Eigen::ArrayXd exact = coverage_curve(to_linear(db), spatial, CoverageMethod::Exact, power);
  SimulationConfig cfg;
  cfg.spatial = spatial;
  const auto sim = empirical_coverage(cfg, db, mc(1000000, 2024));
  const double gap = (exact - sim.coverage).abs().maxCoeff();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(
      id, gap <= 0.01 && secs < 300.0,
      fmt::format("{} exact vs 1e6-trial MC over -10..10 dB: max gap {:.4f} (tol 0.01), {:.0f} s",
                  describe(spatial), gap, secs));
}

void fig3_orderings() {
  const Eigen::ArrayXd db = theta_grid_db();
  const Eigen::ArrayXd th = to_linear(db);
  const ReceivedPowerDistribution power(CorridorGeometry(500.0, 100.0), ChannelParams{});
  const Eigen::ArrayXd exact3 = coverage_curve(th, Bpp{3}, CoverageMethod::Exact, power);
  const Eigen::ArrayXd exact10 = coverage_curve(th, Bpp{10}, CoverageMethod::Exact, power);
  const Eigen::ArrayXd dom3 =
      coverage_curve(th, Bpp{3}, CoverageMethod::DominantMeanResidual, power);
  const Eigen::ArrayXd dom10 =
      coverage_curve(th, Bpp{10}, CoverageMethod::DominantMeanResidual, power);
  const double t = db_to_linear(-3.0);
  const double single3 =
      std::abs(coverage_single_dominant_bpp(t, 3, power) - coverage_bpp(t, 3, power));
  const double single10 =
      std::abs(coverage_single_dominant_bpp(t, 10, power) - coverage_bpp(t, 10, power));

  const bool order = (exact3 > exact10).all();
  const double err3 = (dom3 - exact3).abs().maxCoeff();
  const double err10 = (dom10 - exact10).abs().maxCoeff();
  const bool dominant = err3 <= 0.03 && err10 <= 0.03;
  report(
      3, order && dominant && single3 < single10,
      fmt::format("N=3 above N=10 everywhere: {}; mean-residual max error N=3 {:.4f}, N=10 {:.4f} "
                  "(tol 0.03); single-dominant error at -3 dB N=3 {:.4f} < N=10 {:.4f}: {}",
                  order ? "yes" : "no", err3, err10, single3, single10,
                  single3 < single10 ? "yes" : "no"));
}

void fig4_height_trend() {
  const double lambda = 0.01;
  double c[2][3];
  const double hs[3] = {100.0, 150.0, 200.0};
  for (int j = 0; j < 3; ++j) {
    c[0][j] = hppp_at(-3.0, lambda, 500.0, hs[j], 2.0);
    c[1][j] = hppp_at(-3.0, lambda, 500.0, hs[j], 5.0);
  }
  const bool falls = c[0][0] > c[0][1] && c[0][1] > c[0][2];
  const double d100 = c[0][0] - c[1][0], d200 = c[0][2] - c[1][2];
  report(
      4, falls && d200 > d100,
      fmt::format("q=2 coverage at h=100/150/200: {:.4f}/{:.4f}/{:.4f}; q=2->5 loss h=100 {:.4f}, "
                  "h=200 {:.4f}",
                  c[0][0], c[0][1], c[0][2], d100, d200));
}

void fig5_length_trend() {
  const double Rs[3] = {250.0, 500.0, 1000.0};
  double gap[2][3];
  const double hs[2] = {100.0, 200.0};
  bool shrinks = true;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double lambda = 10.0 / (2.0 * Rs[j]);
      gap[i][j] = std::abs(hppp_at(-3.0, lambda, Rs[j], hs[i], 2.0) -
                           hppp_at(-3.0, lambda, Rs[j], hs[i], 5.0));
    }
    shrinks = shrinks && gap[i][0] > gap[i][1] && gap[i][1] > gap[i][2];
  }
  const double ratio_low = gap[0][2] / gap[0][0], ratio_high = gap[1][2] / gap[1][0];
  report(5, shrinks && ratio_low < ratio_high,
         fmt::format("q gap over R=250/500/1000, h=100: {:.4f}/{:.4f}/{:.4f}, h=200: "
                     "{:.4f}/{:.4f}/{:.4f}; gap(1000)/gap(250) {:.3f} vs {:.3f}",
                     gap[0][0], gap[0][1], gap[0][2], gap[1][0], gap[1][1], gap[1][2], ratio_low,
                     ratio_high));
}

void fig6_corner() {
  const double t = db_to_linear(-3.0);
  const double low_long = coverage_bpp(
      t, 10, ReceivedPowerDistribution(CorridorGeometry(500.0, 50.0), ChannelParams{}));
  const double high_short = coverage_bpp(
      t, 10, ReceivedPowerDistribution(CorridorGeometry(100.0, 200.0), ChannelParams{}));
  report(6, low_long > high_short,
         fmt::format("BPP N=10 at -3 dB: h=50,R=500 {:.4f} > h=200,R=100 {:.4f}", low_long,
                     high_short));
}

void fig7_disc() {
  const Eigen::ArrayXd db = theta_grid_db();
  SimulationConfig corridor;
  corridor.geometry = CorridorGeometry(250.0, 50.0);
  SimulationConfig disc = corridor;
  disc.spatial = Disc2D{10};
  const auto a = empirical_coverage(corridor, db, mc(200000, 7));
  const auto b = empirical_coverage(disc, db, mc(200000, 7));
  const Eigen::ArrayXd margin = a.coverage - b.coverage;
  report(7, (margin > 0.0).all(),
         fmt::format("corridor minus disc coverage at h=50,R=250,N=10: min {:.4f}, max {:.4f}",
                     margin.minCoeff(), margin.maxCoeff()));
}

void policy_gap() {
  const Eigen::ArrayXd db = theta_grid_db();
  SimulationConfig maxp;
  SimulationConfig nearest;
  nearest.policy = AssociationPolicy::MinDistance;
  const auto opts = mc(1000000, 99);
  const Eigen::VectorXd a = simulate_sir(maxp, opts);
  const Eigen::VectorXd b = simulate_sir(nearest, opts);
  const Eigen::ArrayXd ca = coverage_from_sir(a, db).coverage;
  const Eigen::ArrayXd cb = coverage_from_sir(b, db).coverage;
  const double ks = ks_two_sample(a, b);
  const double crit = ks_critical_value(0.01, a.size(), b.size());
  report(8, (ca >= cb).all() && ks > crit,
         fmt::format("max-power minus nearest coverage min {:.4f}; KS {:.4f} vs critical {:.4f}",
                     (ca - cb).minCoeff(), ks, crit));
}

void variable_height() {
  const Eigen::ArrayXd db = theta_grid_db();
  RandomStream rng(200);
  Eigen::VectorXd heights(1000);
  for (auto& h : heights) h = 200.0 + 15.0 * rng.normal();
  const MomentFit fit = fit_normal_moments(heights);

  double worst = 0.0;
  std::string detail;
  for (const SpatialModel& spatial : {SpatialModel{Bpp{10}}, SpatialModel{FiniteHppp{0.01}}}) {
    SimulationConfig base;
    base.spatial = spatial;
    const double uni =
        variable_height_study(200.0, UniformHeight{160.0, 240.0}, base, db, mc(200000, 11)).max_gap;
    const double nor =
        variable_height_study(200.0, NormalHeight{fit.mean, fit.stddev}, base, db, mc(200000, 11))
            .max_gap;
    worst = std::max({worst, uni, nor});
    detail += fmt::format("{} uniform {:.4f} normal {:.4f}; ", describe(spatial), uni, nor);
  }
  report(9, worst <= 0.02,
         detail + fmt::format("fit N({:.1f}, {:.1f}), tol 0.02", fit.mean, fit.stddev));
}

void property_suites() {
  const ReceivedPowerDistribution power(CorridorGeometry(500.0, 100.0), ChannelParams{});
  const double ulo = power.log_lower(), uhi = power.log_upper();
  const QuadratureConfig cfg{1e-10, 1e-13, 4000};
  auto log_mass = [&](auto&& pdf) {
    return integrate([&](double u) { return std::exp(u) * pdf(std::exp(u)); }, ulo, uhi, cfg).value;
  };
  double norm = 0.0;
  norm = std::max(norm, std::abs(log_mass([&](double x) { return power.pdf(x); }) - 1.0));
  norm = std::max(
      norm, std::abs(log_mass([&](double x) { return max_power_pdf_bpp(x, 10, power); }) - 1.0));
  norm = std::max(
      norm, std::abs(log_mass([&](double x) { return max_power_pdf_hppp(x, 0.01, power); }) - 1.0));

  // median of the strongest of ten
  double lo = ulo, hi = uhi;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::pow(power.cdf_at_log(mid), 10.0) < 0.5 ? lo : hi) = mid;
  }
  const double x0 = std::exp(lo);

  double marg = 0.0;
  for (std::size_t n : {3u, 10u}) {
    const double integral =
        integrate(
            [&](double u) { return std::exp(u) * joint_top_two_pdf(x0, std::exp(u), n, power); },
            ulo, std::log(x0), cfg)
            .value;
    marg = std::max(marg, std::abs(integral / max_power_pdf_bpp(x0, n, power) - 1.0));
  }

  ChannelParams c3;
  c3.m = 3.0;
  const ReceivedPowerDistribution power3(CorridorGeometry(500.0, 100.0), c3);
  const BppLaplace bpp(power3, 10, x0);
  const HpppLaplace hppp(power3, 0.01, x0);
  const bool unit = bpp.evaluate(0.0) == 1.0 && hppp.evaluate(0.0) == 1.0;
  double fd_err = 0.0;
  for (double t : {0.3, 1.0, 3.0}) {
    const double s = 3.0 * t / x0, step = 1e-4 * s;
    for (int k = 1; k <= 2; ++k) {
      const double fb =
          (bpp.derivative(k - 1, s + step) - bpp.derivative(k - 1, s - step)) / (2 * step);
      const double fh =
          (hppp.derivative(k - 1, s + step) - hppp.derivative(k - 1, s - step)) / (2 * step);
      fd_err = std::max(fd_err, std::abs(bpp.derivative(k, s) / fb - 1.0));
      fd_err = std::max(fd_err, std::abs(hppp.derivative(k, s) / fh - 1.0));
    }
  }

  SimulationConfig sim;
  auto opts = mc(20000, 5);
  opts.workers = 1;
  const Eigen::VectorXd r1 = simulate_sir(sim, opts);
  opts.workers = 4;
  const Eigen::VectorXd r2 = simulate_sir(sim, opts);
  const bool identical =
      std::memcmp(r1.data(), r2.data(), sizeof(double) * static_cast<std::size_t>(r1.size())) == 0;

  report(10, norm <= 1e-5 && unit && marg <= 1e-6 && fd_err <= 1e-5 && identical,
         fmt::format("normalization {:.1e} (1e-5); Laplace(0)=1 {}; marginalization {:.1e} (1e-6); "
                     "derivative vs finite difference {:.1e} (1e-5); reruns identical {}",
                     norm, unit ? "yes" : "no", marg, fd_err, identical ? "yes" : "no"));
}

void replay_closure() {
  RandomStream rng(314);
  const CorridorGeometry geom(200.0, 100.0);
  const Trace trace = synthesize_trace(geom, ChannelParams{}, 1e-3, rng);
  const Eigen::ArrayXd db = theta_grid_db();
  ReplayOptions opt;
  opt.fading = ReplayFading::Redraw;
  opt.trials = 500000;
  opt.seed = 15;
  const auto replay = trace_replay(trace, opt, db);
  SimulationConfig cfg;
  cfg.geometry = geom;
  const auto direct = empirical_coverage(cfg, db, mc(500000, 16));
  const double gap = (replay.coverage.coverage - direct.coverage).abs().maxCoeff();
  report(
      11, gap <= 0.01,
      fmt::format("synthetic-trace replay vs direct simulation: max gap {:.4f} (tol 0.01)", gap));
}

}  // namespace

int main() {
  oracle_equivalence(1, Bpp{10});
  oracle_equivalence(2, FiniteHppp{0.01});
  fig3_orderings();
  fig4_height_trend();
  fig5_length_trend();
  fig6_corner();
  fig7_disc();
  policy_gap();
  variable_height();
  property_suites();
  replay_closure();
  fmt::print("{} of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
