// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <string>

#include "corridor/core.hpp"
#include "corridor/random.hpp"

namespace corridor {

enum class AssociationPolicy { MaxPower, MinDistance };

std::string to_string(AssociationPolicy policy);

/// One Monte Carlo draw of the network. Fading is not part of a realization;
/// it is drawn per link when the SIR is sampled.
struct NetworkRealization {
  /// Ground offsets from the receiver: column 0 along the corridor, column 1
  /// across it (always 0 for corridor models, used by the disc baseline).
  Eigen::MatrixX2d ground;
  Eigen::VectorXd heights;
  Eigen::VectorXd shadowing;
  /// S l(d), linear.
  Eigen::VectorXd rx_powers;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rx_powers.size()); }
  bool empty() const noexcept { return rx_powers.size() == 0; }
  Eigen::VectorXd distances() const;
};

struct SirSample {
  std::size_t serving_index = 0;
  /// Linear SIR; +inf when the serving UAV is alone.
  double sir = 0.0;
  std::size_t n_uavs = 0;

  bool infinite() const noexcept;
};

struct SimulationConfig {
  SpatialModel spatial = Bpp{10};
  CorridorGeometry geometry{500.0, 100.0};
  ChannelParams channel{};
  AssociationPolicy policy = AssociationPolicy::MaxPower;
};

struct MonteCarloOptions {
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

enum class Provenance { Analytic, Simulated, Replayed };

std::string to_string(Provenance provenance);

/// Coverage values over a grid of SIR thresholds given in dB.
struct CoverageCurve {
  Eigen::ArrayXd theta_db;
  Eigen::ArrayXd coverage;
  /// Binomial standard error; zero for analytic curves.
  Eigen::ArrayXd standard_error;
  Provenance provenance = Provenance::Simulated;
  /// Samples behind each point (after excluding empty HPPP realizations).
  std::size_t samples = 0;
};

/// Draws UAV positions, heights and shadowing; rx_powers = S l(d).
///
/// Heights and shadowing come from two child streams seeded from `rng`, so
/// runs that differ only in the height model share every other draw.
NetworkRealization sample_network(const SpatialModel& spatial, const CorridorGeometry& geometry,
                                  const ChannelParams& channel, RandomStream& rng);

/// Serving index; ties go to the lowest index. Throws EmptyNetworkError.
std::size_t associate(const NetworkRealization& realization, AssociationPolicy policy);

/// Draws Gamma(m, 1/m) fading per link (none when m is +inf) and forms
/// h0 Pr0 / sum_{i != 0} h_i Pr_i.
SirSample sir_sample(const NetworkRealization& realization, AssociationPolicy policy,
                     const ChannelParams& channel, RandomStream& rng);

/// SIR of every trial, trial t using RandomStream::for_trial(seed, t).
/// NaN marks discarded trials (empty HPPP corridor), +inf a lone UAV.
Eigen::VectorXd simulate_sir(const SimulationConfig& config, const MonteCarloOptions& options);

/// Fraction of non-NaN samples above each threshold.
CoverageCurve coverage_from_sir(const Eigen::Ref<const Eigen::VectorXd>& sir,
                                const Eigen::ArrayXd& theta_db,
                                Provenance provenance = Provenance::Simulated);

CoverageCurve empirical_coverage(const SimulationConfig& config, const Eigen::ArrayXd& theta_db,
                                 const MonteCarloOptions& options);

struct HeightStudyResult {
  CoverageCurve fixed;
  CoverageCurve variable;
  double max_gap = 0.0;
};

/// Fixed-height versus variable-height coverage with common random numbers.
HeightStudyResult variable_height_study(double fixed_h, const HeightModel& variable,
                                        const SimulationConfig& base,
                                        const Eigen::ArrayXd& theta_db,
                                        const MonteCarloOptions& options);

/// Runs fn(begin, end) over [0, n) split across workers.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn);

unsigned resolve_workers(unsigned requested) noexcept;

}  // namespace corridor

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace corridor {

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  const unsigned count =
      std::max(1u, std::min<unsigned>(resolve_workers(workers),
                                      static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (count == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> threads;
    threads.reserve(count);
    const std::size_t chunk = (n + count - 1) / count;
    for (unsigned w = 0; w < count; ++w) {
      const std::size_t begin = std::min(n, w * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      threads.emplace_back([&fn, &errors, w, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace corridor
