// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "corridor/core.hpp"
#include "corridor/random.hpp"
#include "corridor/simulator.hpp"
#include "corridor/stats.hpp"

namespace corridor {

/// Received power recorded along a flight path.
///
/// CSV form: header `position_m,height_m,rx_power_dbm`, one sample per row,
/// strictly increasing positions.
class Trace {
 public:
  Trace(Eigen::VectorXd positions, Eigen::VectorXd heights, Eigen::VectorXd rx_power_dbm);

  static Trace read_csv(const std::filesystem::path& path);
  static Trace parse_csv(std::istream& in);
  void write_csv(const std::filesystem::path& path) const;
  void write_csv(std::ostream& out) const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(positions_.size()); }
  const Eigen::VectorXd& positions() const noexcept { return positions_; }
  const Eigen::VectorXd& heights() const noexcept { return heights_; }
  const Eigen::VectorXd& rx_power_dbm() const noexcept { return power_dbm_; }
  /// Power in mW.
  const Eigen::VectorXd& rx_power_linear() const noexcept { return power_lin_; }

  double first() const noexcept { return positions_(0); }
  double last() const noexcept { return positions_(positions_.size() - 1); }
  /// Median spacing between consecutive samples.
  double nominal_spacing() const noexcept { return nominal_spacing_; }
  double max_spacing() const noexcept { return max_spacing_; }

  /// Index of the nearest sample. Positions more than half the largest
  /// spacing beyond either end throw TraceError.
  std::size_t nearest(double position) const;

 private:
  Eigen::VectorXd positions_, heights_, power_dbm_, power_lin_;
  double nominal_spacing_ = 0.0;
  double max_spacing_ = 0.0;
};

/// Model-generated trace: one sample every `spacing` meters over [-R, R],
/// each carrying an independent draw of S l(d) (optionally times fading).
Trace synthesize_trace(const CorridorGeometry& geometry, const ChannelParams& channel,
                       double spacing, RandomStream& rng, bool with_fading = false);

enum class ReplayFading {
  /// Trace powers already include small-scale fading; use them as recorded.
  FromTrace,
  /// Draw Gamma(m, 1/m) fading per emulated UAV on top of the trace power.
  Redraw,
};

struct ReplayOptions {
  /// Bpp or FiniteHppp; positions are drawn on [-half_length, half_length].
  SpatialModel spatial = Bpp{10};
  double half_length = 200.0;
  AssociationPolicy policy = AssociationPolicy::MaxPower;
  ReplayFading fading = ReplayFading::FromTrace;
  /// Fading parameter for ReplayFading::Redraw.
  double m = 1.0;
  /// When set, the trace must resolve positions to within this many meters.
  std::optional<double> mapping_accuracy = 0.5e-3;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  /// SIR histogram grid in dB.
  double histogram_lo_db = -40.0;
  double histogram_hi_db = 60.0;
  std::size_t histogram_bins = 200;
};

struct ReplayResult {
  CoverageCurve coverage;
  EmpiricalDistribution sir_pdf_db;
  /// Linear SIR per trial (NaN for empty HPPP trials).
  Eigen::VectorXd sir;
  double max_mapping_error = 0.0;
};

/// Emulates the network by mapping sampled positions onto the trace. The
/// strongest mapped power serves; the rest interfere.
ReplayResult trace_replay(const Trace& trace, const ReplayOptions& options,
                          const Eigen::ArrayXd& theta_db);

}  // namespace corridor
