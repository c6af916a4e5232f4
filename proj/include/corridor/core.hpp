// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace corridor {

inline constexpr double kSpeedOfLight = 299792458.0;

// ---------------------------------------------------------------------------
// Height models

struct FixedHeight {
  double h = 100.0;
};

struct UniformHeight {
  double lo = 160.0;
  double hi = 240.0;
};

/// Normal height truncated to h > 0.
struct NormalHeight {
  double mu = 200.0;
  double sigma = 15.0;
};

/// Resamples recorded heights (bootstrap by inverse empirical CDF).
struct EmpiricalHeight {
  explicit EmpiricalHeight(std::vector<double> samples);
  /// Sorted, shared so copies of a geometry stay cheap.
  std::shared_ptr<const std::vector<double>> sorted;
};

using HeightModel = std::variant<FixedHeight, UniformHeight, NormalHeight, EmpiricalHeight>;

void validate(const HeightModel& model);
double mean_height(const HeightModel& model);
bool is_fixed(const HeightModel& model) noexcept;
/// Height from one uniform variate u in (0, 1) by inverse CDF.
double height_from_uniform(const HeightModel& model, double u);
std::string describe(const HeightModel& model);

// ---------------------------------------------------------------------------
// Geometry

/// Corridor L(-R, R) at height h above a receiver at the ground origin.
class CorridorGeometry {
 public:
  CorridorGeometry(double half_length, HeightModel height);
  CorridorGeometry(double half_length, double fixed_height)
      : CorridorGeometry(half_length, FixedHeight{fixed_height}) {}

  double half_length() const noexcept { return half_length_; }
  /// |L(-R, R)| = 2R.
  double length() const noexcept { return 2.0 * half_length_; }
  const HeightModel& height_model() const noexcept { return height_; }

  /// Height of a fixed-height corridor; throws ParameterError otherwise.
  double fixed_height() const;
  /// Largest link distance sqrt(h^2 + R^2) for a fixed-height corridor.
  double max_distance() const;

 private:
  double half_length_;
  HeightModel height_;
};

// ---------------------------------------------------------------------------
// Channel

struct ChannelParams {
  double alpha = 2.2;
  /// When set, path loss includes K = (c / (4 pi f_c))^2.
  std::optional<double> carrier_frequency_hz;
  double q = 2.0;
  /// Inverse-gamma scale; defaults to q - 1 (unit-mean shadowing).
  std::optional<double> gamma;
  /// Nakagami-m; +inf disables fading in the simulator.
  double m = 1.0;

  double shadowing_scale() const noexcept { return gamma.value_or(q - 1.0); }
  double carrier_factor() const noexcept;

  /// Checks the simulator-level constraints (m > 0).
  void validate() const;
  /// Additionally requires integer m >= 1.
  void validate_integer_m() const;
  bool has_integer_m() const noexcept;
};

/// K = (c / (4 pi f_c))^2.
double carrier_factor(double carrier_frequency_hz);

/// K * d^(-alpha); K = 1 unless a carrier frequency is set.
double path_loss(double d, const ChannelParams& params);

// ---------------------------------------------------------------------------
// Spatial models

struct Bpp {
  std::size_t n = 10;
};

struct FiniteHppp {
  /// UAVs per meter.
  double lambda = 0.01;
};

/// N UAVs uniform in a disc of radius R at height h (baseline).
struct Disc2D {
  std::size_t n = 10;
};

using SpatialModel = std::variant<Bpp, FiniteHppp, Disc2D>;

void validate(const SpatialModel& model);
std::string describe(const SpatialModel& model);

// ---------------------------------------------------------------------------
// Link distance and path-loss value

/// Distance from the receiver to a UAV uniform on L(-R, R) at fixed height h.
/// f(d) = d / (R sqrt(d^2 - h^2)) on [h, sqrt(h^2 + R^2)].
class LinkDistance {
 public:
  LinkDistance(double h, double half_length);

  double min() const noexcept { return h_; }
  double max() const noexcept { return d_max_; }
  double pdf(double d) const noexcept;
  double cdf(double d) const noexcept;
  /// Distance for ground offset u*R, u uniform on [-1, 1].
  double from_offset(double y) const noexcept;

 private:
  double h_;
  double half_length_;
  double d_max_;
};

/// Density of l(d) = d^(-alpha), supported on [(h^2 + R^2)^(-alpha/2), h^(-alpha)].
double pathloss_value_pdf(double x, double h, double half_length, double alpha);

}  // namespace corridor

namespace corridor {

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) noexcept { return 10.0 * std::log10(x); }

}  // namespace corridor
