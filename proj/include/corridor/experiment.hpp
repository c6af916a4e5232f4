// SPDX-License-Identifier: Apache-2.0
#pragma once

// Experiment orchestration behind the corridor_cov command line: JSON
// configuration, sweeps over one axis, result tables and the replay and
// height-study drivers.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corridor/core.hpp"
#include "corridor/simulator.hpp"
#include "corridor/stats.hpp"
#include "corridor/trace.hpp"

namespace corridor {

enum class SweepAxis { Theta, Lambda, HalfLength, Height, N };
enum class Method { Exact, Dominant, SingleDominant, MonteCarlo };
enum class OutputFormat { Csv, Json };

std::string to_string(SweepAxis axis);
std::string to_string(Method method);
SweepAxis parse_sweep_axis(const std::string& text);
Method parse_method(const std::string& text);
OutputFormat parse_format(const std::string& text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Theta;
  /// Explicit values win over the range.
  std::vector<double> values;
  std::optional<double> from, to, step;

  /// Values to visit; throws ParameterError when empty or malformed.
  std::vector<double> resolve() const;
};

struct ReplaySettings {
  std::optional<std::string> trace_path;
  /// Build a model trace in memory instead of reading one.
  bool synthetic = false;
  double synthetic_spacing = 0.5e-3;
  std::optional<std::string> save_trace;
  ReplayFading fading = ReplayFading::FromTrace;
  double half_length = 200.0;
  std::optional<double> mapping_accuracy = 0.5e-3;
  double histogram_lo_db = -40.0;
  double histogram_hi_db = 60.0;
  std::size_t histogram_bins = 200;
  std::optional<std::string> histogram_out;
};

struct HeightStudySettings {
  /// CSV with a `height_m` column (a trace file works too).
  std::optional<std::string> samples_path;
  double synthetic_mu = 200.0;
  double synthetic_sigma = 15.0;
  std::size_t synthetic_count = 100000;
  double fixed_height = 200.0;
  UniformHeight uniform{160.0, 240.0};
  double half_length = 200.0;
  double histogram_lo_db = -40.0;
  double histogram_hi_db = 60.0;
  std::size_t histogram_bins = 200;
  std::optional<std::string> report_out;
};

struct ExperimentConfig {
  std::string scenario = "default";
  std::string spatial = "bpp";  ///< bpp | hppp | disc
  std::size_t n = 10;
  /// HPPP intensity; defaults to n / (2R).
  std::optional<double> lambda;
  double half_length = 500.0;
  HeightModel height = FixedHeight{100.0};
  ChannelParams channel{};
  std::vector<double> theta_db{-3.0};
  SweepSpec sweep{};
  std::vector<Method> methods{Method::Exact};
  AssociationPolicy policy = AssociationPolicy::MaxPower;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::Csv;
  ReplaySettings replay{};
  HeightStudySettings height_study{};

  /// Throws ParameterError on inconsistent settings.
  void validate() const;
  SpatialModel spatial_model() const;
  CorridorGeometry geometry() const;
  double effective_lambda() const;
  /// Sweep values; a theta sweep without values or range uses theta_db.
  std::vector<double> sweep_values() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON of the settings that influence results (no workers/output).
std::string canonical_json(const ExperimentConfig& config);
/// FNV-1a 64 of canonical_json, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ResultRow {
  double sweep_value = 0.0;
  std::string method;
  double coverage = 0.0;
  double standard_error = 0.0;
};

struct ResultTable {
  std::string scenario;
  std::string sweep_axis;
  std::uint64_t seed = 0;
  std::string config_hash;
  double runtime_seconds = 0.0;
  std::vector<ResultRow> rows;
  /// Extra key/value report entries (JSON output only).
  std::vector<std::pair<std::string, double>> report;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
  void write(std::ostream& out, OutputFormat format) const;
};

/// Writes to config.out or stdout. Throws IoError.
void emit(const ResultTable& table, const ExperimentConfig& config);

ResultTable run_coverage(const ExperimentConfig& config);

struct ReplayOutput {
  ResultTable table;
  EmpiricalDistribution maxpower_pdf;
  EmpiricalDistribution mindistance_pdf;
  double max_mapping_error = 0.0;
};
ReplayOutput run_replay(const ExperimentConfig& config);
/// CSV `sir_db,maxpower,mindistance`.
void write_histograms(std::ostream& out, const ReplayOutput& replay);

struct HeightStudyOutput {
  ResultTable table;
  std::size_t sample_count = 0;
  MomentFit fit;
  double kl_normal = 0.0;
  double kl_uniform = 0.0;
  double max_gap_normal = 0.0;
  double max_gap_uniform = 0.0;
};
/// Throws InsufficientDataError for fewer than 30 height samples.
HeightStudyOutput run_height_study(const ExperimentConfig& config);
/// Reads a `height_m` column from CSV.
std::vector<double> read_height_samples(const std::filesystem::path& path);

struct SelftestLine {
  std::string name;
  bool passed = false;
  std::string detail;
};
/// Fast oracle checks, one entry per check.
std::vector<SelftestLine> run_selftest(std::uint64_t seed, unsigned workers);

}  // namespace corridor
