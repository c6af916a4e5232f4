// SPDX-License-Identifier: Apache-2.0
#include "corridor/trace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "corridor/distributions.hpp"
#include "corridor/errors.hpp"

namespace corridor {
namespace {

constexpr const char* kHeader = "position_m,height_m,rx_power_dbm";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw TraceError(fmt::format("line {}: cannot parse '{}' as a number", line, field), line);
  }
  return v;
}

}  // namespace

Trace::Trace(Eigen::VectorXd positions, Eigen::VectorXd heights, Eigen::VectorXd rx_power_dbm)
    : positions_(std::move(positions)),
      heights_(std::move(heights)),
      power_dbm_(std::move(rx_power_dbm)) {
  if (positions_.size() < 2) throw TraceError("trace needs at least two samples");
  if (heights_.size() != positions_.size() || power_dbm_.size() != positions_.size()) {
    throw TraceError("trace columns have different lengths");
  }
  std::vector<double> gaps(static_cast<std::size_t>(positions_.size() - 1));
  for (Eigen::Index i = 1; i < positions_.size(); ++i) {
    const double gap = positions_(i) - positions_(i - 1);
    if (!(gap > 0.0)) {
      // +2: one for the header, one for 1-based numbering.
      throw TraceError(fmt::format("line {}: positions must be strictly increasing", i + 2),
                       static_cast<std::size_t>(i + 2));
    }
    gaps[static_cast<std::size_t>(i - 1)] = gap;
  }
  max_spacing_ = *std::max_element(gaps.begin(), gaps.end());
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2),
                   gaps.end());
  nominal_spacing_ = gaps[gaps.size() / 2];
  power_lin_ = power_dbm_.unaryExpr([](double db) { return db_to_linear(db); });
}

Trace Trace::parse_csv(std::istream& in) {
  std::string row;
  std::size_t line = 0;
  if (!std::getline(in, row)) throw TraceError("trace is empty", 1);
  ++line;
  if (trim(row) != kHeader) {
    throw TraceError(fmt::format("line 1: expected header '{}'", kHeader), 1);
  }
  std::vector<double> pos, hgt, pwr;
  while (std::getline(in, row)) {
    ++line;
    const std::string_view view = trim(row);
    if (view.empty()) continue;
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
      throw TraceError(fmt::format("line {}: expected 3 comma-separated fields", line), line);
    }
    const double p = parse_field(view.substr(0, c1), line);
    const double h = parse_field(view.substr(c1 + 1, c2 - c1 - 1), line);
    const double w = parse_field(view.substr(c2 + 1), line);
    if (!pos.empty() && !(p > pos.back())) {
      throw TraceError(fmt::format("line {}: positions must be strictly increasing", line), line);
    }
    if (!(h > 0.0)) throw TraceError(fmt::format("line {}: height must be positive", line), line);
    pos.push_back(p);
    hgt.push_back(h);
    pwr.push_back(w);
  }
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::VectorXd(
        Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  return Trace(to_vec(pos), to_vec(hgt), to_vec(pwr));
}

Trace Trace::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError(fmt::format("cannot open trace file '{}'", path.string()));
  return parse_csv(in);
}

void Trace::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  for (Eigen::Index i = 0; i < positions_.size(); ++i) {
    out << fmt::format("{},{},{}\n", positions_(i), heights_(i), power_dbm_(i));
  }
}

void Trace::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw TraceError(fmt::format("cannot write trace file '{}'", path.string()));
  write_csv(out);
}

std::size_t Trace::nearest(double position) const {
  const double slack = 0.5 * max_spacing_;
  if (!(position >= first() - slack && position <= last() + slack)) {
    throw TraceError(fmt::format("position {} m lies outside the trace extent [{}, {}] m", position,
                                 first(), last()));
  }
  const auto* begin = positions_.data();
  const auto* end = begin + positions_.size();
  const auto* it = std::lower_bound(begin, end, position);
  if (it == end) return size() - 1;
  if (it == begin) return 0;
  return (position - *(it - 1) <= *it - position) ? static_cast<std::size_t>(it - 1 - begin)
                                                  : static_cast<std::size_t>(it - begin);
}

Trace synthesize_trace(const CorridorGeometry& geometry, const ChannelParams& channel,
                       double spacing, RandomStream& rng, bool with_fading) {
  if (!(spacing > 0.0)) throw ParameterError("trace spacing must be positive");
  const double R = geometry.half_length();
  const auto n = static_cast<Eigen::Index>(std::floor(2.0 * R / spacing + 1e-9)) + 1;
  const InverseGamma shadow(channel.q, channel.shadowing_scale());
  const bool fade = with_fading && std::isfinite(channel.m);
  Eigen::VectorXd pos(n), hgt(n), pwr(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pos(i) = -R + static_cast<double>(i) * spacing;
    hgt(i) = height_from_uniform(geometry.height_model(), rng.uniform_open());
    double p = shadow.sample(rng) * path_loss(std::hypot(pos(i), hgt(i)), channel);
    if (fade) p *= rng.gamma(channel.m) / channel.m;
    pwr(i) = linear_to_db(p);
  }
  return Trace(std::move(pos), std::move(hgt), std::move(pwr));
}

ReplayResult trace_replay(const Trace& trace, const ReplayOptions& options,
                          const Eigen::ArrayXd& theta_db) {
  if (options.trials == 0) throw ParameterError("trials must be >= 1");
  if (std::holds_alternative<Disc2D>(options.spatial)) {
    throw ParameterError("trace replay supports the corridor models only");
  }
  validate(options.spatial);
  if (options.fading == ReplayFading::Redraw && !(options.m > 0.0)) {
    throw ParameterError("fading parameter m must be positive");
  }
  // slack for grids written with rounded positions
  if (options.mapping_accuracy &&
      0.5 * trace.max_spacing() > *options.mapping_accuracy * (1.0 + 1e-9)) {
    throw TraceError(fmt::format("trace spacing {} m cannot meet the mapping accuracy {} m",
                                 trace.max_spacing(), *options.mapping_accuracy));
  }
  const double R = options.half_length;
  const double slack = 0.5 * trace.max_spacing();
  if (trace.first() > -R + slack || trace.last() < R - slack) {
    throw TraceError(fmt::format("trace [{}, {}] m does not cover the corridor [{}, {}] m",
                                 trace.first(), trace.last(), -R, R));
  }

  const auto& power = trace.rx_power_linear();
  const auto& pos = trace.positions();
  const auto& hgt = trace.heights();
  const bool redraw = options.fading == ReplayFading::Redraw && std::isfinite(options.m);

  ReplayResult out{.coverage = {},
                   .sir_pdf_db = EmpiricalDistribution(
                       options.histogram_lo_db, options.histogram_hi_db, options.histogram_bins),
                   .sir = Eigen::VectorXd(static_cast<Eigen::Index>(options.trials)),
                   .max_mapping_error = 0.0};
  std::mutex merge;
  parallel_for(options.trials, options.workers, [&](std::size_t begin, std::size_t end) {
    double worst = 0.0;
    std::vector<std::size_t> idx;
    for (std::size_t t = begin; t < end; ++t) {
      RandomStream rng = RandomStream::for_trial(options.seed, t);
      std::size_t n = 0;
      if (const auto* b = std::get_if<Bpp>(&options.spatial)) {
        n = b->n;
      } else {
        n = static_cast<std::size_t>(
            rng.poisson(std::get<FiniteHppp>(options.spatial).lambda * 2.0 * R));
      }
      if (n == 0) {
        out.sir(static_cast<Eigen::Index>(t)) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      idx.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double y = rng.uniform(-R, R);
        idx[i] = trace.nearest(y);
        worst = std::max(worst, std::abs(pos(static_cast<Eigen::Index>(idx[i])) - y));
      }
      std::size_t serving = 0;
      for (std::size_t i = 1; i < n; ++i) {
        const auto a = static_cast<Eigen::Index>(idx[i]);
        const auto b = static_cast<Eigen::Index>(idx[serving]);
        const bool better = options.policy == AssociationPolicy::MaxPower
                                ? power(a) > power(b)
                                : std::hypot(pos(a), hgt(a)) < std::hypot(pos(b), hgt(b));
        if (better) serving = i;
      }
      double signal = 0.0, interference = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double p = power(static_cast<Eigen::Index>(idx[i]));
        if (redraw) p *= rng.gamma(options.m) / options.m;
        (i == serving ? signal : interference) += p;
      }
      out.sir(static_cast<Eigen::Index>(t)) =
          n == 1 ? std::numeric_limits<double>::infinity() : signal / interference;
    }
    std::lock_guard lock(merge);
    out.max_mapping_error = std::max(out.max_mapping_error, worst);
  });

  for (double s : out.sir) {
    if (!std::isnan(s)) out.sir_pdf_db.add(std::isinf(s) ? s : linear_to_db(s));
  }
  out.sir_pdf_db.normalize();
  out.coverage = coverage_from_sir(out.sir, theta_db, Provenance::Replayed);
  return out;
}

}  // namespace corridor
