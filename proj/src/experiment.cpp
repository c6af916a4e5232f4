// SPDX-License-Identifier: Apache-2.0
#include "corridor/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "corridor/analytic.hpp"
#include "corridor/errors.hpp"
#include "corridor/quadrature.hpp"

namespace corridor {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::ArrayXd to_array(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// ---------------------------------------------------------------------------
// JSON <-> config

json height_to_json(const HeightModel& model) {
  return std::visit(overloaded{
                        [](const FixedHeight& m) { return json(m.h); },
                        [](const UniformHeight& m) {
                          return json{{"model", "uniform"}, {"lo", m.lo}, {"hi", m.hi}};
                        },
                        [](const NormalHeight& m) {
                          return json{{"model", "normal"}, {"mu", m.mu}, {"sigma", m.sigma}};
                        },
                        [](const EmpiricalHeight& m) {
                          return json{{"model", "empirical"}, {"samples", *m.sorted}};
                        },
                    },
                    model);
}

HeightModel height_from_json(const json& j) {
  if (j.is_number()) return FixedHeight{j.get<double>()};
  const auto model = j.at("model").get<std::string>();
  if (model == "fixed") return FixedHeight{j.at("h").get<double>()};
  if (model == "uniform") return UniformHeight{j.at("lo").get<double>(), j.at("hi").get<double>()};
  if (model == "normal") return NormalHeight{j.at("mu").get<double>(), j.at("sigma").get<double>()};
  throw ParameterError("unknown height model '" + model + "'");
}

template <class T>
void read_opt(const json& j, const char* key, T& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& target) {
  if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["spatial"] = {{"model", c.spatial}, {"n", c.n}};
  if (c.lambda) j["spatial"]["lambda"] = *c.lambda;
  j["geometry"] = {{"half_length", c.half_length}, {"height", height_to_json(c.height)}};
  j["channel"] = {{"alpha", c.channel.alpha}, {"q", c.channel.q}, {"m", c.channel.m}};
  if (!std::isfinite(c.channel.m)) j["channel"]["m"] = "inf";
  if (c.channel.gamma) j["channel"]["gamma"] = *c.channel.gamma;
  if (c.channel.carrier_frequency_hz) {
    j["channel"]["carrier_frequency_hz"] = *c.channel.carrier_frequency_hz;
  }
  j["theta_db"] = c.theta_db;
  json sweep = {{"axis", to_string(c.sweep.axis)}};
  if (!c.sweep.values.empty()) sweep["values"] = c.sweep.values;
  if (c.sweep.from) sweep["from"] = *c.sweep.from;
  if (c.sweep.to) sweep["to"] = *c.sweep.to;
  if (c.sweep.step) sweep["step"] = *c.sweep.step;
  j["sweep"] = sweep;
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["policy"] = to_string(c.policy);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output"] = {{"format", c.format == OutputFormat::Csv ? "csv" : "json"}};
  if (c.out) j["output"]["path"] = *c.out;

  const auto& r = c.replay;
  j["replay"] = {
      {"synthetic", r.synthetic},
      {"synthetic_spacing", r.synthetic_spacing},
      {"fading", r.fading == ReplayFading::FromTrace ? "fromtrace" : "redraw"},
      {"half_length", r.half_length},
      {"histogram",
       {{"lo_db", r.histogram_lo_db}, {"hi_db", r.histogram_hi_db}, {"bins", r.histogram_bins}}}};
  if (r.trace_path) j["replay"]["trace"] = *r.trace_path;
  if (r.save_trace) j["replay"]["save_trace"] = *r.save_trace;
  if (r.mapping_accuracy) j["replay"]["mapping_accuracy"] = *r.mapping_accuracy;
  if (r.histogram_out) j["replay"]["histogram_out"] = *r.histogram_out;

  const auto& h = c.height_study;
  j["height_study"] = {
      {"synthetic",
       {{"mu", h.synthetic_mu}, {"sigma", h.synthetic_sigma}, {"count", h.synthetic_count}}},
      {"fixed_height", h.fixed_height},
      {"uniform", {{"lo", h.uniform.lo}, {"hi", h.uniform.hi}}},
      {"half_length", h.half_length},
      {"histogram",
       {{"lo_db", h.histogram_lo_db}, {"hi_db", h.histogram_hi_db}, {"bins", h.histogram_bins}}}};
  if (h.samples_path) j["height_study"]["samples"] = *h.samples_path;
  if (h.report_out) j["height_study"]["report_out"] = *h.report_out;
  return j;
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig c;
  read_opt(j, "scenario", c.scenario);
  if (j.contains("spatial")) {
    const auto& s = j.at("spatial");
    read_opt(s, "model", c.spatial);
    read_opt(s, "n", c.n);
    read_opt(s, "lambda", c.lambda);
  }
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    read_opt(g, "half_length", c.half_length);
    if (g.contains("height")) c.height = height_from_json(g.at("height"));
  }
  if (j.contains("channel")) {
    const auto& ch = j.at("channel");
    read_opt(ch, "alpha", c.channel.alpha);
    read_opt(ch, "q", c.channel.q);
    read_opt(ch, "gamma", c.channel.gamma);
    read_opt(ch, "carrier_frequency_hz", c.channel.carrier_frequency_hz);
    if (ch.contains("m")) {
      const auto& m = ch.at("m");
      if (m.is_string()) {
        if (m.get<std::string>() != "inf")
          throw ParameterError("channel.m must be a number or \"inf\"");
        c.channel.m = std::numeric_limits<double>::infinity();
      } else {
        c.channel.m = m.get<double>();
      }
    }
  }
  if (j.contains("theta_db")) {
    const auto& t = j.at("theta_db");
    c.theta_db = t.is_array() ? t.get<std::vector<double>>() : std::vector<double>{t.get<double>()};
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    if (s.contains("axis")) c.sweep.axis = parse_sweep_axis(s.at("axis").get<std::string>());
    read_opt(s, "values", c.sweep.values);
    read_opt(s, "from", c.sweep.from);
    read_opt(s, "to", c.sweep.to);
    read_opt(s, "step", c.sweep.step);
  }
  if (j.contains("methods")) {
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  }
  if (j.contains("policy")) {
    const auto p = j.at("policy").get<std::string>();
    if (p == "maxpower")
      c.policy = AssociationPolicy::MaxPower;
    else if (p == "mindistance")
      c.policy = AssociationPolicy::MinDistance;
    else
      throw ParameterError("unknown policy '" + p + "'");
  }
  read_opt(j, "trials", c.trials);
  read_opt(j, "seed", c.seed);
  read_opt(j, "workers", c.workers);
  if (j.contains("output")) {
    const auto& o = j.at("output");
    read_opt(o, "path", c.out);
    if (o.contains("format")) c.format = parse_format(o.at("format").get<std::string>());
  }
  if (j.contains("replay")) {
    const auto& r = j.at("replay");
    auto& d = c.replay;
    read_opt(r, "trace", d.trace_path);
    read_opt(r, "synthetic", d.synthetic);
    read_opt(r, "synthetic_spacing", d.synthetic_spacing);
    read_opt(r, "save_trace", d.save_trace);
    if (r.contains("fading")) {
      const auto f = r.at("fading").get<std::string>();
      if (f == "fromtrace")
        d.fading = ReplayFading::FromTrace;
      else if (f == "redraw")
        d.fading = ReplayFading::Redraw;
      else
        throw ParameterError("replay.fading must be fromtrace or redraw");
    }
    read_opt(r, "half_length", d.half_length);
    if (r.contains("mapping_accuracy")) {
      d.mapping_accuracy = r.at("mapping_accuracy").is_null()
                               ? std::nullopt
                               : std::optional<double>(r.at("mapping_accuracy").get<double>());
    }
    if (r.contains("histogram")) {
      const auto& hg = r.at("histogram");
      read_opt(hg, "lo_db", d.histogram_lo_db);
      read_opt(hg, "hi_db", d.histogram_hi_db);
      read_opt(hg, "bins", d.histogram_bins);
    }
    read_opt(r, "histogram_out", d.histogram_out);
  }
  if (j.contains("height_study")) {
    const auto& h = j.at("height_study");
    auto& d = c.height_study;
    read_opt(h, "samples", d.samples_path);
    if (h.contains("synthetic")) {
      const auto& s = h.at("synthetic");
      read_opt(s, "mu", d.synthetic_mu);
      read_opt(s, "sigma", d.synthetic_sigma);
      read_opt(s, "count", d.synthetic_count);
    }
    read_opt(h, "fixed_height", d.fixed_height);
    if (h.contains("uniform")) {
      read_opt(h.at("uniform"), "lo", d.uniform.lo);
      read_opt(h.at("uniform"), "hi", d.uniform.hi);
    }
    read_opt(h, "half_length", d.half_length);
    if (h.contains("histogram")) {
      const auto& hg = h.at("histogram");
      read_opt(hg, "lo_db", d.histogram_lo_db);
      read_opt(hg, "hi_db", d.histogram_hi_db);
      read_opt(hg, "bins", d.histogram_bins);
    }
    read_opt(h, "report_out", d.report_out);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Coverage evaluation

CoverageMethod analytic_method(Method m) {
  switch (m) {
    case Method::Exact:
      return CoverageMethod::Exact;
    case Method::Dominant:
      return CoverageMethod::DominantMeanResidual;
    case Method::SingleDominant:
      return CoverageMethod::SingleDominant;
    case Method::MonteCarlo:
      break;
  }
  throw ContractError("analytic_method: Monte Carlo has no analytic counterpart");
}

void check_method_supported(Method method, const ExperimentConfig& c) {
  if (method == Method::MonteCarlo) return;
  if (c.spatial == "disc") {
    throw ParameterError("the disc baseline is simulated only; use method mc");
  }
  if (c.spatial == "hppp" && method != Method::Exact) {
    throw ParameterError("method " + to_string(method) + " is available for bpp only");
  }
  if (method == Method::Exact) c.channel.validate_integer_m();
  if (!is_fixed(c.height)) {
    throw ParameterError("analytic methods need a fixed height; use method mc");
  }
}

/// Coverage of `config` at the linear thresholds for one method.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> evaluate(const ExperimentConfig& config, Method method,
                                                   const Eigen::ArrayXd& theta_db,
                                                   double sweep_value) {
  check_method_supported(method, config);
  if (method == Method::MonteCarlo) {
    SimulationConfig sim{config.spatial_model(), config.geometry(), config.channel, config.policy};
    const CoverageCurve curve = empirical_coverage(
        sim, theta_db, MonteCarloOptions{config.trials, config.seed, config.workers});
    return {curve.coverage, curve.standard_error};
  }
  try {
    const ReceivedPowerDistribution power(config.geometry(), config.channel);
    const Eigen::ArrayXd lin = theta_db.unaryExpr([](double t) { return db_to_linear(t); });
    Eigen::ArrayXd cov =
        coverage_curve(lin, config.spatial_model(), analytic_method(method), power);
    return {cov, Eigen::ArrayXd::Zero(cov.size())};
  } catch (const AccuracyError& e) {
    throw AccuracyError(fmt::format("{} coverage at {} = {}: {}", to_string(method),
                                    to_string(config.sweep.axis), sweep_value, e.what()),
                        e.best_estimate(), e.error_estimate(), e.level());
  }
}

ExperimentConfig at_sweep_point(const ExperimentConfig& base, double v) {
  ExperimentConfig c = base;
  switch (base.sweep.axis) {
    case SweepAxis::Theta:
      break;
    case SweepAxis::Lambda:
      c.lambda = v;
      break;
    case SweepAxis::HalfLength:
      c.half_length = v;
      break;
    case SweepAxis::Height:
      c.height = FixedHeight{v};
      break;
    case SweepAxis::N:
      if (!(v >= 1.0) || v != std::floor(v))
        throw ParameterError("N sweep values must be integers >= 1");
      c.n = static_cast<std::size_t>(v);
      break;
  }
  return c;
}

ResultTable table_header(const ExperimentConfig& c) {
  ResultTable t;
  t.scenario = c.scenario;
  t.sweep_axis = to_string(c.sweep.axis);
  t.seed = c.seed;
  t.config_hash = config_hash(c);
  return t;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

}  // namespace

// ---------------------------------------------------------------------------
// Enum names

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Theta:
      return "theta";
    case SweepAxis::Lambda:
      return "lambda";
    case SweepAxis::HalfLength:
      return "R";
    case SweepAxis::Height:
      return "h";
    case SweepAxis::N:
      return "N";
  }
  return "?";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Exact:
      return "exact";
    case Method::Dominant:
      return "dominant";
    case Method::SingleDominant:
      return "single-dominant";
    case Method::MonteCarlo:
      return "mc";
  }
  return "?";
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "theta") return SweepAxis::Theta;
  if (text == "lambda") return SweepAxis::Lambda;
  if (text == "R") return SweepAxis::HalfLength;
  if (text == "h") return SweepAxis::Height;
  if (text == "N") return SweepAxis::N;
  throw ParameterError("unknown sweep axis '" + text + "' (theta, lambda, R, h, N)");
}

Method parse_method(const std::string& text) {
  if (text == "exact") return Method::Exact;
  if (text == "dominant") return Method::Dominant;
  if (text == "single-dominant") return Method::SingleDominant;
  if (text == "mc" || text == "montecarlo") return Method::MonteCarlo;
  throw ParameterError("unknown method '" + text + "' (exact, dominant, single-dominant, mc)");
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw ParameterError("unknown format '" + text + "' (csv, json)");
}

// ---------------------------------------------------------------------------
// Config

std::vector<double> SweepSpec::resolve() const {
  if (!values.empty()) return values;
  if (!from || !to || !step) throw ParameterError("sweep needs values or from/to/step");
  if (!(*step > 0.0) || !std::isfinite(*step)) throw ParameterError("sweep step must be > 0");
  if (*to < *from) throw ParameterError("empty sweep range: to < from");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((*to - *from) / *step + 1e-9)) + 1;
  if (count > 100000) throw ParameterError("sweep has too many points");
  for (std::size_t i = 0; i < count; ++i) out.push_back(*from + static_cast<double>(i) * *step);
  return out;
}

std::vector<double> ExperimentConfig::sweep_values() const {
  if (sweep.axis == SweepAxis::Theta && sweep.values.empty() && !sweep.from && !sweep.to) {
    if (theta_db.empty()) throw ParameterError("theta grid is empty");
    return theta_db;
  }
  return sweep.resolve();
}

void ExperimentConfig::validate() const {
  if (spatial != "bpp" && spatial != "hppp" && spatial != "disc") {
    throw ParameterError("spatial model must be bpp, hppp or disc");
  }
  if (trials == 0) throw ParameterError("trials must be >= 1");
  if (methods.empty()) throw ParameterError("no methods requested");
  if (theta_db.empty()) throw ParameterError("theta grid is empty");
  const auto values = sweep_values();
  if (sweep.axis != SweepAxis::Theta && theta_db.size() != 1) {
    throw ParameterError("sweeps over " + to_string(sweep.axis) + " need exactly one theta");
  }
  if (sweep.axis == SweepAxis::Lambda && spatial != "hppp") {
    throw ParameterError("lambda sweeps need the hppp model");
  }
  if (!(half_length > 0.0)) throw ParameterError("half_length must be > 0");
  corridor::validate(height);
  channel.validate();
  corridor::validate(spatial_model());
  (void)values;
}

double ExperimentConfig::effective_lambda() const {
  return lambda.value_or(static_cast<double>(n) / (2.0 * half_length));
}

SpatialModel ExperimentConfig::spatial_model() const {
  if (spatial == "hppp") return FiniteHppp{effective_lambda()};
  if (spatial == "disc") return Disc2D{n};
  return Bpp{n};
}

CorridorGeometry ExperimentConfig::geometry() const {
  return CorridorGeometry(half_length, height);
}

ExperimentConfig config_from_json_text(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str());
}

std::string canonical_json(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("workers");
  j.erase("output");
  j["replay"].erase("save_trace");
  j["replay"].erase("histogram_out");
  j["height_study"].erase("report_out");
  return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------------------
// Result tables

void ResultTable::write_csv(std::ostream& out) const {
  out << "sweep_value,method,coverage,stderr,seed,config_hash\n";
  for (const auto& r : rows) {
    out << csv_number(r.sweep_value) << ',' << r.method << ',' << csv_number(r.coverage) << ','
        << csv_number(r.standard_error) << ',' << seed << ',' << config_hash << '\n';
  }
}

void ResultTable::write_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["sweep_axis"] = sweep_axis;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["runtime_seconds"] = runtime_seconds;
  if (!report.empty()) {
    nlohmann::ordered_json rep = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report) rep[k] = v;
    j["report"] = rep;
  }
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"sweep_value", r.sweep_value},
                         {"method", r.method},
                         {"coverage", r.coverage},
                         {"stderr", r.standard_error},
                         {"seed", seed},
                         {"config_hash", config_hash}});
  }
  out << j.dump(2) << '\n';
}

void ResultTable::write(std::ostream& out, OutputFormat format) const {
  if (format == OutputFormat::Csv) {
    write_csv(out);
  } else {
    write_json(out);
  }
}

void emit(const ResultTable& table, const ExperimentConfig& config) {
  if (!config.out) {
    table.write(std::cout, config.format);
    return;
  }
  std::ofstream out(*config.out);
  if (!out) throw IoError("cannot write output file '" + *config.out + "'");
  table.write(out, config.format);
  if (!out) throw IoError("write failed for '" + *config.out + "'");
}

// ---------------------------------------------------------------------------
// Commands

ResultTable run_coverage(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ResultTable table = table_header(config);
  const auto values = config.sweep_values();
  for (Method method : config.methods) {
    if (config.sweep.axis == SweepAxis::Theta) {
      const auto [cov, se] = evaluate(config, method, to_array(values), 0.0);
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        table.rows.push_back({values[i], to_string(method), cov(k), se(k)});
      }
      continue;
    }
    for (double v : values) {
      const ExperimentConfig point = at_sweep_point(config, v);
      point.validate();
      const auto [cov, se] = evaluate(point, method, to_array(point.theta_db), v);
      table.rows.push_back({v, to_string(method), cov(0), se(0)});
    }
  }
  table.runtime_seconds = seconds_since(t0);
  return table;
}

ReplayOutput run_replay(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& rs = config.replay;
  if (config.spatial == "disc") throw ParameterError("trace replay supports bpp and hppp only");
  if (config.trials == 0) throw ParameterError("trials must be >= 1");
  config.channel.validate();

  std::optional<Trace> trace;
  if (rs.trace_path) {
    trace = Trace::read_csv(*rs.trace_path);
  } else if (rs.synthetic) {
    RandomStream rng(splitmix64(config.seed ^ 0x7472616365ULL));
    trace = synthesize_trace(CorridorGeometry(rs.half_length, config.height), config.channel,
                             rs.synthetic_spacing, rng);
  } else {
    throw ParameterError("replay needs a trace file or the synthetic option");
  }
  if (rs.save_trace) {
    try {
      trace->write_csv(*rs.save_trace);
    } catch (const TraceError& e) {
      throw IoError(e.what());
    }
  }

  ReplayOptions opt;
  opt.spatial = config.spatial == "hppp"
                    ? SpatialModel{FiniteHppp{config.lambda.value_or(static_cast<double>(config.n) /
                                                                     (2.0 * rs.half_length))}}
                    : SpatialModel{Bpp{config.n}};
  opt.half_length = rs.half_length;
  opt.fading = rs.fading;
  opt.m = config.channel.m;
  opt.mapping_accuracy = rs.mapping_accuracy;
  opt.trials = config.trials;
  opt.seed = config.seed;
  opt.workers = config.workers;
  opt.histogram_lo_db = rs.histogram_lo_db;
  opt.histogram_hi_db = rs.histogram_hi_db;
  opt.histogram_bins = rs.histogram_bins;

  const auto thetas =
      config.sweep.axis == SweepAxis::Theta ? config.sweep_values() : config.theta_db;
  const Eigen::ArrayXd theta = to_array(thetas);

  opt.policy = AssociationPolicy::MaxPower;
  ReplayResult maxp = trace_replay(*trace, opt, theta);
  opt.policy = AssociationPolicy::MinDistance;
  ReplayResult mind = trace_replay(*trace, opt, theta);

  ReplayOutput out{table_header(config), maxp.sir_pdf_db, mind.sir_pdf_db,
                   std::max(maxp.max_mapping_error, mind.max_mapping_error)};
  out.table.sweep_axis = "theta";
  for (const auto* r : {&maxp, &mind}) {
    const std::string name = r == &maxp ? "replay-maxpower" : "replay-mindistance";
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      out.table.rows.push_back(
          {theta(i), name, r->coverage.coverage(i), r->coverage.standard_error(i)});
    }
  }
  out.table.report = {{"max_mapping_error_m", out.max_mapping_error},
                      {"trace_samples", static_cast<double>(trace->size())},
                      {"trace_spacing_m", trace->nominal_spacing()}};
  out.table.runtime_seconds = seconds_since(t0);
  return out;
}

void write_histograms(std::ostream& out, const ReplayOutput& replay) {
  out << "sir_db,maxpower,mindistance\n";
  const Eigen::VectorXd c = replay.maxpower_pdf.centers();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    out << csv_number(c(i)) << ',' << csv_number(replay.maxpower_pdf.densities()(i)) << ','
        << csv_number(replay.mindistance_pdf.densities()(i)) << '\n';
  }
}

std::vector<double> read_height_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open height file '" + path.string() + "'");
  std::string row;
  if (!std::getline(in, row)) throw TraceError("height file is empty", 1);
  if (!row.empty() && row.back() == '\r') row.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const auto it = std::find(header.begin(), header.end(), "height_m");
  if (it == header.end()) throw TraceError("line 1: no height_m column", 1);
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  std::size_t line = 1;
  while (std::getline(in, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    std::stringstream ss(row);
    std::string cell;
    std::size_t k = 0;
    bool found = false;
    while (std::getline(ss, cell, ',')) {
      if (k++ == col) {
        found = true;
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(cell, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != cell.size() || !(v > 0.0)) {
          throw TraceError(fmt::format("line {}: invalid height '{}'", line, cell), line);
        }
        out.push_back(v);
      }
    }
    if (!found) throw TraceError(fmt::format("line {}: missing height_m field", line), line);
  }
  return out;
}

HeightStudyOutput run_height_study(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& hs = config.height_study;
  if (config.spatial == "disc") throw ParameterError("height study supports bpp and hppp only");
  if (config.trials == 0) throw ParameterError("trials must be >= 1");
  config.channel.validate();

  std::vector<double> samples;
  if (hs.samples_path) {
    samples = read_height_samples(*hs.samples_path);
  } else {
    if (!(hs.synthetic_sigma >= 0.0) || !(hs.synthetic_mu > 0.0)) {
      throw ParameterError("synthetic heights need mu > 0 and sigma >= 0");
    }
    RandomStream rng(splitmix64(config.seed ^ 0x686569676874ULL));
    samples.reserve(hs.synthetic_count);
    while (samples.size() < hs.synthetic_count) {
      const double h = hs.synthetic_mu + hs.synthetic_sigma * rng.normal();
      if (h > 0.0) samples.push_back(h);
    }
  }
  if (samples.size() < 30) {
    throw InsufficientDataError(
        fmt::format("height study needs at least 30 height samples, got {}", samples.size()));
  }

  HeightStudyOutput out;
  out.sample_count = samples.size();
  out.fit = fit_normal_moments(
      Eigen::Map<const Eigen::VectorXd>(samples.data(), static_cast<Eigen::Index>(samples.size())));
  // A zero spread degenerates to the fixed-height model.
  const HeightModel normal = out.fit.stddev > 1e-9 * out.fit.mean
                                 ? HeightModel{NormalHeight{out.fit.mean, out.fit.stddev}}
                                 : HeightModel{FixedHeight{out.fit.mean}};
  const HeightModel empirical = EmpiricalHeight(samples);
  const HeightModel uniform = hs.uniform;

  SimulationConfig sim;
  sim.spatial = config.spatial == "hppp"
                    ? SpatialModel{FiniteHppp{config.lambda.value_or(static_cast<double>(config.n) /
                                                                     (2.0 * hs.half_length))}}
                    : SpatialModel{Bpp{config.n}};
  sim.channel = config.channel;
  sim.policy = config.policy;
  const MonteCarloOptions mc{config.trials, config.seed, config.workers};

  const auto thetas =
      config.sweep.axis == SweepAxis::Theta ? config.sweep_values() : config.theta_db;
  const Eigen::ArrayXd theta = to_array(thetas);

  auto run = [&](const HeightModel& model) {
    sim.geometry = CorridorGeometry(hs.half_length, model);
    return simulate_sir(sim, mc);
  };
  const Eigen::VectorXd sir_fixed = run(FixedHeight{hs.fixed_height});
  const Eigen::VectorXd sir_emp = run(empirical);
  const Eigen::VectorXd sir_norm = run(normal);
  const Eigen::VectorXd sir_unif = run(uniform);

  auto hist = [&](const Eigen::VectorXd& sir) {
    EmpiricalDistribution d(hs.histogram_lo_db, hs.histogram_hi_db, hs.histogram_bins);
    for (double s : sir) {
      if (!std::isnan(s)) d.add(std::isinf(s) ? s : linear_to_db(s));
    }
    d.normalize();
    return d;
  };
  const auto p_emp = hist(sir_emp);
  out.kl_normal = kl_divergence(p_emp, hist(sir_norm));
  out.kl_uniform = kl_divergence(p_emp, hist(sir_unif));

  out.table = table_header(config);
  out.table.sweep_axis = "theta";
  const CoverageCurve c_fixed = coverage_from_sir(sir_fixed, theta);
  const CoverageCurve c_emp = coverage_from_sir(sir_emp, theta);
  const CoverageCurve c_norm = coverage_from_sir(sir_norm, theta);
  const CoverageCurve c_unif = coverage_from_sir(sir_unif, theta);
  out.max_gap_normal = (c_fixed.coverage - c_norm.coverage).abs().maxCoeff();
  out.max_gap_uniform = (c_fixed.coverage - c_unif.coverage).abs().maxCoeff();
  const std::pair<const char*, const CoverageCurve*> curves[] = {
      {"fixed", &c_fixed}, {"empirical", &c_emp}, {"normal", &c_norm}, {"uniform", &c_unif}};
  for (const auto& [name, curve] : curves) {
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      out.table.rows.push_back({theta(i), name, curve->coverage(i), curve->standard_error(i)});
    }
  }
  out.table.report = {{"height_samples", static_cast<double>(out.sample_count)},
                      {"fit_mu", out.fit.mean},
                      {"fit_sigma", out.fit.stddev},
                      {"kl_normal", out.kl_normal},
                      {"kl_uniform", out.kl_uniform},
                      {"max_gap_normal", out.max_gap_normal},
                      {"max_gap_uniform", out.max_gap_uniform}};
  out.table.runtime_seconds = seconds_since(t0);
  return out;
}

std::vector<SelftestLine> run_selftest(std::uint64_t seed, unsigned workers) {
  std::vector<SelftestLine> lines;
  auto record = [&](std::string name, bool ok, std::string detail) {
    lines.push_back({std::move(name), ok, std::move(detail)});
  };
  auto guarded = [&](const std::string& name, auto&& check) {
    try {
      check();
    } catch (const std::exception& e) {
      record(name, false, std::string("threw: ") + e.what());
    }
  };

  const CorridorGeometry geom(500.0, 100.0);
  const ChannelParams channel{};
  const ReceivedPowerDistribution power(geom, channel);

  guarded("received power pdf integrates to 1", [&] {
    const double mass = integrate([&](double u) { return power.log_density(u); }, power.log_lower(),
                                  power.log_upper(), {1e-10, 1e-14, 4000})
                            .value;
    record("received power pdf integrates to 1", std::abs(mass - 1.0) < 1e-5,
           fmt::format("mass {:.9f}", mass));
  });
  guarded("laplace transform at 0", [&] {
    const double x0 = std::exp(0.5 * (power.log_lower() + power.log_upper()));
    const BppLaplace lb(power, 10, x0);
    const HpppLaplace lh(power, 0.01, x0);
    record("laplace transform at 0", lb.evaluate(0.0) == 1.0 && lh.evaluate(0.0) == 1.0,
           fmt::format("bpp {} hppp {}", lb.evaluate(0.0), lh.evaluate(0.0)));
  });
  guarded("laplace derivative vs finite difference", [&] {
    ChannelParams m2 = channel;
    m2.m = 2.0;
    const ReceivedPowerDistribution p2(geom, m2);
    const double x0 = std::exp(p2.log_upper() - 4.0);
    const BppLaplace lb(p2, 10, x0, {1e-11, 1e-300, 4000});
    const double s = 1.0 / x0;
    const double hstep = 1e-4 * s;
    const double fd = (lb.evaluate(s + hstep) - lb.evaluate(s - hstep)) / (2.0 * hstep);
    const double an = lb.derivative(1, s);
    const double rel = std::abs(fd - an) / std::abs(an);
    record("laplace derivative vs finite difference", rel < 1e-5,
           fmt::format("rel err {:.2e}", rel));
  });

  const Eigen::ArrayXd theta = Eigen::ArrayXd::LinSpaced(3, -6.0, 0.0);
  const MonteCarloOptions mc{200000, seed, workers};
  guarded("bpp exact vs monte carlo", [&] {
    const Eigen::ArrayXd lin = theta.unaryExpr([](double t) { return db_to_linear(t); });
    const Eigen::ArrayXd ex = coverage_curve(lin, Bpp{10}, CoverageMethod::Exact, power);
    SimulationConfig sim{Bpp{10}, geom, channel, AssociationPolicy::MaxPower};
    const CoverageCurve sc = empirical_coverage(sim, theta, mc);
    const double gap = (ex - sc.coverage).abs().maxCoeff();
    record("bpp exact vs monte carlo", gap <= 0.01, fmt::format("max gap {:.4f}", gap));
  });
  guarded("hppp exact vs monte carlo", [&] {
    const Eigen::ArrayXd lin = theta.unaryExpr([](double t) { return db_to_linear(t); });
    const Eigen::ArrayXd ex = coverage_curve(lin, FiniteHppp{0.01}, CoverageMethod::Exact, power);
    SimulationConfig sim{FiniteHppp{0.01}, geom, channel, AssociationPolicy::MaxPower};
    const CoverageCurve sc = empirical_coverage(sim, theta, mc);
    const double gap = (ex - sc.coverage).abs().maxCoeff();
    record("hppp exact vs monte carlo", gap <= 0.01, fmt::format("max gap {:.4f}", gap));
  });
  guarded("reseeded rerun is identical", [&] {
    SimulationConfig sim{Bpp{10}, geom, channel, AssociationPolicy::MaxPower};
    const Eigen::VectorXd a = simulate_sir(sim, {20000, seed, 1});
    const Eigen::VectorXd b = simulate_sir(sim, {20000, seed, 3});
    const bool same = std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
      return std::memcmp(&x, &y, sizeof x) == 0;
    });
    record("reseeded rerun is identical", same, same ? "bitwise equal" : "outputs differ");
  });
  guarded("kl divergence of a histogram with itself", [&] {
    RandomStream rng(seed);
    Eigen::VectorXd x(10000);
    for (auto& v : x) v = rng.normal();
    const auto p = EmpiricalDistribution::from_samples(x, -5.0, 5.0, 50);
    const double kl = kl_divergence(p, p);
    record("kl divergence of a histogram with itself", kl == 0.0, fmt::format("kl {}", kl));
  });
  return lines;
}

}  // namespace corridor
