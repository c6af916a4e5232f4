// SPDX-License-Identifier: Apache-2.0
// corridor_cov: coverage experiments for UAV corridor networks.

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "corridor/errors.hpp"
#include "corridor/experiment.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4, kData = 5 };

void setup_logging() {
  auto logger = spdlog::stderr_color_st("corridor_cov");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("CORRIDOR_COV_LOG")) {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; treat those as a typo and keep warnings.
    if (level == spdlog::level::off && std::string(env) != "off") level = spdlog::level::warn;
  }
  spdlog::set_level(level);
}

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> workers;
  std::optional<std::string> spatial;
  std::optional<std::size_t> n;
  std::optional<double> lambda, half_length, height, alpha, q, gamma, m, theta;
  std::optional<std::string> policy;
  // sweep
  std::optional<std::string> sweep;
  std::optional<double> from, to, step;
  std::optional<std::string> methods;
  // replay
  std::optional<std::string> trace, save_trace, fading, histogram_out;
  bool synthetic = false;
  std::optional<double> replay_half_length;
  // height study
  std::optional<std::string> heights, report_out;
  std::optional<std::size_t> synthetic_count;
  std::optional<double> synthetic_mu, synthetic_sigma, fixed_height;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON experiment config");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--trials", o.trials, "Monte Carlo trials");
  app->add_option("--out", o.out, "output file (default stdout)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  app->add_option("--spatial", o.spatial, "bpp, hppp or disc");
  app->add_option("--n", o.n, "number of UAVs (bpp, disc)");
  app->add_option("--lambda", o.lambda, "UAV intensity per meter (hppp)");
  app->add_option("--R", o.half_length, "corridor half length [m]");
  app->add_option("--height", o.height, "fixed UAV height [m]");
  app->add_option("--alpha", o.alpha, "path-loss exponent");
  app->add_option("--q", o.q, "inverse-gamma shape");
  app->add_option("--gamma", o.gamma, "inverse-gamma scale (default q - 1)");
  app->add_option("--m", o.m, "Nakagami-m (inf disables fading)");
  app->add_option("--theta", o.theta, "SIR threshold [dB]");
  app->add_option("--policy", o.policy, "maxpower or mindistance")
      ->check(CLI::IsMember({"maxpower", "mindistance"}));
}

corridor::ExperimentConfig build_config(const Overrides& o) {
  using namespace corridor;
  ExperimentConfig c = o.config ? load_config(*o.config) : ExperimentConfig{};
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.out) c.out = *o.out;
  if (o.format) c.format = parse_format(*o.format);
  if (o.workers) c.workers = *o.workers;
  if (o.spatial) c.spatial = *o.spatial;
  if (o.n) c.n = *o.n;
  if (o.lambda) c.lambda = *o.lambda;
  if (o.half_length) c.half_length = *o.half_length;
  if (o.height) c.height = FixedHeight{*o.height};
  if (o.alpha) c.channel.alpha = *o.alpha;
  if (o.q) c.channel.q = *o.q;
  if (o.gamma) c.channel.gamma = *o.gamma;
  if (o.m) c.channel.m = *o.m;
  if (o.theta) c.theta_db = {*o.theta};
  if (o.policy)
    c.policy =
        *o.policy == "maxpower" ? AssociationPolicy::MaxPower : AssociationPolicy::MinDistance;
  if (o.sweep) {
    c.sweep = SweepSpec{};
    c.sweep.axis = parse_sweep_axis(*o.sweep);
  }
  if (o.from) c.sweep.from = *o.from;
  if (o.to) c.sweep.to = *o.to;
  if (o.step) c.sweep.step = *o.step;
  if (o.from || o.to || o.step) c.sweep.values.clear();
  if (o.methods) {
    c.methods.clear();
    std::stringstream ss(*o.methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) c.methods.push_back(parse_method(item));
    }
  }
  if (o.trace) c.replay.trace_path = *o.trace;
  if (o.synthetic) c.replay.synthetic = true;
  if (o.save_trace) c.replay.save_trace = *o.save_trace;
  if (o.fading)
    c.replay.fading = *o.fading == "redraw" ? ReplayFading::Redraw : ReplayFading::FromTrace;
  if (o.histogram_out) c.replay.histogram_out = *o.histogram_out;
  if (o.replay_half_length) {
    c.replay.half_length = *o.replay_half_length;
    c.height_study.half_length = *o.replay_half_length;
  }
  if (o.heights) c.height_study.samples_path = *o.heights;
  if (o.report_out) c.height_study.report_out = *o.report_out;
  if (o.synthetic_count) c.height_study.synthetic_count = *o.synthetic_count;
  if (o.synthetic_mu) c.height_study.synthetic_mu = *o.synthetic_mu;
  if (o.synthetic_sigma) c.height_study.synthetic_sigma = *o.synthetic_sigma;
  if (o.fixed_height) c.height_study.fixed_height = *o.fixed_height;
  return c;
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw corridor::IoError("cannot write '" + path + "'");
  body(out);
  if (!out) throw corridor::IoError("write failed for '" + path + "'");
}

int run(int argc, char** argv) {
  using namespace corridor;
  CLI::App app{"Coverage of UAV corridor networks: analytic engine, simulator and trace replay"};
  app.require_subcommand(1);
  Overrides o;

  auto* coverage = app.add_subcommand("coverage", "sweep coverage over one axis");
  add_common(coverage, o);
  coverage->add_option("--sweep", o.sweep, "theta, lambda, R, h or N")
      ->check(CLI::IsMember({"theta", "lambda", "R", "h", "N"}));
  coverage->add_option("--from", o.from, "sweep start");
  coverage->add_option("--to", o.to, "sweep end (inclusive)");
  coverage->add_option("--step", o.step, "sweep step");
  coverage->add_option("--methods", o.methods,
                       "comma list of exact, dominant, single-dominant, mc");

  auto* replay = app.add_subcommand("replay", "emulate the network on a received-power trace");
  add_common(replay, o);
  replay->add_option("--trace", o.trace, "trace CSV (position_m,height_m,rx_power_dbm)");
  replay->add_flag("--synthetic", o.synthetic, "replay a model-generated trace");
  replay->add_option("--save-trace", o.save_trace, "write the trace used to this path");
  replay->add_option("--fading", o.fading, "fromtrace or redraw")
      ->check(CLI::IsMember({"fromtrace", "redraw"}));
  replay->add_option("--histogram-out", o.histogram_out, "SIR pdf CSV (default <out>.sir_pdf.csv)");
  replay->add_option("--corridor-R", o.replay_half_length, "emulated corridor half length [m]");
  replay->add_option("--from", o.from, "theta start [dB]");
  replay->add_option("--to", o.to, "theta end [dB]");
  replay->add_option("--step", o.step, "theta step [dB]");

  auto* height = app.add_subcommand("height-study", "fixed versus variable UAV heights");
  add_common(height, o);
  height->add_option("--heights", o.heights, "CSV with a height_m column");
  height->add_option("--synthetic-count", o.synthetic_count, "synthetic height samples");
  height->add_option("--synthetic-mu", o.synthetic_mu, "synthetic height mean [m]");
  height->add_option("--synthetic-sigma", o.synthetic_sigma, "synthetic height spread [m]");
  height->add_option("--fixed-height", o.fixed_height, "reference fixed height [m]");
  height->add_option("--corridor-R", o.replay_half_length, "corridor half length [m]");
  height->add_option("--report-out", o.report_out, "fit and KL report (JSON)");
  height->add_option("--from", o.from, "theta start [dB]");
  height->add_option("--to", o.to, "theta end [dB]");
  height->add_option("--step", o.step, "theta step [dB]");

  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
  selftest->add_option("--seed", o.seed, "master seed");
  selftest->add_option("--workers", o.workers, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  setup_logging();

  if (selftest->parsed()) {
    bool ok = true;
    for (const auto& line : run_selftest(o.seed.value_or(1), o.workers.value_or(0))) {
      std::cout << (line.passed ? "PASS " : "FAIL ") << line.name << " (" << line.detail << ")\n";
      ok = ok && line.passed;
    }
    return ok ? kOk : kNumeric;
  }

  ExperimentConfig config = build_config(o);
  spdlog::info("config hash {}", config_hash(config));

  if (coverage->parsed()) {
    const ResultTable table = run_coverage(config);
    emit(table, config);
    spdlog::info("coverage: {} rows in {:.2f} s", table.rows.size(), table.runtime_seconds);
    return kOk;
  }

  if (replay->parsed()) {
    if (o.from || o.to || o.step) config.sweep.axis = SweepAxis::Theta;
    const ReplayOutput result = run_replay(config);
    emit(result.table, config);
    std::optional<std::string> hist = config.replay.histogram_out;
    if (!hist && config.out) hist = *config.out + ".sir_pdf.csv";
    if (hist) {
      write_file(*hist, [&](std::ostream& out) { write_histograms(out, result); });
      spdlog::info("SIR pdf written to {}", *hist);
    } else {
      spdlog::warn("no --out or --histogram-out given; SIR pdf not written");
    }
    spdlog::info("max mapping error {:.3g} m", result.max_mapping_error);
    return kOk;
  }

  if (height->parsed()) {
    if (o.from || o.to || o.step) config.sweep.axis = SweepAxis::Theta;
    const HeightStudyOutput result = run_height_study(config);
    emit(result.table, config);
    const std::string summary = fmt::format(
        "heights: n={} mu={:.3f} sigma={:.3f}; KL normal={:.3g} uniform={:.3g}; "
        "max gap normal={:.4f} uniform={:.4f}",
        result.sample_count, result.fit.mean, result.fit.stddev, result.kl_normal,
        result.kl_uniform, result.max_gap_normal, result.max_gap_uniform);
    std::cerr << summary << '\n';
    if (config.height_study.report_out) {
      write_file(*config.height_study.report_out, [&](std::ostream& out) {
        nlohmann::ordered_json j;
        for (const auto& [k, v] : result.table.report) j[k] = v;
        j["config_hash"] = result.table.config_hash;
        out << j.dump(2) << '\n';
      });
    }
    return kOk;
  }
  return kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace corridor;
  try {
    return run(argc, argv);
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const AccuracyError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const TraceError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}
