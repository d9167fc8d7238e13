// Command-line front end: runs a scenario and writes the trace bundle, or
// extracts per-neighbor distance series from an existing quantification CSV.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manet/engine.hpp"
#include "manet/scenario.hpp"
#include "manet/trace.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct RunOptions {
  std::optional<std::string> scenario_file;
  std::optional<std::string> nodes, area, duration, speed_min, speed_max, range, channel, mode,
      seed, agitation;
  std::vector<std::string> traffic;
  std::string out{"out"};
};

struct SeriesOptions {
  std::string trace;
  manet::NodeId observer{0};
  std::string window;
  std::optional<std::string> out;
};

manet::sim::Scenario build_scenario(const RunOptions& o) {
  manet::sim::Scenario s;
  if (o.scenario_file) s = manet::sim::load_scenario_file(*o.scenario_file, s);
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"node_count", &o.nodes},     {"area", &o.area},           {"duration", &o.duration},
      {"speed_min", &o.speed_min},  {"speed_max", &o.speed_max}, {"radio_range", &o.range},
      {"channel", &o.channel},      {"mode", &o.mode},           {"seed", &o.seed},
      {"agitation_threshold", &o.agitation},
  };
  for (const auto& [key, value] : flags) {
    if (*value) manet::sim::apply_setting(s, key, **value);
  }
  if (!o.traffic.empty()) {
    s.traffic.clear();
    for (const auto& t : o.traffic) manet::sim::apply_setting(s, "traffic", t);
  }
  s.validate();
  return s;
}

int run(const RunOptions& o) {
  const manet::sim::Scenario s = build_scenario(o);
  const manet::sim::TraceBundle bundle = manet::sim::run_scenario(s);
  manet::trace::write_bundle(o.out, bundle, s);
  manet::trace::write_summary(std::cout, bundle.summary);
  return 0;
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw manet::ConfigError("window", "expected t0:t1");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const double t0 = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double t1 = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    if (t1 < t0) throw manet::ConfigError("window", "t1 must be >= t0");
    return {t0, t1};
  } catch (const std::logic_error&) {
    throw manet::ConfigError("window", "expected t0:t1, got '" + text + "'");
  }
}

int series(const SeriesOptions& o) {
  const auto [t0, t1] = parse_window(o.window);
  std::ifstream in(o.trace);
  if (!in) throw manet::ConfigError("trace", "cannot open '" + o.trace + "'");
  const auto records = manet::trace::read_quantification_csv(in);
  const auto result = manet::mobility::node_series(records, o.observer, t0, t1);
  if (o.out) {
    std::ofstream out(*o.out, std::ios::binary);
    if (!out) throw manet::ConfigError("out", "cannot write '" + *o.out + "'");
    manet::trace::write_series_csv(out, result);
  } else {
    manet::trace::write_series_csv(std::cout, result);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event MANET simulator with RREQ-time distance quantification"};
  app.require_subcommand(0, 1);

  RunOptions run_opts;
  app.add_option("--scenario", run_opts.scenario_file, "key = value scenario file");
  app.add_option("--nodes", run_opts.nodes, "number of nodes");
  app.add_option("--area", run_opts.area, "area as WxH meters");
  app.add_option("--duration", run_opts.duration, "simulated seconds");
  app.add_option("--speed-min", run_opts.speed_min, "minimum speed m/s");
  app.add_option("--speed-max", run_opts.speed_max, "maximum speed m/s");
  app.add_option("--range", run_opts.range, "radio range m");
  app.add_option("--channel", run_opts.channel, "friis|tworay");
  app.add_option("--mode", run_opts.mode, "exact|rssi|gpsfree");
  app.add_option("--seed", run_opts.seed, "master seed");
  app.add_option("--traffic", run_opts.traffic, "src:dst:start:interval (repeatable)");
  app.add_option("--agitation-threshold", run_opts.agitation, "label avg distance above this as agitated");
  app.add_option("--out", run_opts.out, "output directory")->capture_default_str();

  SeriesOptions series_opts;
  CLI::App* series_cmd = app.add_subcommand("series", "per-neighbor distance series of one observer");
  series_cmd->add_option("--trace", series_opts.trace, "quantification.csv")->required();
  series_cmd->add_option("--observer", series_opts.observer, "observer node id")->required();
  series_cmd->add_option("--window", series_opts.window, "t0:t1 seconds")->required();
  series_cmd->add_option("--out", series_opts.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*series_cmd) return series(series_opts);
    return run(run_opts);
  } catch (const manet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const manet::RuntimeInvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
