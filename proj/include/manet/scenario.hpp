#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "manet/aodv.hpp"
#include "manet/distance.hpp"
#include "manet/kinematics.hpp"

namespace manet::sim {

struct TrafficFlow {
  NodeId source{0};
  NodeId dest{0};
  double start{0.0};
  double interval{1.0};
};

struct NodeFailure {
  NodeId node{0};
  double time{0.0};
};

struct Scenario {
  Area area;
  unsigned node_count{20};
  double duration{60.0};
  double speed_min{0.0};
  double speed_max{100.0};
  double radio_range{250.0};
  radio::ChannelMode channel{radio::ChannelMode::TwoRayCrossover};
  distance::MeasurementMode mode{distance::MeasurementMode::Rssi};
  std::uint64_t seed{1};
  std::vector<TrafficFlow> traffic;
  radio::RadioParams radio;
  aodv::AodvConfig aodv;

  double hop_latency{1e-3};
  double jitter{0.0};               // max extra per-hop delay, uniform
  double rssi_noise_sigma_db{0.0};  // log-normal RSSI perturbation, 0 = off
  std::optional<std::uint64_t> noise_seed;
  double sample_interval{1.0};
  bool avg_in_range{false};
  std::optional<double> agitation_threshold;

  // Scripted set-up; empty means random. Waypoints and speeds cover the first
  // leg only, random-waypoint motion resumes on arrival.
  std::vector<Vec2> positions;
  std::vector<Vec2> waypoints;
  std::vector<double> speeds;
  std::vector<NodeFailure> failures;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Applies one `key = value` setting. Keys are the Scenario field names (radio
/// and AODV fields flattened). `traffic`, `failures`, `positions`, `waypoints`
/// and `speeds` append. Throws ConfigError for unknown keys or bad values.
void apply_setting(Scenario& scenario, const std::string& key, const std::string& value);

/// Reads a flat `key = value` file on top of `base`. `#` starts a comment.
Scenario parse_scenario(std::istream& in, Scenario base = {});
Scenario load_scenario_file(const std::string& path, Scenario base = {});

TrafficFlow parse_traffic(const std::string& text);
Area parse_area(const std::string& text);

}  // namespace manet::sim
