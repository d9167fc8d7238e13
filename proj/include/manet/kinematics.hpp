#pragma once

#include <random>
#include <set>
#include <span>
#include <vector>

#include "manet/radio.hpp"

namespace manet::sim {

struct Area {
  double width{1000.0};
  double height{1000.0};

  bool contains(Vec2 p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; }
};

struct SpeedRange {
  double min{0.0};
  double max{100.0};
};

struct KinematicState {
  NodeId node{0};
  Vec2 position;
  Vec2 waypoint;
  double speed{0.0};  // m/s on the current leg
};

using Rng = std::mt19937_64;

Vec2 random_point(const Area& area, Rng& rng);
double random_speed(const SpeedRange& speeds, Rng& rng);

/// Random-waypoint motion: moves toward the waypoint and, on arrival, draws a
/// fresh waypoint and speed and spends the remaining time on the new leg.
KinematicState mobility_step(KinematicState k, double dt, const Area& area,
                             const SpeedRange& speeds, Rng& rng);

struct Reception {
  NodeId node{0};
  double distance{0.0};
  radio::PowerSample power;
};

/// Every node other than the sender inside the closed ball of `radio_range`,
/// with its true distance and received power. Throws RuntimeInvariantError on
/// a co-located receiver.
std::vector<Reception> deliver_broadcast(NodeId sender, Vec2 sender_position,
                                         std::span<const KinematicState> nodes,
                                         double radio_range, const radio::RadioParams& radio,
                                         radio::ChannelMode channel);

std::set<NodeId> neighbors_in_range(NodeId node, Vec2 position,
                                    std::span<const KinematicState> nodes, double radio_range);

}  // namespace manet::sim
