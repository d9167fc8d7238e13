#include "manet/kinematics.hpp"

#include <algorithm>

namespace manet::sim {

Vec2 random_point(const Area& area, Rng& rng) {
  std::uniform_real_distribution<double> ux(0.0, area.width);
  std::uniform_real_distribution<double> uy(0.0, area.height);
  const double x = ux(rng);
  return {x, uy(rng)};
}

double random_speed(const SpeedRange& speeds, Rng& rng) {
  if (speeds.max <= speeds.min) return speeds.min;
  return std::uniform_real_distribution<double>(speeds.min, speeds.max)(rng);
}

KinematicState mobility_step(KinematicState k, double dt, const Area& area,
                             const SpeedRange& speeds, Rng& rng) {
  double remaining = dt;
  // A leg change per iteration; the cap only guards against pathological
  // near-zero legs.
  for (int legs = 0; remaining > 0.0 && k.speed > 0.0 && legs < 10000; ++legs) {
    const double to_go = euclidean(k.position, k.waypoint);
    const double travel = k.speed * remaining;
    if (travel < to_go) {
      const double f = travel / to_go;
      k.position = {std::clamp(k.position.x + (k.waypoint.x - k.position.x) * f, 0.0, area.width),
                    std::clamp(k.position.y + (k.waypoint.y - k.position.y) * f, 0.0, area.height)};
      break;
    }
    remaining -= to_go / k.speed;
    k.position = k.waypoint;
    k.waypoint = random_point(area, rng);
    k.speed = random_speed(speeds, rng);
  }
  return k;
}

std::vector<Reception> deliver_broadcast(NodeId sender, Vec2 sender_position,
                                         std::span<const KinematicState> nodes,
                                         double radio_range, const radio::RadioParams& radio,
                                         radio::ChannelMode channel) {
  std::vector<Reception> out;
  for (const auto& k : nodes) {
    if (k.node == sender) continue;
    const double d = euclidean(sender_position, k.position);
    if (d > radio_range) continue;
    if (d == 0.0) {
      throw RuntimeInvariantError("nodes " + std::to_string(sender) + " and " +
                                  std::to_string(k.node) + " are co-located");
    }
    out.push_back({k.node, d, radio::received_power(radio, channel, d)});
  }
  return out;
}

std::set<NodeId> neighbors_in_range(NodeId node, Vec2 position,
                                    std::span<const KinematicState> nodes, double radio_range) {
  std::set<NodeId> out;
  for (const auto& k : nodes) {
    if (k.node != node && euclidean(position, k.position) <= radio_range) out.insert(k.node);
  }
  return out;
}

}  // namespace manet::sim
