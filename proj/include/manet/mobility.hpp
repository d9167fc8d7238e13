#pragma once

#include <optional>
#include <span>
#include <vector>

#include "manet/distance.hpp"

// Network mobility metrics and per-neighbor distance series.
namespace manet::mobility {

struct MobilitySample {
  double time{0.0};
  double avg_distance{0.0};

  friend bool operator==(const MobilitySample&, const MobilitySample&) = default;
};

struct SeriesPoint {
  double time{0.0};
  double distance{0.0};
  double rssi_distance{0.0};
};

struct NeighborSeries {
  NodeId observer{0};
  NodeId neighbor{0};
  std::vector<SeriesPoint> points;
};

/// Mean distance over all unordered node pairs. With `range_limit` only pairs
/// within that range are averaged (0 when there are none). Throws TooFewNodes
/// for fewer than two positions.
MobilitySample network_avg_distance(std::span<const Vec2> positions, double time,
                                    std::optional<double> range_limit = std::nullopt);

/// Same metric from measured tables. A pair reported by both ends is averaged.
MobilitySample network_avg_distance(std::span<const gpsfree::NeighborDistanceTable> tables,
                                    double time);

/// The observer's records in [t0, t1], grouped per neighbor (ascending id),
/// each in time order. Records sharing a timestamp keep their trace order.
std::vector<NeighborSeries> node_series(std::span<const distance::DistanceRecord> trace,
                                        NodeId observer, double t0, double t1);

enum class Agitation { Stable, Agitated };

/// Labels samples strictly above `threshold` as agitated.
std::vector<Agitation> label_agitation(std::span<const MobilitySample> samples, double threshold);

}  // namespace manet::mobility
