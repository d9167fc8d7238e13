#include "manet/mobility.hpp"

#include <algorithm>
#include <map>

namespace manet::mobility {

MobilitySample network_avg_distance(std::span<const Vec2> positions, double time,
                                    std::optional<double> range_limit) {
  if (positions.size() < 2) {
    throw TooFewNodes("network_avg_distance needs at least two nodes");
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < positions.size(); ++a) {
    for (std::size_t b = a + 1; b < positions.size(); ++b) {
      const double d = euclidean(positions[a], positions[b]);
      if (range_limit && d > *range_limit) continue;
      sum += d;
      ++pairs;
    }
  }
  return {time, pairs == 0 ? 0.0 : sum / static_cast<double>(pairs)};
}

MobilitySample network_avg_distance(std::span<const gpsfree::NeighborDistanceTable> tables,
                                    double time) {
  std::map<std::pair<NodeId, NodeId>, std::pair<double, int>> pairs;
  std::set<NodeId> nodes;
  for (const auto& table : tables) {
    nodes.insert(table.owner);
    for (const auto& [k, d] : table.entries) {
      nodes.insert(k);
      auto& slot = pairs[table.owner < k ? std::pair{table.owner, k} : std::pair{k, table.owner}];
      slot.first += d;
      slot.second += 1;
    }
  }
  if (nodes.size() < 2) {
    throw TooFewNodes("network_avg_distance needs at least two nodes");
  }
  double sum = 0.0;
  for (const auto& [key, slot] : pairs) sum += slot.first / slot.second;
  return {time, pairs.empty() ? 0.0 : sum / static_cast<double>(pairs.size())};
}

std::vector<NeighborSeries> node_series(std::span<const distance::DistanceRecord> trace,
                                        NodeId observer, double t0, double t1) {
  std::map<NodeId, NeighborSeries> by_neighbor;
  for (const auto& r : trace) {
    if (r.observer() != observer || r.time < t0 || r.time > t1) continue;
    auto& series = by_neighbor[r.neighbor()];
    series.observer = observer;
    series.neighbor = r.neighbor();
    series.points.push_back({r.time, r.distance, r.rssi_distance});
  }
  std::vector<NeighborSeries> out;
  out.reserve(by_neighbor.size());
  for (auto& [neighbor, series] : by_neighbor) {
    std::stable_sort(series.points.begin(), series.points.end(),
                     [](const SeriesPoint& a, const SeriesPoint& b) { return a.time < b.time; });
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<Agitation> label_agitation(std::span<const MobilitySample> samples, double threshold) {
  std::vector<Agitation> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) {
    labels.push_back(s.avg_distance > threshold ? Agitation::Agitated : Agitation::Stable);
  }
  return labels;
}

}  // namespace manet::mobility
