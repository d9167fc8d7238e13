#include "manet/distance.hpp"

#include <algorithm>
#include <vector>

namespace manet::distance {

using gpsfree::LocalCoordinate;
using gpsfree::PairwiseDistances;

const char* to_string(MeasurementMode mode) {
  switch (mode) {
    case MeasurementMode::Exact: return "exact";
    case MeasurementMode::Rssi: return "rssi";
    case MeasurementMode::GpsFree: return "gpsfree";
  }
  return "?";
}

MeasurementMode parse_mode(const std::string& text) {
  if (text == "exact") return MeasurementMode::Exact;
  if (text == "rssi") return MeasurementMode::Rssi;
  if (text == "gpsfree") return MeasurementMode::GpsFree;
  throw ConfigError("mode", "expected exact|rssi|gpsfree, got '" + text + "'");
}

PairwiseDistances NeighborKnowledge::cross_distances() const {
  PairwiseDistances cross;
  for (const auto& [k, d] : own.entries) cross.set(own.owner, k, d);

  std::vector<const gpsfree::NeighborDistanceTable*> tables;
  for (const auto& [sender, heard_table] : heard) tables.push_back(&heard_table.table);
  std::sort(tables.begin(), tables.end(), [](const auto* a, const auto* b) {
    return a->timestamp != b->timestamp ? a->timestamp > b->timestamp : a->owner < b->owner;
  });
  for (const auto* table : tables) {
    for (const auto& [k, d] : table->entries) {
      if (k == own.owner || table->owner == own.owner) continue;
      cross.set_if_absent(table->owner, k, d);
    }
  }
  // Ranges to the owner reported by others only fill slots it never measured.
  for (const auto* table : tables) {
    if (auto d = table->distance_to(own.owner)) cross.set_if_absent(table->owner, own.owner, *d);
  }
  return cross;
}

Measurement measure_on_rreq(gpsfree::NeighborDistanceTable& own, NodeId prev_hop,
                            radio::PowerSample rx_power, double true_distance,
                            MeasurementMode mode, const radio::RadioParams& radio, double now) {
  double rssi_distance = 0.0;
  if (mode == MeasurementMode::Exact) {
    // A co-located sender gives unbounded power, whose Friis inverse is 0.
    if (rx_power.rx_power > 0.0 && std::isfinite(rx_power.rx_power)) {
      rssi_distance = radio::estimate_distance_friis(radio, rx_power);
    }
    own.set(prev_hop, true_distance, now);
  } else {
    rssi_distance = radio::estimate_distance_friis(radio, rx_power);
    own.set(prev_hop, rssi_distance, now);
  }
  return {DistanceRecord{own.owner, prev_hop, now, true_distance, rssi_distance},
          NeighborTableBroadcast{own.owner, own}};
}

void merge_neighbor_table(NeighborKnowledge& knowledge, const NeighborTableBroadcast& incoming,
                          double now) {
  if (incoming.sender == knowledge.own.owner) return;
  auto it = knowledge.heard.find(incoming.sender);
  if (it != knowledge.heard.end() && it->second.table.timestamp > incoming.table.timestamp) {
    return;
  }
  knowledge.heard[incoming.sender] = HeardTable{incoming.table, now};
}

namespace {

bool positive(const std::optional<double>& d) { return d && *d > 0.0; }

}  // namespace

GpsFreeResult gpsfree_refresh(const NeighborKnowledge& knowledge, const std::set<NodeId>& exclude) {
  const PairwiseDistances cross = knowledge.cross_distances();
  const gpsfree::ReferenceTriple triple = gpsfree::select_reference(knowledge.own, exclude, cross);
  const NodeId i = triple.center;
  const NodeId p = triple.x_axis;
  const NodeId q = triple.y_side;

  GpsFreeResult result;
  result.frame = gpsfree::build_frame(triple, *cross.get(i, p), *cross.get(i, q), *cross.get(p, q));
  result.coordinates[i] = {i, 0.0, 0.0, false};
  result.coordinates[p] = {p, result.frame.d_ip, 0.0, false};
  const Vec2 q_point = result.frame.y_side_point();
  result.coordinates[q] = {q, q_point.x, q_point.y, false};

  std::set<NodeId> nodes{knowledge.own.owner};
  for (const auto& [k, d] : knowledge.own.entries) nodes.insert(k);
  for (const auto& [sender, heard_table] : knowledge.heard) {
    nodes.insert(sender);
    for (const auto& [k, d] : heard_table.table.entries) nodes.insert(k);
  }
  for (NodeId k : {i, p, q}) nodes.erase(k);

  // Pass 1: nodes with ranges to both i and p.
  std::vector<NodeId> deferred;
  std::vector<NodeId> ambiguous;
  for (NodeId k : nodes) {
    const auto d_ik = cross.get(i, k);
    const auto d_pk = cross.get(p, k);
    if (!d_ik) {
      deferred.push_back(k);
      continue;
    }
    if (!d_pk) {
      result.missing.insert(k);
      continue;
    }
    if (*d_ik == 0.0) {
      result.coordinates[k] = {k, 0.0, 0.0, false};
      continue;
    }
    try {
      LocalCoordinate c = gpsfree::localize_one_hop(result.frame, k, *d_ik, *d_pk, cross.get(q, k));
      result.coordinates[k] = c;
      if (c.ambiguous) ambiguous.push_back(k);
    } catch (const DegenerateGeometry&) {
      result.degenerate.insert(k);
    }
  }

  // Without a range to q, settle the mirror choice against whichever placed
  // node lies farthest off the x-axis and has a range to k.
  for (NodeId k : ambiguous) {
    LocalCoordinate& c = result.coordinates[k];
    const LocalCoordinate* anchor = nullptr;
    double anchor_range = 0.0;
    for (const auto& [m, placed] : result.coordinates) {
      if (m == k || placed.ambiguous) continue;
      const auto d_mk = cross.get(m, k);
      if (!d_mk) continue;
      if (anchor == nullptr || std::abs(placed.y) > std::abs(anchor->y)) {
        anchor = &placed;
        anchor_range = *d_mk;
      }
    }
    if (anchor == nullptr || std::abs(anchor->y) < gpsfree::kCosineTolerance) continue;
    const double above = std::abs(euclidean({c.x, c.y}, anchor->point()) - anchor_range);
    const double below = std::abs(euclidean({c.x, -c.y}, anchor->point()) - anchor_range);
    if (below < above) c.y = -c.y;
    c.ambiguous = false;
  }

  // Pass 2: two-hop nodes through the placed node giving the shortest path.
  for (NodeId k : deferred) {
    std::optional<NodeId> via;
    double best = 0.0;
    for (const auto& [m, placed] : result.coordinates) {
      if (m == i || result.two_hop.contains(m)) continue;
      const auto d_im = cross.get(i, m);
      const auto d_mk = cross.get(m, k);
      if (!positive(d_im) || !positive(d_mk)) continue;
      const double path = *d_im + *d_mk;
      if (!via || path < best) {
        via = m;
        best = path;
      }
    }
    const auto d_pk = cross.get(p, k);
    if (!via || !d_pk) {
      result.missing.insert(k);
      continue;
    }
    try {
      result.coordinates[k] = gpsfree::localize_two_hop(result.frame, k, *cross.get(i, *via),
                                                        *cross.get(*via, k), *d_pk);
      result.two_hop.insert(k);
    } catch (const DegenerateGeometry&) {
      result.degenerate.insert(k);
    }
  }

  const auto owner_it = result.coordinates.find(knowledge.own.owner);
  if (owner_it != result.coordinates.end()) {
    for (const auto& [k, c] : result.coordinates) {
      if (k == knowledge.own.owner) continue;
      result.distances[k] = gpsfree::frame_distance(owner_it->second, c);
    }
  }
  return result;
}

}  // namespace manet::distance
