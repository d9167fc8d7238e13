#pragma once

#include <map>
#include <set>

#include "manet/gpsfree.hpp"
#include "manet/radio.hpp"

// Neighbor-distance quantification hooked onto RREQ reception.
namespace manet::distance {

enum class MeasurementMode { Exact, Rssi, GpsFree };

const char* to_string(MeasurementMode mode);
MeasurementMode parse_mode(const std::string& text);

/// One quantification row. `rreq_source` is the node that received the RREQ
/// and measured, `rreq_dest` the neighbor whose transmission it measured.
struct DistanceRecord {
  NodeId rreq_source{0};
  NodeId rreq_dest{0};
  double time{0.0};
  double distance{0.0};       // ground truth
  double rssi_distance{0.0};  // Friis inversion of the received power

  NodeId observer() const { return rreq_source; }
  NodeId neighbor() const { return rreq_dest; }

  friend bool operator==(const DistanceRecord&, const DistanceRecord&) = default;
};

struct NeighborTableBroadcast {
  NodeId sender{0};
  gpsfree::NeighborDistanceTable table;
};

struct HeardTable {
  gpsfree::NeighborDistanceTable table;
  double received_at{0.0};
};

/// What one node knows about ranges: its own measurements plus the latest
/// table snapshot from each neighbor.
struct NeighborKnowledge {
  gpsfree::NeighborDistanceTable own;
  std::map<NodeId, HeardTable> heard;

  /// Own measurements take precedence; among neighbor reports the most recent
  /// snapshot wins.
  gpsfree::PairwiseDistances cross_distances() const;
};

struct Measurement {
  DistanceRecord record;
  NeighborTableBroadcast broadcast;
};

/// Quantifies the range to the neighbor that delivered an accepted RREQ and
/// stores it in `own`: the true distance in Exact mode, the RSSI estimate
/// otherwise. The record always carries both.
Measurement measure_on_rreq(gpsfree::NeighborDistanceTable& own, NodeId prev_hop,
                            radio::PowerSample rx_power, double true_distance,
                            MeasurementMode mode, const radio::RadioParams& radio, double now);

void merge_neighbor_table(NeighborKnowledge& knowledge, const NeighborTableBroadcast& incoming,
                          double now);

struct GpsFreeResult {
  gpsfree::LocalFrame frame;
  std::map<NodeId, gpsfree::LocalCoordinate> coordinates;
  /// Owner-to-node ranges recomputed from the local coordinates.
  std::map<NodeId, double> distances;
  std::set<NodeId> two_hop;     // placed with the d_ia + d_ab rule
  std::set<NodeId> missing;     // a range needed for placement was unknown
  std::set<NodeId> degenerate;  // ranges inconsistent with any triangle
};

/// Builds the owner's local frame from its nearest reference triple and
/// places every node it has ranges for. Throws NoValidReference.
GpsFreeResult gpsfree_refresh(const NeighborKnowledge& knowledge,
                              const std::set<NodeId>& exclude = {});

}  // namespace manet::distance
