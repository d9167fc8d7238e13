#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manet/mobility.hpp"
#include "manet/scenario.hpp"

namespace manet::sim {

struct Summary {
  std::uint64_t events{0};
  std::uint64_t rreq_originated{0};
  std::uint64_t rreq_accepted{0};
  std::uint64_t rreq_rebroadcast{0};
  std::uint64_t rreq_duplicates{0};
  std::uint64_t rrep_sent{0};
  std::uint64_t rrep_delivered{0};
  std::uint64_t rerr_sent{0};
  std::uint64_t hello_sent{0};
  std::uint64_t table_broadcasts{0};
  std::uint64_t gpsfree_refreshes{0};
  std::uint64_t gpsfree_no_reference{0};
  std::uint64_t data_sent{0};
  std::uint64_t data_delivered{0};
  std::uint64_t data_dropped{0};
  std::uint64_t link_failures{0};
  std::uint64_t unreachable{0};
  std::uint64_t frames_lost{0};
};

struct NodeSnapshot {
  NodeId id{0};
  Vec2 position;
  bool alive{true};
  std::map<NodeId, aodv::RoutingTableEntry> routes;
  distance::NeighborKnowledge knowledge;
  std::optional<distance::GpsFreeResult> gpsfree;
};

struct TraceBundle {
  std::vector<distance::DistanceRecord> records;
  std::vector<mobility::MobilitySample> mobility;
  std::vector<std::string> protocol_log;  // "time_s EVENT node detail"
  Summary summary;
  std::vector<NodeSnapshot> nodes;  // state at the end of the run
};

/// Runs the scenario to completion. Throws ConfigError before the first event
/// for invalid scenarios and RuntimeInvariantError if the run breaks an
/// invariant. Same scenario, same bundle.
TraceBundle run_scenario(const Scenario& scenario);

}  // namespace manet::sim
