#pragma once

#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "manet/types.hpp"

namespace manet::aodv {

// RFC 3561 defaults.
struct AodvConfig {
  double hello_interval{1.0};
  double active_route_timeout{3.0};
  unsigned rreq_retries{2};
  double net_traversal_time{2.8};
  double path_discovery_time{5.6};
  unsigned allowed_hello_loss{3};
  bool intermediate_replies{true};

  double my_route_timeout() const { return 2.0 * active_route_timeout; }
};

struct RoutingTableEntry {
  NodeId destination{0};
  NodeId next_hop{0};
  unsigned hop_count{0};
  SeqNo dest_seq{0};
  double expiry{0.0};
  bool active{false};
};

struct Rreq {
  NodeId origin{0};
  SeqNo origin_seq{0};
  std::uint32_t rreq_id{0};
  NodeId dest{0};
  std::optional<SeqNo> dest_seq_known;  // empty if the origin never had a route
  unsigned hop_count{0};
};

struct Rrep {
  NodeId origin{0};  // node that asked
  NodeId dest{0};    // node the route leads to
  SeqNo dest_seq{0};
  unsigned hop_count{0};
  double lifetime{0.0};
};

struct Rerr {
  std::vector<std::pair<NodeId, SeqNo>> unreachable;
};

struct Hello {
  NodeId sender{0};
};

using ControlMessage = std::variant<Rreq, Rrep, Rerr, Hello>;

/// Outbound frame. Empty `next_hop` means one-hop broadcast.
struct Transmission {
  std::optional<NodeId> next_hop;
  ControlMessage message;
};

/// Route freshness: higher sequence number wins, equal sequence prefers
/// fewer hops.
bool fresher(std::pair<SeqNo, unsigned> candidate, std::pair<SeqNo, unsigned> incumbent);

struct PendingDiscovery {
  unsigned retries_used{0};
  double next_retry_time{0.0};
};

struct NodeProtocolState {
  NodeId id{0};
  SeqNo own_seq{0};
  std::uint32_t next_rreq_id{0};
  std::map<NodeId, RoutingTableEntry> routes;
  std::map<std::pair<NodeId, std::uint32_t>, double> seen_rreqs;  // -> expiry
  std::map<NodeId, unsigned> neighbor_missed;
  std::map<NodeId, bool> heard_this_interval;
  std::map<NodeId, PendingDiscovery> pending;
};

// Results of the agent's state transitions.

struct RouteReady {
  RoutingTableEntry route;
};
struct RreqEmitted {
  Transmission frame;
  double retry_at{0.0};
};
struct DiscoveryInProgress {};
struct Unreachable {
  NodeId dest{0};
};
struct NothingToDo {};
using DiscoveryStep = std::variant<RouteReady, RreqEmitted, DiscoveryInProgress, Unreachable, NothingToDo>;

enum class RreqAction { Dropped, Rebroadcast, Replied };

struct RreqOutcome {
  RreqAction action{RreqAction::Dropped};
  bool accepted{false};  // non-duplicate, processed
  std::vector<Transmission> out;
  const char* note{nullptr};
};

enum class RrepAction { Forwarded, Delivered, Stale, NoReverseRoute };

struct RrepOutcome {
  RrepAction action{RrepAction::Stale};
  std::vector<Transmission> out;
};

struct HelloOutcome {
  Transmission hello;
  std::vector<NodeId> failed_links;
};

struct RerrOutcome {
  std::vector<std::pair<NodeId, SeqNo>> invalidated;
  std::vector<Transmission> out;  // empty when nothing was invalidated
};

/// One node's AODV state machine. The engine owns one agent per node and
/// drives it sequentially from the event loop.
class Agent {
 public:
  Agent(NodeId id, AodvConfig config);

  NodeId id() const { return state_.id; }
  const NodeProtocolState& state() const { return state_; }
  const AodvConfig& config() const { return config_; }

  /// Active, unexpired route or nullptr.
  const RoutingTableEntry* valid_route(NodeId dest, double now) const;

  DiscoveryStep originate_discovery(NodeId dest, double now);
  /// Retry timer for a pending discovery. Emits another RREQ until the retry
  /// budget is spent, then reports the destination unreachable.
  DiscoveryStep discovery_timeout(NodeId dest, double now);

  RreqOutcome handle_rreq(const Rreq& rreq, NodeId prev_hop, double now);
  RrepOutcome handle_rrep(const Rrep& rrep, NodeId prev_hop, double now);
  RerrOutcome handle_rerr(const Rerr& rerr, NodeId prev_hop, double now);
  HelloOutcome hello_tick(double now);
  RerrOutcome handle_link_failure(NodeId lost, double now);
  /// Deactivates expired routes and returns their destinations.
  std::vector<NodeId> expire_routes(double now);

  /// Any frame received from a neighbor counts as liveness evidence.
  void note_heard(NodeId neighbor);
  /// Data forwarding keeps the route alive for another ACTIVE_ROUTE_TIMEOUT.
  void refresh_route(NodeId dest, double now);

  /// Test hook: installs or overwrites an entry.
  void install_route(const RoutingTableEntry& entry) { state_.routes[entry.destination] = entry; }

 private:
  Transmission make_rreq(NodeId dest, double now);
  void purge_seen(double now);
  bool update_route(NodeId dest, NodeId next_hop, unsigned hops, SeqNo seq, double expiry);

  AodvConfig config_;
  NodeProtocolState state_;
};

}  // namespace manet::aodv
