#include "manet/aodv.hpp"

#include <algorithm>
#include <set>

namespace manet::aodv {

bool fresher(std::pair<SeqNo, unsigned> candidate, std::pair<SeqNo, unsigned> incumbent) {
  if (candidate.first != incumbent.first) return candidate.first > incumbent.first;
  return candidate.second < incumbent.second;
}

Agent::Agent(NodeId id, AodvConfig config) : config_(config) { state_.id = id; }

const RoutingTableEntry* Agent::valid_route(NodeId dest, double now) const {
  auto it = state_.routes.find(dest);
  if (it == state_.routes.end()) return nullptr;
  const RoutingTableEntry& e = it->second;
  return (e.active && e.expiry >= now) ? &e : nullptr;
}

void Agent::note_heard(NodeId neighbor) {
  if (neighbor == state_.id) return;
  state_.heard_this_interval[neighbor] = true;
  state_.neighbor_missed[neighbor] = 0;
}

void Agent::purge_seen(double now) {
  std::erase_if(state_.seen_rreqs, [now](const auto& kv) { return kv.second < now; });
}

// Installs the route when there is no usable entry or the candidate is
// fresher. Returns true when the table changed.
bool Agent::update_route(NodeId dest, NodeId next_hop, unsigned hops, SeqNo seq, double expiry) {
  auto it = state_.routes.find(dest);
  if (it != state_.routes.end()) {
    RoutingTableEntry& e = it->second;
    const bool replace = fresher({seq, hops}, {e.dest_seq, e.hop_count}) ||
                         (!e.active && seq == e.dest_seq);
    if (!replace) {
      if (e.active && e.next_hop == next_hop && e.hop_count == hops && e.dest_seq == seq) {
        e.expiry = std::max(e.expiry, expiry);
      }
      return false;
    }
  }
  state_.routes[dest] = RoutingTableEntry{dest, next_hop, hops, seq, expiry, true};
  return true;
}

Transmission Agent::make_rreq(NodeId dest, double now) {
  ++state_.own_seq;
  const std::uint32_t rreq_id = ++state_.next_rreq_id;
  std::optional<SeqNo> known;
  if (auto it = state_.routes.find(dest); it != state_.routes.end()) {
    known = it->second.dest_seq;
  }
  state_.seen_rreqs[{state_.id, rreq_id}] = now + config_.path_discovery_time;
  return {std::nullopt, Rreq{state_.id, state_.own_seq, rreq_id, dest, known, 0}};
}

DiscoveryStep Agent::originate_discovery(NodeId dest, double now) {
  if (dest == state_.id) {
    throw SelfDestination("originate_discovery: destination is this node");
  }
  if (const RoutingTableEntry* route = valid_route(dest, now)) {
    return RouteReady{*route};
  }
  if (state_.pending.contains(dest)) {
    return DiscoveryInProgress{};
  }
  const double retry_at = now + config_.net_traversal_time;
  state_.pending[dest] = PendingDiscovery{0, retry_at};
  return RreqEmitted{make_rreq(dest, now), retry_at};
}

DiscoveryStep Agent::discovery_timeout(NodeId dest, double now) {
  auto it = state_.pending.find(dest);
  if (it == state_.pending.end()) return NothingToDo{};
  if (valid_route(dest, now) != nullptr) {
    state_.pending.erase(it);
    return NothingToDo{};
  }
  PendingDiscovery& pending = it->second;
  if (now < pending.next_retry_time) return NothingToDo{};  // timer of an older attempt
  if (pending.retries_used < config_.rreq_retries) {
    ++pending.retries_used;
    pending.next_retry_time = now + config_.net_traversal_time;
    return RreqEmitted{make_rreq(dest, now), pending.next_retry_time};
  }
  state_.pending.erase(it);
  return Unreachable{dest};
}

RreqOutcome Agent::handle_rreq(const Rreq& rreq, NodeId prev_hop, double now) {
  RreqOutcome outcome;
  if (prev_hop == state_.id) {
    outcome.note = "malformed: prev_hop is self";
    return outcome;
  }
  note_heard(prev_hop);
  if (rreq.origin == state_.id) {
    outcome.note = "own request";
    return outcome;
  }
  purge_seen(now);
  const auto key = std::pair{rreq.origin, rreq.rreq_id};
  if (state_.seen_rreqs.contains(key)) {
    outcome.note = "duplicate";
    return outcome;
  }
  state_.seen_rreqs[key] = now + config_.path_discovery_time;
  outcome.accepted = true;

  const unsigned hops = rreq.hop_count + 1;
  const double reverse_expiry = now + config_.active_route_timeout;
  if (!update_route(rreq.origin, prev_hop, hops, rreq.origin_seq, reverse_expiry) &&
      !state_.routes.at(rreq.origin).active) {
    state_.routes[rreq.origin] =
        RoutingTableEntry{rreq.origin, prev_hop, hops, rreq.origin_seq, reverse_expiry, true};
  }
  const NodeId toward_origin = state_.routes.at(rreq.origin).next_hop;

  if (rreq.dest == state_.id) {
    state_.own_seq = std::max(state_.own_seq, rreq.dest_seq_known.value_or(0));
    ++state_.own_seq;
    outcome.action = RreqAction::Replied;
    outcome.out.push_back({toward_origin, Rrep{rreq.origin, state_.id, state_.own_seq, 0,
                                               config_.my_route_timeout()}});
    return outcome;
  }

  if (config_.intermediate_replies) {
    const RoutingTableEntry* route = valid_route(rreq.dest, now);
    if (route != nullptr && route->next_hop != prev_hop &&
        route->dest_seq >= rreq.dest_seq_known.value_or(0)) {
      outcome.action = RreqAction::Replied;
      outcome.out.push_back({toward_origin, Rrep{rreq.origin, rreq.dest, route->dest_seq,
                                                 route->hop_count, route->expiry - now}});
      return outcome;
    }
  }

  Rreq forwarded = rreq;
  forwarded.hop_count = hops;
  outcome.action = RreqAction::Rebroadcast;
  outcome.out.push_back({std::nullopt, forwarded});
  return outcome;
}

RrepOutcome Agent::handle_rrep(const Rrep& rrep, NodeId prev_hop, double now) {
  RrepOutcome outcome;
  note_heard(prev_hop);
  if (rrep.dest == state_.id) {
    return outcome;
  }
  const unsigned hops = rrep.hop_count + 1;
  if (!update_route(rrep.dest, prev_hop, hops, rrep.dest_seq, now + rrep.lifetime)) {
    outcome.action = RrepAction::Stale;
    return outcome;
  }
  if (rrep.origin == state_.id) {
    state_.pending.erase(rrep.dest);
    outcome.action = RrepAction::Delivered;
    return outcome;
  }
  auto it = state_.routes.find(rrep.origin);
  if (it == state_.routes.end() || !it->second.active || it->second.expiry < now) {
    outcome.action = RrepAction::NoReverseRoute;
    return outcome;
  }
  it->second.expiry = std::max(it->second.expiry, now + config_.active_route_timeout);
  Rrep forwarded = rrep;
  forwarded.hop_count = hops;
  outcome.action = RrepAction::Forwarded;
  outcome.out.push_back({it->second.next_hop, forwarded});
  return outcome;
}

RerrOutcome Agent::handle_rerr(const Rerr& rerr, NodeId prev_hop, double now) {
  (void)now;
  note_heard(prev_hop);
  RerrOutcome outcome;
  for (const auto& [dest, seq] : rerr.unreachable) {
    auto it = state_.routes.find(dest);
    if (it == state_.routes.end()) continue;
    RoutingTableEntry& e = it->second;
    if (!e.active || e.next_hop != prev_hop) continue;
    e.active = false;
    e.dest_seq = std::max(e.dest_seq, seq);
    outcome.invalidated.emplace_back(dest, e.dest_seq);
  }
  if (!outcome.invalidated.empty()) {
    outcome.out.push_back({std::nullopt, Rerr{outcome.invalidated}});
  }
  return outcome;
}

HelloOutcome Agent::hello_tick(double now) {
  HelloOutcome outcome{{std::nullopt, Hello{state_.id}}, {}};
  std::set<NodeId> route_neighbors;
  for (const auto& [dest, e] : state_.routes) {
    if (e.active && e.expiry >= now) route_neighbors.insert(e.next_hop);
  }
  for (NodeId neighbor : route_neighbors) {
    const bool heard = state_.heard_this_interval[neighbor];
    unsigned& missed = state_.neighbor_missed[neighbor];
    missed = heard ? 0 : missed + 1;
    if (missed >= config_.allowed_hello_loss) {
      outcome.failed_links.push_back(neighbor);
    }
  }
  state_.heard_this_interval.clear();
  for (NodeId lost : outcome.failed_links) {
    state_.neighbor_missed.erase(lost);
  }
  return outcome;
}

RerrOutcome Agent::handle_link_failure(NodeId lost, double now) {
  RerrOutcome outcome;
  for (auto& [dest, e] : state_.routes) {
    if (!e.active || e.next_hop != lost) continue;
    e.active = false;
    ++e.dest_seq;
    e.expiry = std::min(e.expiry, now);
    outcome.invalidated.emplace_back(dest, e.dest_seq);
  }
  state_.neighbor_missed.erase(lost);
  state_.heard_this_interval.erase(lost);
  if (!outcome.invalidated.empty()) {
    outcome.out.push_back({std::nullopt, Rerr{outcome.invalidated}});
  }
  return outcome;
}

std::vector<NodeId> Agent::expire_routes(double now) {
  std::vector<NodeId> expired;
  for (auto& [dest, e] : state_.routes) {
    if (e.active && e.expiry < now) {
      e.active = false;
      expired.push_back(dest);
    }
  }
  return expired;
}

void Agent::refresh_route(NodeId dest, double now) {
  auto it = state_.routes.find(dest);
  if (it == state_.routes.end() || !it->second.active || it->second.expiry < now) return;
  it->second.expiry = now + config_.active_route_timeout;
}

}  // namespace manet::aodv
