#include "manet/engine.hpp"

#include <cmath>
#include <deque>
#include <sstream>
#include <variant>

#include "manet/event_queue.hpp"
#include "manet/trace.hpp"

namespace manet::sim {

namespace {

using aodv::RoutingTableEntry;
using RouteMap = std::map<NodeId, RoutingTableEntry>;

struct DataPacket {
  NodeId source{0};
  NodeId dest{0};
  std::uint64_t seq{0};
};

using Frame = std::variant<aodv::Rreq, aodv::Rrep, aodv::Rerr, aodv::Hello,
                           distance::NeighborTableBroadcast, DataPacket>;

struct Deliver {
  NodeId receiver{0};
  NodeId sender{0};
  Frame frame;
  double distance{0.0};
  radio::PowerSample power;
};
struct HelloTimer {
  NodeId node{0};
};
struct DiscoveryTimer {
  NodeId node{0};
  NodeId dest{0};
};
struct TrafficSend {
  std::size_t flow{0};
};
struct SampleTick {};
struct Failure {
  NodeId node{0};
};

using Payload = std::variant<Deliver, HelloTimer, DiscoveryTimer, TrafficSend, SampleTick, Failure>;

constexpr std::uint32_t kMobilityStream = 1;
constexpr std::uint32_t kJitterStream = 2;
constexpr std::uint32_t kNoiseStream = 3;
constexpr std::size_t kMaxBufferedPackets = 64;

Rng make_stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return Rng(seq);
}

Frame to_frame(const aodv::ControlMessage& m) {
  return std::visit([](const auto& msg) -> Frame { return msg; }, m);
}

struct NodeRuntime {
  aodv::Agent agent;
  KinematicState kin;
  bool alive{true};
  distance::NeighborKnowledge knowledge;
  std::optional<distance::GpsFreeResult> gpsfree;
  std::map<NodeId, std::deque<DataPacket>> buffered;
};

class Engine {
 public:
  explicit Engine(const Scenario& s)
      : s_(s),
        mobility_rng_(make_stream(s.seed, kMobilityStream)),
        jitter_rng_(make_stream(s.seed, kJitterStream)),
        noise_rng_(make_stream(s.noise_seed.value_or(s.seed), kNoiseStream)) {}

  TraceBundle run() {
    s_.validate();
    init_nodes();
    schedule_initial();
    while (!queue_.empty() && queue_.top().time <= s_.duration) {
      auto event = queue_.pop();
      ++out_.summary.events;
      advance_kinematics(event.time);
      std::visit([&](auto& p) { handle(p, event.time); }, event.payload);
    }
    advance_kinematics(s_.duration);
    finish();
    return std::move(out_);
  }

 private:
  // ---- set-up --------------------------------------------------------------

  void init_nodes() {
    const SpeedRange speeds{s_.speed_min, s_.speed_max};
    nodes_.reserve(s_.node_count);
    for (NodeId n = 0; n < s_.node_count; ++n) {
      KinematicState k;
      k.node = n;
      k.position = s_.positions.empty() ? random_point(s_.area, mobility_rng_) : s_.positions[n];
      k.waypoint = s_.waypoints.empty() ? random_point(s_.area, mobility_rng_) : s_.waypoints[n];
      k.speed = s_.speeds.empty() ? random_speed(speeds, mobility_rng_) : s_.speeds[n];
      NodeRuntime rt{aodv::Agent(n, s_.aodv), k, true, {}, std::nullopt, {}};
      rt.knowledge.own.owner = n;
      nodes_.push_back(std::move(rt));
    }
  }

  void schedule_initial() {
    const double hello = s_.aodv.hello_interval;
    for (NodeId n = 0; n < s_.node_count; ++n) {
      // Evenly staggered HELLO phases keep beacons from colliding in time.
      queue_.push(hello * static_cast<double>(n) / s_.node_count, HelloTimer{n});
    }
    for (const auto& f : s_.failures) queue_.push(f.time, Failure{f.node});
    for (std::size_t i = 0; i < s_.traffic.size(); ++i) {
      queue_.push(s_.traffic[i].start, TrafficSend{i});
    }
    queue_.push(0.0, SampleTick{});
  }

  // ---- kinematics ----------------------------------------------------------

  void advance_kinematics(double t) {
    const double dt = t - kin_time_;
    if (dt <= 0.0) return;
    const SpeedRange speeds{s_.speed_min, s_.speed_max};
    for (auto& node : nodes_) {
      if (!node.alive) continue;
      node.kin = mobility_step(node.kin, dt, s_.area, speeds, mobility_rng_);
      if (!s_.area.contains(node.kin.position)) {
        throw RuntimeInvariantError("node " + std::to_string(node.kin.node) + " left the area");
      }
    }
    kin_time_ = t;
  }

  std::vector<KinematicState> alive_states() const {
    std::vector<KinematicState> out;
    for (const auto& node : nodes_) {
      if (node.alive) out.push_back(node.kin);
    }
    return out;
  }

  // ---- transmission --------------------------------------------------------

  double hop_delay() {
    if (s_.jitter <= 0.0) return s_.hop_latency;
    return s_.hop_latency + std::uniform_real_distribution<double>(0.0, s_.jitter)(jitter_rng_);
  }

  radio::PowerSample perturb(radio::PowerSample p) {
    if (s_.rssi_noise_sigma_db <= 0.0) return p;
    const double db = std::normal_distribution<double>(0.0, s_.rssi_noise_sigma_db)(noise_rng_);
    return {p.rx_power * std::pow(10.0, db / 10.0)};
  }

  void transmit(NodeId sender, std::optional<NodeId> next_hop, Frame frame, double now) {
    const Vec2 origin = nodes_[sender].kin.position;
    if (!next_hop) {
      const auto states = alive_states();
      for (const auto& r :
           deliver_broadcast(sender, origin, states, s_.radio_range, s_.radio, s_.channel)) {
        queue_.push(now + hop_delay(), Deliver{r.node, sender, frame, r.distance, perturb(r.power)});
      }
      return;
    }
    const NodeRuntime& target = nodes_[*next_hop];
    const double d = euclidean(origin, target.kin.position);
    if (!target.alive || d > s_.radio_range) {
      ++out_.summary.frames_lost;
      log(now, "LOST", sender, "next=" + std::to_string(*next_hop));
      return;
    }
    if (d == 0.0) {
      throw RuntimeInvariantError("nodes " + std::to_string(sender) + " and " +
                                  std::to_string(*next_hop) + " are co-located");
    }
    const auto power = perturb(radio::received_power(s_.radio, s_.channel, d));
    queue_.push(now + hop_delay(), Deliver{*next_hop, sender, std::move(frame), d, power});
  }

  void send(NodeId sender, const aodv::Transmission& t, double now) {
    transmit(sender, t.next_hop, to_frame(t.message), now);
  }

  // ---- logging -------------------------------------------------------------

  void log(double now, const char* event, NodeId node, const std::string& detail) {
    std::string line = trace::format_time(now);
    line += ' ';
    line += event;
    line += ' ';
    line += std::to_string(node);
    if (!detail.empty()) {
      line += ' ';
      line += detail;
    }
    out_.protocol_log.push_back(std::move(line));
  }

  static std::string describe(const aodv::Rreq& r) {
    std::ostringstream os;
    os << "origin=" << r.origin << " id=" << r.rreq_id << " dest=" << r.dest
       << " hops=" << r.hop_count;
    return os.str();
  }

  static std::string describe(const aodv::Rrep& r) {
    std::ostringstream os;
    os << "origin=" << r.origin << " dest=" << r.dest << " seq=" << r.dest_seq
       << " hops=" << r.hop_count;
    return os.str();
  }

  static std::string describe(const aodv::Rerr& r) {
    std::ostringstream os;
    os << "unreachable=";
    for (std::size_t i = 0; i < r.unreachable.size(); ++i) {
      os << (i ? "," : "") << r.unreachable[i].first << ':' << r.unreachable[i].second;
    }
    return os.str();
  }

  void log_route_changes(NodeId node, const RouteMap& before, double now) {
    for (const auto& [dest, e] : nodes_[node].agent.state().routes) {
      auto it = before.find(dest);
      const bool was_active = it != before.end() && it->second.active;
      const bool changed = it == before.end() || it->second.next_hop != e.next_hop ||
                           it->second.hop_count != e.hop_count || it->second.dest_seq != e.dest_seq;
      if (e.active && (!was_active || changed)) {
        std::ostringstream os;
        os << "dest=" << dest << " next=" << e.next_hop << " hops=" << e.hop_count
           << " seq=" << e.dest_seq;
        log(now, "ROUTE_INSTALL", node, os.str());
      } else if (!e.active && was_active) {
        log(now, "ROUTE_INVALID", node, "dest=" + std::to_string(dest));
      }
    }
  }

  // ---- discovery and data --------------------------------------------------

  void on_discovery_step(NodeId node, const aodv::DiscoveryStep& step, double now) {
    if (const auto* emitted = std::get_if<aodv::RreqEmitted>(&step)) {
      ++out_.summary.rreq_originated;
      log(now, "RREQ_SEND", node, describe(std::get<aodv::Rreq>(emitted->frame.message)));
      send(node, emitted->frame, now);
      const NodeId dest = std::get<aodv::Rreq>(emitted->frame.message).dest;
      queue_.push(emitted->retry_at, DiscoveryTimer{node, dest});
    } else if (const auto* lost = std::get_if<aodv::Unreachable>(&step)) {
      ++out_.summary.unreachable;
      auto& buffer = nodes_[node].buffered[lost->dest];
      out_.summary.data_dropped += buffer.size();
      buffer.clear();
      log(now, "UNREACHABLE", node, "dest=" + std::to_string(lost->dest));
    }
  }

  void forward_data(NodeId node, const DataPacket& packet, double now) {
    aodv::Agent& agent = nodes_[node].agent;
    const RoutingTableEntry* route = agent.valid_route(packet.dest, now);
    if (route == nullptr) {
      ++out_.summary.data_dropped;
      log(now, "DATA_DROP", node, "dest=" + std::to_string(packet.dest));
      return;
    }
    const NodeId next = route->next_hop;
    agent.refresh_route(packet.dest, now);
    agent.refresh_route(packet.source, now);
    transmit(node, next, packet, now);
  }

  void flush_buffer(NodeId node, NodeId dest, double now) {
    auto it = nodes_[node].buffered.find(dest);
    if (it == nodes_[node].buffered.end()) return;
    std::deque<DataPacket> packets;
    packets.swap(it->second);
    for (const auto& p : packets) forward_data(node, p, now);
  }

  // ---- event handlers ------------------------------------------------------

  void handle(Deliver& d, double now) {
    NodeRuntime& node = nodes_[d.receiver];
    if (!node.alive) return;
    std::visit([&](auto& frame) { receive(d, frame, now); }, d.frame);
  }

  void receive(const Deliver& d, const aodv::Rreq& rreq, double now) {
    NodeRuntime& node = nodes_[d.receiver];
    const RouteMap before = node.agent.state().routes;
    const aodv::RreqOutcome outcome = node.agent.handle_rreq(rreq, d.sender, now);
    if (!outcome.accepted) {
      ++out_.summary.rreq_duplicates;
      log(now, "RREQ_DROP", d.receiver,
          describe(rreq) + " from=" + std::to_string(d.sender) + " reason=" +
              (outcome.note ? outcome.note : "dropped"));
      return;
    }
    ++out_.summary.rreq_accepted;
    log(now, "RREQ_RECV", d.receiver, describe(rreq) + " from=" + std::to_string(d.sender));
    log_route_changes(d.receiver, before, now);

    const auto m = distance::measure_on_rreq(node.knowledge.own, d.sender, d.power, d.distance,
                                             s_.mode, s_.radio, now);
    out_.records.push_back(m.record);
    ++out_.summary.table_broadcasts;
    transmit(d.receiver, std::nullopt, m.broadcast, now);
    if (s_.mode == distance::MeasurementMode::GpsFree) refresh_gpsfree(d.receiver, rreq.dest, now);

    for (const auto& t : outcome.out) {
      if (outcome.action == aodv::RreqAction::Rebroadcast) {
        ++out_.summary.rreq_rebroadcast;
        log(now, "RREQ_FWD", d.receiver, describe(std::get<aodv::Rreq>(t.message)));
      } else {
        ++out_.summary.rrep_sent;
        log(now, "RREP_SEND", d.receiver,
            describe(std::get<aodv::Rrep>(t.message)) + " next=" + std::to_string(*t.next_hop));
      }
      send(d.receiver, t, now);
    }
  }

  void refresh_gpsfree(NodeId id, NodeId rreq_dest, double now) {
    NodeRuntime& node = nodes_[id];
    try {
      node.gpsfree = distance::gpsfree_refresh(node.knowledge, {rreq_dest});
      ++out_.summary.gpsfree_refreshes;
      const auto& tri = node.gpsfree->frame.triple;
      std::ostringstream os;
      os << "ref=" << tri.center << ',' << tri.x_axis << ',' << tri.y_side
         << " placed=" << node.gpsfree->coordinates.size();
      log(now, "GPSFREE", id, os.str());
    } catch (const NoValidReference&) {
      ++out_.summary.gpsfree_no_reference;
      log(now, "GPSFREE", id, "no_reference");
    }
  }

  void receive(const Deliver& d, const aodv::Rrep& rrep, double now) {
    NodeRuntime& node = nodes_[d.receiver];
    const RouteMap before = node.agent.state().routes;
    const aodv::RrepOutcome outcome = node.agent.handle_rrep(rrep, d.sender, now);
    log_route_changes(d.receiver, before, now);
    const std::string detail = describe(rrep) + " from=" + std::to_string(d.sender);
    switch (outcome.action) {
      case aodv::RrepAction::Delivered:
        ++out_.summary.rrep_delivered;
        log(now, "RREP_RECV", d.receiver, detail);
        flush_buffer(d.receiver, rrep.dest, now);
        break;
      case aodv::RrepAction::Forwarded:
        log(now, "RREP_FWD", d.receiver, detail);
        for (const auto& t : outcome.out) send(d.receiver, t, now);
        break;
      case aodv::RrepAction::Stale:
        log(now, "RREP_STALE", d.receiver, detail);
        break;
      case aodv::RrepAction::NoReverseRoute:
        log(now, "RREP_DROP", d.receiver, detail + " reason=no_reverse_route");
        break;
    }
  }

  void receive(const Deliver& d, const aodv::Rerr& rerr, double now) {
    NodeRuntime& node = nodes_[d.receiver];
    log(now, "RERR_RECV", d.receiver, describe(rerr) + " from=" + std::to_string(d.sender));
    const RouteMap before = node.agent.state().routes;
    const aodv::RerrOutcome outcome = node.agent.handle_rerr(rerr, d.sender, now);
    log_route_changes(d.receiver, before, now);
    for (const auto& t : outcome.out) {
      ++out_.summary.rerr_sent;
      log(now, "RERR_SEND", d.receiver, describe(std::get<aodv::Rerr>(t.message)));
      send(d.receiver, t, now);
    }
  }

  void receive(const Deliver& d, const aodv::Hello&, double) {
    nodes_[d.receiver].agent.note_heard(d.sender);
  }

  void receive(const Deliver& d, const distance::NeighborTableBroadcast& table, double now) {
    NodeRuntime& node = nodes_[d.receiver];
    node.agent.note_heard(d.sender);
    distance::merge_neighbor_table(node.knowledge, table, now);
  }

  void receive(const Deliver& d, const DataPacket& packet, double now) {
    nodes_[d.receiver].agent.note_heard(d.sender);
    if (packet.dest == d.receiver) {
      ++out_.summary.data_delivered;
      nodes_[d.receiver].agent.refresh_route(packet.source, now);
      log(now, "DATA_RECV", d.receiver,
          "source=" + std::to_string(packet.source) + " seq=" + std::to_string(packet.seq));
      return;
    }
    forward_data(d.receiver, packet, now);
  }

  void handle(HelloTimer& h, double now) {
    NodeRuntime& node = nodes_[h.node];
    if (!node.alive) return;
    for (NodeId dest : node.agent.expire_routes(now)) {
      log(now, "ROUTE_EXPIRE", h.node, "dest=" + std::to_string(dest));
    }
    const aodv::HelloOutcome outcome = node.agent.hello_tick(now);
    ++out_.summary.hello_sent;
    log(now, "HELLO", h.node, "");
    send(h.node, outcome.hello, now);
    for (NodeId lost : outcome.failed_links) {
      ++out_.summary.link_failures;
      log(now, "LINK_FAIL", h.node, "neighbor=" + std::to_string(lost));
      const RouteMap before = node.agent.state().routes;
      const aodv::RerrOutcome rerr = node.agent.handle_link_failure(lost, now);
      log_route_changes(h.node, before, now);
      for (const auto& t : rerr.out) {
        ++out_.summary.rerr_sent;
        log(now, "RERR_SEND", h.node, describe(std::get<aodv::Rerr>(t.message)));
        send(h.node, t, now);
      }
    }
    queue_.push(now + s_.aodv.hello_interval, HelloTimer{h.node});
  }

  void handle(DiscoveryTimer& t, double now) {
    if (!nodes_[t.node].alive) return;
    on_discovery_step(t.node, nodes_[t.node].agent.discovery_timeout(t.dest, now), now);
  }

  void handle(TrafficSend& t, double now) {
    const TrafficFlow& flow = s_.traffic[t.flow];
    NodeRuntime& node = nodes_[flow.source];
    if (!node.alive) return;
    const DataPacket packet{flow.source, flow.dest, data_seq_++};
    ++out_.summary.data_sent;
    if (node.agent.valid_route(flow.dest, now) != nullptr) {
      forward_data(flow.source, packet, now);
    } else {
      auto& buffer = node.buffered[flow.dest];
      if (buffer.size() >= kMaxBufferedPackets) {
        buffer.pop_front();
        ++out_.summary.data_dropped;
      }
      buffer.push_back(packet);
      on_discovery_step(flow.source, node.agent.originate_discovery(flow.dest, now), now);
    }
    queue_.push(now + flow.interval, TrafficSend{t.flow});
  }

  void handle(SampleTick&, double now) {
    std::vector<Vec2> positions;
    for (const auto& node : nodes_) {
      if (node.alive) positions.push_back(node.kin.position);
    }
    if (positions.size() >= 2) {
      std::optional<double> limit;
      if (s_.avg_in_range) limit = s_.radio_range;
      out_.mobility.push_back(mobility::network_avg_distance(positions, now, limit));
    }
    queue_.push(now + s_.sample_interval, SampleTick{});
  }

  void handle(Failure& f, double now) {
    if (!nodes_[f.node].alive) return;
    nodes_[f.node].alive = false;
    log(now, "NODE_DOWN", f.node, "");
  }

  void finish() {
    for (const auto& node : nodes_) {
      out_.nodes.push_back(NodeSnapshot{node.kin.node, node.kin.position, node.alive,
                                        node.agent.state().routes, node.knowledge, node.gpsfree});
    }
  }

  Scenario s_;
  Rng mobility_rng_;
  Rng jitter_rng_;
  Rng noise_rng_;
  EventQueue<Payload> queue_;
  std::vector<NodeRuntime> nodes_;
  double kin_time_{0.0};
  std::uint64_t data_seq_{0};
  TraceBundle out_;
};

}  // namespace

TraceBundle run_scenario(const Scenario& scenario) { return Engine(scenario).run(); }

}  // namespace manet::sim
