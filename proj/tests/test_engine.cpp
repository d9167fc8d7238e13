#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "manet/engine.hpp"
#include "manet/event_queue.hpp"
#include "test_support.hpp"

using namespace manet;
using namespace manet::sim;

namespace {

std::size_t count_events(const TraceBundle& b, const std::string& event,
                         std::optional<NodeId> node = std::nullopt) {
  std::size_t n = 0;
  for (const auto& line : b.protocol_log) {
    std::istringstream in(line);
    std::string time, ev;
    NodeId who = 0;
    in >> time >> ev >> who;
    if (ev == event && (!node || who == *node)) ++n;
  }
  return n;
}

std::optional<double> first_event(const TraceBundle& b, const std::string& event, NodeId node) {
  for (const auto& line : b.protocol_log) {
    std::istringstream in(line);
    double time = 0;
    std::string ev;
    NodeId who = 0;
    in >> time >> ev >> who;
    if (ev == event && who == node) return time;
  }
  return std::nullopt;
}

Scenario static_scenario(std::vector<Vec2> positions) {
  Scenario s;
  s.node_count = static_cast<unsigned>(positions.size());
  s.speed_min = 0.0;
  s.speed_max = 0.0;
  s.positions = std::move(positions);
  s.waypoints = s.positions;
  s.speeds.assign(s.node_count, 0.0);
  return s;
}

}  // namespace

TEST_CASE("event queue orders by time then insertion") {
  EventQueue<char> q;
  q.push(2.0, 'a');
  q.push(1.0, 'b');
  q.push(1.0, 'c');
  q.push(0.0, 'd');
  std::string order;
  while (!q.empty()) order += q.pop().payload;
  CHECK(order == "dbca");
  CHECK(q.now() == 2.0);
  CHECK_THROWS_AS(q.push(1.5, 'x'), RuntimeInvariantError);
  q.push(2.0, 'y');
  CHECK(q.pop().payload == 'y');
}

TEST_CASE("mobility step moves toward the waypoint") {
  const Area area{100, 100};
  const SpeedRange speeds{1, 5};
  Rng rng(1);
  KinematicState k{0, {0, 0}, {10, 0}, 2.0};
  const auto moved = mobility_step(k, 3.0, area, speeds, rng);
  CHECK(moved.position.x == doctest::Approx(6.0));
  CHECK(moved.position.y == 0.0);
  CHECK(moved.waypoint == Vec2{10, 0});

  const auto arrived = mobility_step(k, 5.0, area, speeds, rng);
  CHECK(arrived.position == Vec2{10, 0});

  const auto past = mobility_step(k, 6.0, area, speeds, rng);
  CHECK(past.speed >= 1.0);
  CHECK(past.speed <= 5.0);
  CHECK_FALSE(past.waypoint == Vec2{10, 0});

  KinematicState still{0, {3, 4}, {3, 4}, 0.0};
  CHECK(mobility_step(still, 100.0, area, {0, 0}, rng).position == Vec2{3, 4});
}

TEST_CASE("random waypoint motion stays inside the area") {
  const Area area{300, 200};
  const SpeedRange speeds{0, 100};
  Rng rng(99);
  std::uniform_real_distribution<double> dt(0.0, 2.0);
  KinematicState k{0, random_point(area, rng), random_point(area, rng), random_speed(speeds, rng)};
  bool inside = true;
  for (int step = 0; step < 100000; ++step) {
    k = mobility_step(k, dt(rng), area, speeds, rng);
    inside = inside && area.contains(k.position) && area.contains(k.waypoint) &&
             k.speed >= 0.0 && k.speed <= 100.0;
  }
  CHECK(inside);
}

TEST_CASE("broadcast delivery uses the closed range ball") {
  const radio::RadioParams radio;
  const std::vector<KinematicState> nodes{
      {0, {0, 0}, {}, 0}, {1, {250, 0}, {}, 0}, {2, {0, 250.0001}, {}, 0}, {3, {10, 10}, {}, 0}};
  const auto got = deliver_broadcast(0, {0, 0}, nodes, 250.0, radio, radio::ChannelMode::Friis);
  std::set<NodeId> ids;
  for (const auto& r : got) ids.insert(r.node);
  CHECK(ids == std::set<NodeId>{1, 3});
  CHECK(neighbors_in_range(0, {0, 0}, nodes, 250.0) == std::set<NodeId>{1, 3});

  const std::vector<KinematicState> clash{{0, {5, 5}, {}, 0}, {1, {5, 5}, {}, 0}};
  CHECK_THROWS_AS(deliver_broadcast(0, {5, 5}, clash, 250.0, radio, radio::ChannelMode::Friis),
                  RuntimeInvariantError);
}

TEST_CASE("broadcast delivery matches an all-pairs scan") {
  const radio::RadioParams radio;
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto pts = testing::random_layout(rng, 15, 800.0);
    std::vector<KinematicState> nodes;
    for (NodeId k = 0; k < pts.size(); ++k) nodes.push_back({k, pts[k], pts[k], 0});
    for (NodeId s = 0; s < pts.size(); ++s) {
      const auto got = deliver_broadcast(s, pts[s], nodes, 250.0, radio,
                                         radio::ChannelMode::TwoRayCrossover);
      std::set<NodeId> expected, ids;
      for (NodeId k = 0; k < pts.size(); ++k) {
        if (k != s && std::hypot(pts[k].x - pts[s].x, pts[k].y - pts[s].y) <= 250.0) expected.insert(k);
      }
      for (const auto& r : got) {
        ids.insert(r.node);
        CHECK(r.power.rx_power == radio::received_power(radio, radio::ChannelMode::TwoRayCrossover,
                                                        r.distance).rx_power);
      }
      CHECK(ids == expected);
    }
  }
}

TEST_CASE("two static nodes discover a route and deliver data") {
  Scenario s = static_scenario({{100, 100}, {300, 100}});
  s.duration = 5.5;
  s.traffic.push_back({0, 1, 1.0, 1.0});
  const TraceBundle b = run_scenario(s);
  CHECK(count_events(b, "RREQ_SEND", 0) == 1);
  CHECK(count_events(b, "RREP_SEND", 1) == 1);
  CHECK(count_events(b, "RREP_RECV", 0) == 1);
  CHECK(b.summary.data_sent == 5);
  CHECK(b.summary.data_delivered == 5);
  REQUIRE(b.records.size() == 1);
  CHECK(b.records[0].rreq_source == 1);
  CHECK(b.records[0].rreq_dest == 0);
  CHECK(b.records[0].distance == 200.0);
  const auto& route = b.nodes[0].routes.at(1);
  CHECK(route.next_hop == 1);
  CHECK(route.hop_count == 1);
}

TEST_CASE("runs are deterministic for a seed") {
  Scenario s;
  s.duration = 20.0;
  s.seed = 77;
  s.jitter = 0.002;
  s.rssi_noise_sigma_db = 1.0;
  s.traffic = {{0, 5, 1.0, 0.5}, {3, 11, 2.0, 1.0}};
  const TraceBundle a = run_scenario(s);
  const TraceBundle b = run_scenario(s);
  CHECK(a.protocol_log == b.protocol_log);
  CHECK(a.records == b.records);
  CHECK(a.mobility == b.mobility);
  s.seed = 78;
  CHECK(run_scenario(s).protocol_log != a.protocol_log);
}

TEST_CASE("unreachable destination after the retry budget, then a fresh discovery") {
  Scenario s = static_scenario({{100, 100}, {700, 100}});
  s.duration = 10.5;
  s.traffic.push_back({0, 1, 1.0, 1.0});
  const TraceBundle b = run_scenario(s);
  CHECK(count_events(b, "UNREACHABLE", 0) == 1);
  CHECK(*first_event(b, "UNREACHABLE", 0) == doctest::Approx(1.0 + 3 * 2.8));
  CHECK(count_events(b, "RREQ_SEND", 0) == 4);
  CHECK(b.summary.data_delivered == 0);
}

TEST_CASE("trace bookkeeping and loop freedom on a mobile network") {
  Scenario s;
  s.duration = 40.0;
  s.seed = 4;
  s.speed_max = 20.0;
  s.traffic = {{0, 7, 1.0, 0.5}, {2, 9, 1.5, 0.5}, {13, 4, 3.0, 1.0}};
  const TraceBundle b = run_scenario(s);
  CHECK(b.records.size() == b.summary.rreq_accepted);
  CHECK(b.summary.table_broadcasts == b.summary.rreq_accepted);
  CHECK(b.records.size() > 0);
  CHECK(b.mobility.size() == 41);
  for (const auto& r : b.records) CHECK(r.distance <= s.radio_range);

  for (const auto& start : b.nodes) {
    for (const auto& [dest, entry] : start.routes) {
      std::set<NodeId> visited{start.id};
      NodeId at = start.id;
      bool loop = false;
      while (at != dest) {
        const auto& routes = b.nodes[at].routes;
        auto it = routes.find(dest);
        if (it == routes.end() || !it->second.active || it->second.expiry < s.duration) break;
        at = it->second.next_hop;
        if (!visited.insert(at).second) {
          loop = true;
          break;
        }
      }
      CHECK_FALSE(loop);
    }
  }
}

TEST_CASE("a failed next hop is detected through missed HELLOs") {
  Scenario s = static_scenario({{100, 100}, {300, 100}, {500, 100}});
  s.duration = 20.0;
  s.traffic.push_back({0, 2, 1.0, 1.0});
  s.failures.push_back({1, 5.0});
  const TraceBundle b = run_scenario(s);
  const auto fail = first_event(b, "LINK_FAIL", 0);
  REQUIRE(fail);
  CHECK(*fail > 5.0);
  CHECK(*fail <= 5.0 + 4 * s.aodv.hello_interval);
  CHECK(count_events(b, "UNREACHABLE", 0) >= 1);
  CHECK_FALSE(b.nodes[1].alive);
}

TEST_CASE("a steady flow keeps its route alive") {
  Scenario s = static_scenario({{100, 100}, {300, 100}, {500, 100}});
  s.duration = 30.5;
  s.traffic.push_back({0, 2, 1.0, 1.0});
  const TraceBundle b = run_scenario(s);
  CHECK(count_events(b, "RREQ_SEND", 0) == 1);
  CHECK(count_events(b, "ROUTE_EXPIRE", 0) == 0);
  CHECK(count_events(b, "LINK_FAIL") == 0);
  CHECK(b.summary.data_delivered == 30);
  CHECK(b.nodes[0].routes.at(2).hop_count == 2);
}

TEST_CASE("default-sized run finishes quickly") {
  Scenario s;
  s.traffic = {{0, 19, 1.0, 0.25}, {5, 12, 1.0, 0.25}, {8, 3, 2.0, 0.5}};
  const auto t0 = std::chrono::steady_clock::now();
  const TraceBundle b = run_scenario(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
  CHECK(b.summary.events > 0);
}

TEST_CASE("repeated floods give every node a full GPS-free picture") {
  const std::vector<Vec2> pts{{100, 100}, {200, 120}, {150, 220}, {260, 200}, {180, 300}};
  Scenario s = static_scenario(pts);
  s.channel = radio::ChannelMode::Friis;
  s.mode = distance::MeasurementMode::GpsFree;
  s.duration = 10.5;
  for (NodeId k = 0; k < 5; ++k) s.traffic.push_back({k, (k + 1) % 5, 1.0 + k, 5.0});
  const TraceBundle b = run_scenario(s);
  CHECK(b.summary.gpsfree_refreshes > 0);
  for (const auto& node : b.nodes) {
    CHECK(node.knowledge.own.entries.size() == 4);
    REQUIRE(node.gpsfree.has_value());
    CHECK(node.gpsfree->coordinates.size() == 5);
    for (const auto& [k, d] : node.gpsfree->distances) {
      CHECK(std::abs(d - euclidean(pts[node.id], pts[k])) < 1e-6);
    }
  }
}
