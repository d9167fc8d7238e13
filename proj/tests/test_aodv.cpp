#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "manet/aodv.hpp"

using namespace manet;
using namespace manet::aodv;

namespace {

const Rreq& rreq_of(const Transmission& t) { return std::get<Rreq>(t.message); }
const Rrep& rrep_of(const Transmission& t) { return std::get<Rrep>(t.message); }

}  // namespace

TEST_CASE("fresher compares sequence numbers then hop counts") {
  CHECK(fresher({5, 9}, {4, 1}));
  CHECK(fresher({5, 2}, {5, 3}));
  CHECK_FALSE(fresher({5, 3}, {5, 3}));
  CHECK_FALSE(fresher({4, 1}, {5, 9}));
}

TEST_CASE("originate_discovery emits an RREQ for an unknown destination") {
  Agent a(0, {});
  const DiscoveryStep step = a.originate_discovery(7, 1.0);
  const auto& emitted = std::get<RreqEmitted>(step);
  const Rreq& r = rreq_of(emitted.frame);
  CHECK_FALSE(emitted.frame.next_hop.has_value());
  CHECK(r.origin == 0);
  CHECK(r.dest == 7);
  CHECK(r.hop_count == 0);
  CHECK_FALSE(r.dest_seq_known.has_value());
  CHECK(r.origin_seq == 1);
  CHECK(r.rreq_id == 1);
  CHECK(emitted.retry_at == doctest::Approx(1.0 + 2.8));
  CHECK(std::holds_alternative<DiscoveryInProgress>(a.originate_discovery(7, 1.5)));
  CHECK_THROWS_AS(a.originate_discovery(0, 1.0), SelfDestination);
}

TEST_CASE("originate_discovery returns a cached route") {
  Agent a(0, {});
  a.install_route({7, 3, 2, 10, 5.0, true});
  const auto step = a.originate_discovery(7, 1.0);
  CHECK(std::get<RouteReady>(step).route.next_hop == 3);
  // Expired routes do not count; the known sequence number is carried along.
  const auto later = a.originate_discovery(7, 6.0);
  CHECK(rreq_of(std::get<RreqEmitted>(later).frame).dest_seq_known == SeqNo{10});
}

TEST_CASE("isolated node gives up after the retry budget") {
  Agent a(0, {});
  int transmissions = 0;
  auto step = a.originate_discovery(5, 0.0);
  double t = 0.0;
  while (auto* e = std::get_if<RreqEmitted>(&step)) {
    ++transmissions;
    t = e->retry_at;
    step = a.discovery_timeout(5, t);
  }
  CHECK(transmissions == 3);
  CHECK(std::get<Unreachable>(step).dest == 5);
  CHECK(t == doctest::Approx(3 * 2.8));
  CHECK(a.state().pending.empty());
  CHECK(std::holds_alternative<NothingToDo>(a.discovery_timeout(5, t + 1)));
}

TEST_CASE("three-node chain discovery") {
  Agent A(0, {}), B(1, {}), C(2, {});
  const Rreq r0 = rreq_of(std::get<RreqEmitted>(A.originate_discovery(2, 0.0)).frame);

  const RreqOutcome at_b = B.handle_rreq(r0, 0, 0.001);
  CHECK(at_b.accepted);
  CHECK(at_b.action == RreqAction::Rebroadcast);
  const auto* rev = B.valid_route(0, 0.001);
  REQUIRE(rev != nullptr);
  CHECK(rev->hop_count == 1);
  CHECK(rev->next_hop == 0);

  const Rreq r1 = rreq_of(at_b.out.at(0));
  CHECK(r1.hop_count == 1);
  // A hears its own request echoed back.
  CHECK_FALSE(A.handle_rreq(r1, 1, 0.002).accepted);

  const RreqOutcome at_c = C.handle_rreq(r1, 1, 0.002);
  CHECK(at_c.action == RreqAction::Replied);
  CHECK(C.valid_route(0, 0.002)->hop_count == 2);
  CHECK(*at_c.out.at(0).next_hop == 1);
  const Rrep rep = rrep_of(at_c.out.at(0));
  CHECK(rep.hop_count == 0);
  CHECK(rep.dest == 2);

  const RrepOutcome fwd = B.handle_rrep(rep, 2, 0.003);
  CHECK(fwd.action == RrepAction::Forwarded);
  CHECK(*fwd.out.at(0).next_hop == 0);
  CHECK(B.valid_route(2, 0.003)->hop_count == 1);

  const RrepOutcome done = A.handle_rrep(rrep_of(fwd.out.at(0)), 1, 0.004);
  CHECK(done.action == RrepAction::Delivered);
  const auto* route = A.valid_route(2, 0.004);
  REQUIRE(route != nullptr);
  CHECK(route->hop_count == 2);
  CHECK(route->next_hop == 1);
  CHECK(A.state().pending.empty());
}

TEST_CASE("duplicate RREQs are dropped and leave routes alone") {
  Agent B(1, {});
  const Rreq r{0, 1, 1, 9, std::nullopt, 0};
  CHECK(B.handle_rreq(r, 0, 0.0).accepted);
  const auto routes = B.state().routes;
  const RreqOutcome again = B.handle_rreq(Rreq{0, 1, 1, 9, std::nullopt, 3}, 4, 0.01);
  CHECK_FALSE(again.accepted);
  CHECK(again.action == RreqAction::Dropped);
  CHECK(again.out.empty());
  CHECK(B.state().routes.size() == routes.size());
  CHECK(B.state().routes.at(0).next_hop == 0);
  CHECK(B.state().routes.at(0).hop_count == 1);
  // Past PATH_DISCOVERY_TIME the id is forgotten.
  CHECK(B.handle_rreq(Rreq{0, 1, 1, 9, std::nullopt, 0}, 0, 10.0).accepted);
}

TEST_CASE("intermediate node with a fresh route replies") {
  Agent B(1, {});
  B.install_route({9, 5, 3, 12, 20.0, true});
  const RreqOutcome out = B.handle_rreq(Rreq{0, 1, 1, 9, SeqNo{12}, 0}, 0, 1.0);
  CHECK(out.action == RreqAction::Replied);
  const Rrep rep = rrep_of(out.out.at(0));
  CHECK(rep.hop_count == 3);
  CHECK(rep.dest_seq == 12);
  CHECK(rep.lifetime == doctest::Approx(19.0));

  // Stale cache: requester knows a newer sequence number.
  Agent C(2, {});
  C.install_route({9, 5, 3, 12, 20.0, true});
  CHECK(C.handle_rreq(Rreq{0, 1, 1, 9, SeqNo{13}, 0}, 0, 1.0).action == RreqAction::Rebroadcast);

  AodvConfig no_replies;
  no_replies.intermediate_replies = false;
  Agent D(3, no_replies);
  D.install_route({9, 5, 3, 12, 20.0, true});
  CHECK(D.handle_rreq(Rreq{0, 1, 1, 9, SeqNo{12}, 0}, 0, 1.0).action == RreqAction::Rebroadcast);
}

TEST_CASE("destination reply carries a sequence number at least as fresh as requested") {
  Agent D(9, {});
  const RreqOutcome out = D.handle_rreq(Rreq{0, 1, 1, 9, SeqNo{40}, 2}, 3, 1.0);
  CHECK(rrep_of(out.out.at(0)).dest_seq >= 40);
  CHECK(D.state().own_seq >= 40);
}

TEST_CASE("stale RREP leaves the table unchanged") {
  Agent A(0, {});
  A.install_route({9, 1, 2, 10, 50.0, true});
  const RrepOutcome out = A.handle_rrep(Rrep{0, 9, 8, 0, 6.0}, 2, 1.0);
  CHECK(out.action == RrepAction::Stale);
  CHECK(A.state().routes.at(9).next_hop == 1);
  CHECK(A.state().routes.at(9).dest_seq == 10);
}

TEST_CASE("racing RREPs on a diamond keep the shorter route in both orders") {
  // A reaches D through B (2 hops) and through C and E (3 hops).
  const Rrep via_b{0, 3, 7, 1, 6.0};
  const Rrep via_c{0, 3, 7, 2, 6.0};
  for (bool short_first : {true, false}) {
    Agent A(0, {});
    (void)A.originate_discovery(3, 0.0);
    if (short_first) {
      CHECK(A.handle_rrep(via_b, 1, 0.01).action == RrepAction::Delivered);
      CHECK(A.handle_rrep(via_c, 2, 0.02).action == RrepAction::Stale);
    } else {
      CHECK(A.handle_rrep(via_c, 2, 0.01).action == RrepAction::Delivered);
      // Equal sequence, fewer hops replaces the entry.
      CHECK(A.handle_rrep(via_b, 1, 0.02).action == RrepAction::Delivered);
    }
    const auto* r = A.valid_route(3, 0.03);
    REQUIRE(r != nullptr);
    CHECK(r->hop_count == 2);
    CHECK(r->next_hop == 1);
  }
}

TEST_CASE("RREP without a reverse route is dropped") {
  Agent B(1, {});
  CHECK(B.handle_rrep(Rrep{0, 9, 4, 0, 6.0}, 9, 1.0).action == RrepAction::NoReverseRoute);
}

TEST_CASE("hello liveness counts consecutive misses") {
  Agent B(1, {});
  B.install_route({9, 2, 1, 1, 100.0, true});
  B.note_heard(2);
  CHECK(B.hello_tick(1.0).failed_links.empty());  // heard
  CHECK(B.hello_tick(2.0).failed_links.empty());  // miss 1
  CHECK(B.hello_tick(3.0).failed_links.empty());  // miss 2
  B.note_heard(2);
  CHECK(B.state().neighbor_missed.at(2) == 0);
  CHECK(B.hello_tick(4.0).failed_links.empty());
  CHECK(B.hello_tick(5.0).failed_links.empty());
  CHECK(B.hello_tick(6.0).failed_links.empty());
  const HelloOutcome out = B.hello_tick(7.0);
  REQUIRE(out.failed_links.size() == 1);
  CHECK(out.failed_links[0] == 2);
  CHECK(std::get<Hello>(out.hello.message).sender == 1);
}

TEST_CASE("link failure invalidates routes through the lost neighbor only") {
  Agent B(1, {});
  CHECK(B.handle_link_failure(7, 0.0).out.empty());  // nothing routed through 7

  B.install_route({9, 2, 2, 5, 100.0, true});
  B.install_route({8, 2, 3, 6, 100.0, true});
  B.install_route({7, 3, 1, 2, 100.0, true});
  const RerrOutcome out = B.handle_link_failure(2, 1.0);
  CHECK(out.invalidated.size() == 2);
  CHECK_FALSE(B.state().routes.at(9).active);
  CHECK(B.state().routes.at(9).dest_seq == 6);
  CHECK(B.state().routes.at(7).active);
  const Rerr& rerr = std::get<Rerr>(out.out.at(0).message);
  CHECK(rerr.unreachable.size() == 2);

  // Upstream node A routes to 9 through B and repeats the error.
  Agent A(0, {});
  A.install_route({9, 1, 3, 5, 100.0, true});
  A.install_route({4, 5, 1, 1, 100.0, true});
  const RerrOutcome up = A.handle_rerr(rerr, 1, 1.1);
  CHECK(up.invalidated.size() == 1);
  CHECK_FALSE(A.state().routes.at(9).active);
  CHECK(A.state().routes.at(4).active);
  CHECK(up.out.size() == 1);
  // Once invalidated, the source can start a fresh discovery.
  CHECK(std::holds_alternative<RreqEmitted>(A.originate_discovery(9, 1.2)));
}

TEST_CASE("link failure property over random tables") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<NodeId> node(1, 12);
  for (int t = 0; t < 200; ++t) {
    Agent a(0, {});
    for (int k = 0; k < 10; ++k) {
      const NodeId dest = node(rng);
      a.install_route({dest, node(rng), 1 + dest % 4, dest, 50.0, rng() % 4 != 0});
    }
    const auto before = a.state().routes;
    const NodeId lost = node(rng);
    (void)a.handle_link_failure(lost, 1.0);
    for (const auto& [dest, e] : a.state().routes) {
      const auto& old = before.at(dest);
      if (old.next_hop == lost) {
        CHECK_FALSE(e.active);
      } else {
        CHECK(e.active == old.active);
        CHECK(e.dest_seq == old.dest_seq);
        CHECK(e.expiry == old.expiry);
      }
    }
  }
}

TEST_CASE("route expiry and refresh") {
  Agent a(0, {});
  a.install_route({9, 1, 2, 3, 3.0, true});
  CHECK(a.expire_routes(2.5).empty());
  a.refresh_route(9, 2.5);
  CHECK(a.state().routes.at(9).expiry == doctest::Approx(5.5));
  CHECK(a.expire_routes(5.4).empty());
  const auto expired = a.expire_routes(5.6);
  CHECK(expired == std::vector<NodeId>{9});
  CHECK_FALSE(a.state().routes.at(9).active);
  CHECK(a.valid_route(9, 5.6) == nullptr);
}

TEST_CASE("own sequence number never decreases") {
  std::mt19937_64 rng(3);
  Agent a(0, {});
  SeqNo last = 0;
  for (int k = 0; k < 500; ++k) {
    const double now = k * 0.1;
    switch (rng() % 4) {
      case 0: (void)a.originate_discovery(1 + rng() % 5, now); break;
      case 1: (void)a.handle_rreq(Rreq{NodeId(1 + rng() % 5), SeqNo(rng() % 50), std::uint32_t(rng() % 9), 0,
                                       SeqNo(rng() % 60), 1}, 7, now); break;
      case 2: (void)a.discovery_timeout(1 + rng() % 5, now); break;
      default: (void)a.hello_tick(now); break;
    }
    CHECK(a.state().own_seq >= last);
    last = a.state().own_seq;
  }
}
