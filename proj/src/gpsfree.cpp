#include "manet/gpsfree.hpp"

#include <algorithm>
#include <numbers>
#include <vector>

namespace manet::gpsfree {

namespace {

// Angle between the two adjacent sides, opposite side may be zero.
double included_angle(double adjacent1, double adjacent2, double opposite) {
  if (!(adjacent1 > 0.0) || !(adjacent2 > 0.0) || !(opposite >= 0.0)) {
    throw DegenerateGeometry("law of cosines needs positive adjacent sides");
  }
  double c = (adjacent1 * adjacent1 + adjacent2 * adjacent2 - opposite * opposite) /
             (2.0 * adjacent1 * adjacent2);
  if (!std::isfinite(c) || c > 1.0 + kCosineTolerance || c < -1.0 - kCosineTolerance) {
    throw DegenerateGeometry("ranges violate the triangle inequality");
  }
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c);
}

bool collinear(double alpha) {
  return alpha < kCollinearAngle || std::numbers::pi - alpha < kCollinearAngle;
}

}  // namespace

std::optional<double> NeighborDistanceTable::distance_to(NodeId neighbor) const {
  auto it = entries.find(neighbor);
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

void NeighborDistanceTable::set(NodeId neighbor, double distance, double now) {
  if (neighbor == owner) {
    throw Error("neighbor table cannot hold a self entry");
  }
  if (!(distance >= 0.0) || !std::isfinite(distance)) {
    throw Error("neighbor distance must be finite and >= 0");
  }
  entries[neighbor] = distance;
  timestamp = now;
}

void PairwiseDistances::set(NodeId a, NodeId b, double distance) {
  if (a == b) return;
  values_[key(a, b)] = distance;
}

void PairwiseDistances::set_if_absent(NodeId a, NodeId b, double distance) {
  if (a == b) return;
  values_.try_emplace(key(a, b), distance);
}

std::optional<double> PairwiseDistances::get(NodeId a, NodeId b) const {
  if (a == b) return 0.0;
  auto it = values_.find(key(a, b));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

Vec2 LocalFrame::y_side_point() const {
  return {d_iq * std::cos(alpha), d_iq * std::sin(alpha)};
}

double angle_alpha(double d_ip, double d_iq, double d_pq) {
  if (!(d_pq > 0.0)) {
    throw DegenerateGeometry("angle_alpha: d_pq must be > 0");
  }
  return included_angle(d_ip, d_iq, d_pq);
}

ReferenceTriple select_reference(const NeighborDistanceTable& table,
                                 const std::set<NodeId>& exclude,
                                 const PairwiseDistances& cross) {
  struct Candidate {
    NodeId id;
    double distance;
  };
  std::vector<Candidate> candidates;
  for (const auto& [id, d] : table.entries) {
    if (id == table.owner || exclude.contains(id)) continue;
    candidates.push_back({id, d});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });

  // Colexicographic order over index triples (a < b < c): every triple whose
  // farthest member is the c-th candidate comes before any triple using c+1.
  const std::size_t n = candidates.size();
  for (std::size_t c = 2; c < n; ++c) {
    for (std::size_t b = 1; b < c; ++b) {
      for (std::size_t a = 0; a < b; ++a) {
        const NodeId i = candidates[a].id;
        const NodeId p = candidates[b].id;
        const NodeId q = candidates[c].id;
        const auto d_ip = cross.get(i, p);
        const auto d_iq = cross.get(i, q);
        const auto d_pq = cross.get(p, q);
        if (!d_ip || !d_iq || !d_pq) continue;
        if (!(*d_ip > 0.0) || !(*d_iq > 0.0) || !(*d_pq > 0.0)) continue;
        try {
          if (collinear(angle_alpha(*d_ip, *d_iq, *d_pq))) continue;
        } catch (const DegenerateGeometry&) {
          continue;
        }
        return {i, p, q};
      }
    }
  }
  throw NoValidReference("no non-collinear reference triple among eligible neighbors");
}

LocalFrame build_frame(const ReferenceTriple& triple, double d_ip, double d_iq, double d_pq) {
  if (triple.center == triple.x_axis || triple.center == triple.y_side ||
      triple.x_axis == triple.y_side) {
    throw DegenerateGeometry("reference triple members must be distinct");
  }
  const double alpha = angle_alpha(d_ip, d_iq, d_pq);
  if (collinear(alpha)) {
    throw DegenerateGeometry("reference triple is collinear");
  }
  return {triple, alpha, d_ip, d_iq};
}

LocalCoordinate localize_one_hop(const LocalFrame& frame, NodeId subject, double d_ia,
                                 double d_pa, std::optional<double> d_qa) {
  const double alpha_a = included_angle(frame.d_ip, d_ia, d_pa);
  const double x = d_ia * std::cos(alpha_a);
  const double y = d_ia * std::sin(alpha_a);
  if (!d_qa) {
    return {subject, x, y, true};
  }
  const Vec2 q = frame.y_side_point();
  const double above = std::abs(euclidean({x, y}, q) - *d_qa);
  const double below = std::abs(euclidean({x, -y}, q) - *d_qa);
  return {subject, x, below < above ? -y : y, false};
}

LocalCoordinate localize_two_hop(const LocalFrame& frame, NodeId subject, double d_ia,
                                 double d_ab, double d_pb) {
  if (!(d_ia > 0.0) || !(d_ab > 0.0)) {
    throw DegenerateGeometry("localize_two_hop: d_ia and d_ab must be > 0");
  }
  const double d_ib = d_ia + d_ab;
  const double alpha_b = included_angle(frame.d_ip, d_ib, d_pb);
  return {subject, d_ib * std::cos(alpha_b), d_ib * std::sin(alpha_b), true};
}

double frame_distance(const LocalCoordinate& a, const LocalCoordinate& b) {
  return euclidean(a.point(), b.point());
}

}  // namespace manet::gpsfree
