#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "manet/types.hpp"

// Anchor-free local coordinates from pairwise ranges. A node i sits at the
// origin, p fixes the positive x-axis and q fixes the half-plane y > 0.
namespace manet::gpsfree {

/// Tolerance on the arccos argument before a triangle is declared broken.
inline constexpr double kCosineTolerance = 1e-6;
/// Reference triples whose angle at the center is this close to 0 or pi are
/// treated as collinear.
inline constexpr double kCollinearAngle = 1e-6;

/// One node's measured one-hop ranges (its neighbor set and their distances).
struct NeighborDistanceTable {
  NodeId owner{0};
  std::map<NodeId, double> entries;
  double timestamp{0.0};

  std::optional<double> distance_to(NodeId neighbor) const;
  /// Rejects self entries and negative or non-finite distances.
  void set(NodeId neighbor, double distance, double now);
};

/// Symmetric sparse store of inter-node distances.
class PairwiseDistances {
 public:
  void set(NodeId a, NodeId b, double distance);
  /// Keeps an existing value for the pair.
  void set_if_absent(NodeId a, NodeId b, double distance);
  /// get(a, a) is 0.
  std::optional<double> get(NodeId a, NodeId b) const;
  std::size_t size() const { return values_.size(); }

 private:
  static std::pair<NodeId, NodeId> key(NodeId a, NodeId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }
  std::map<std::pair<NodeId, NodeId>, double> values_;
};

struct ReferenceTriple {
  NodeId center{0};  // i
  NodeId x_axis{0};  // p
  NodeId y_side{0};  // q

  friend bool operator==(const ReferenceTriple&, const ReferenceTriple&) = default;
};

struct LocalFrame {
  ReferenceTriple triple;
  double alpha{0.0};  // angle p-i-q, radians in (0, pi)
  double d_ip{0.0};
  double d_iq{0.0};

  Vec2 center_point() const { return {0.0, 0.0}; }
  Vec2 x_axis_point() const { return {d_ip, 0.0}; }
  Vec2 y_side_point() const;
};

struct LocalCoordinate {
  NodeId subject{0};
  double x{0.0};
  double y{0.0};
  // Set when no range to q was available, so the y sign is a guess.
  bool ambiguous{false};

  Vec2 point() const { return {x, y}; }
};

/// Angle opposite d_pq, from the law of cosines. Throws DegenerateGeometry
/// when the inputs are not positive or break the triangle inequality beyond
/// kCosineTolerance.
double angle_alpha(double d_ip, double d_iq, double d_pq);

/// Chooses (i, p, q) among the owner's nearest eligible neighbors: i nearest,
/// p second, q third. When that triple is collinear or lacks a cross range the
/// farthest member is swapped for the next candidate, so the chosen triple
/// always has the smallest possible farthest member. Ties go to the lower id.
ReferenceTriple select_reference(const NeighborDistanceTable& table,
                                 const std::set<NodeId>& exclude,
                                 const PairwiseDistances& cross);

LocalFrame build_frame(const ReferenceTriple& triple, double d_ip, double d_iq, double d_pq);

/// Places a node with known ranges to i and p. The mirror ambiguity is settled
/// against d_qa when given (smaller residual wins, ties to +y); without it the
/// +y candidate is returned and flagged ambiguous.
LocalCoordinate localize_one_hop(const LocalFrame& frame, NodeId subject, double d_ia,
                                 double d_pa, std::optional<double> d_qa);

/// Places b, two hops from i through a, taking d_ib = d_ia + d_ab. That sum is
/// exact only when i, a and b are collinear and overestimates otherwise.
LocalCoordinate localize_two_hop(const LocalFrame& frame, NodeId subject, double d_ia,
                                 double d_ab, double d_pb);

double frame_distance(const LocalCoordinate& a, const LocalCoordinate& b);

}  // namespace manet::gpsfree
