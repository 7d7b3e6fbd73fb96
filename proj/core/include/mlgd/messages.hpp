#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "mlgd/types.hpp"

namespace mlgd {

/// Sun-to-sun path witnessed through a level graph, endpoints included.
/// Length (vertex count) is between 2 (adjacent suns) and 6 (moon-moon
/// contact).
using LinkPath = std::vector<VertexId>;

/// A sun announces itself; planets forward the announcement one hop.
/// Also used for the election broadcast, where `sun` is a candidate id.
struct Offer {
  VertexId sun;
};

/// A planet or moon joins a solar system. `relay` is the planet a moon
/// confirms (and later receives coordinates) through; planets carry their own
/// id there.
struct Confirmation {
  VertexId member;
  double mass;
  VertexId relay;
};

/// Broadcast of a vertex's route to its sun: [origin, (relay planet), sun].
struct InterLinkDiscovery {
  std::vector<VertexId> route;
};

/// Witnessed sun-to-sun path; path.front() is the addressee sun.
struct Conflict {
  LinkPath path;
};

/// A drawn vertex announces its coordinates (placement phase).
struct CoordinateBroadcast {
  VertexId vertex;
  Vec2 position;
};

/// A sun pushes a computed position to a system member.
struct PositionAssignment {
  VertexId vertex;
  Vec2 position;
};

/// k-neighborhood flooding wave; hop distance is implied by the wave round.
struct PositionFlood {
  VertexId origin;
  Vec2 position;
  double mass;
};

struct MessageBox;

/// Relay envelope: sent to an adjacent vertex, which forwards the boxed
/// payload to `final_target` with a plain send the next superstep. This is
/// the declared mechanism for distance-2 delivery; the engine itself only
/// ever delivers to neighbors.
struct TwoHop {
  VertexId final_target;
  std::shared_ptr<const MessageBox> payload;
};

using Message = std::variant<Offer, Confirmation, InterLinkDiscovery, Conflict,
                             CoordinateBroadcast, PositionAssignment, PositionFlood, TwoHop>;

struct MessageBox {
  Message msg;
};

inline TwoHop two_hop(VertexId final_target, Message payload) {
  return TwoHop{final_target, std::make_shared<const MessageBox>(MessageBox{std::move(payload)})};
}

/// Semantic payload size: ids and reals count 8 bytes each, independent of
/// the in-memory encoding. Used for the engine's per-superstep accounting.
inline std::size_t message_size(const Message& m) {
  struct Sizer {
    std::size_t operator()(const Offer&) const { return 8; }
    std::size_t operator()(const Confirmation&) const { return 24; }
    std::size_t operator()(const InterLinkDiscovery& d) const { return 8 * d.route.size(); }
    std::size_t operator()(const Conflict& c) const { return 8 * c.path.size(); }
    std::size_t operator()(const CoordinateBroadcast&) const { return 24; }
    std::size_t operator()(const PositionAssignment&) const { return 24; }
    std::size_t operator()(const PositionFlood&) const { return 32; }
    std::size_t operator()(const TwoHop& t) const {
      return 8 + message_size(t.payload->msg);
    }
  };
  return std::visit(Sizer{}, m);
}

}  // namespace mlgd
