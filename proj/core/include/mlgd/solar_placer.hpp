#pragma once

#include <stdexcept>
#include <string>

#include "mlgd/graph.hpp"
#include "mlgd/runner.hpp"
#include "mlgd/solar_merger.hpp"

namespace mlgd {

class MissingCoarsePosition : public std::runtime_error {
 public:
  explicit MissingCoarsePosition(VertexId sun)
      : std::runtime_error("no coarse position for sun " + std::to_string(sun)) {}
};

/// Maps a drawn coarse level down to initial positions for the finer level.
/// Suns take the position of their coarse image. Every other vertex v gets,
/// per inter-system link path through it between suns s and t, the candidate
/// point pos(s) + (d/L)(pos(t) - pos(s)) (d = v's index along the path, L its
/// hop length) and settles at the mean of its candidates. Vertices on no link
/// fall into a random disc around their sun of radius 0.5 * (mean drawn
/// length of the sun's incident coarse edges), or `fallback_radius` for
/// isolated coarse vertices. Suns push planet coordinates directly and moon
/// coordinates via two-hop messages.
Layout place_level(const Graph& level, const std::vector<VertexAttrs>& attrs,
                   const InterLinkTable& links, const Graph& coarse,
                   const Layout& coarse_layout, std::uint64_t seed, PhaseRunner& runner,
                   double fallback_radius = 1.0);

}  // namespace mlgd
