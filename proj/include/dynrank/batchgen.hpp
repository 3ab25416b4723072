#pragma once
#include <cstdint>

#include "dynrank/graph.hpp"

namespace dynrank {

// Recipe for a reproducible random batch: total size as a fraction of |E|,
// split between insertions and deletions (0.8 = the usual 80/20 mix).
struct BatchSpec {
  double        fraction     = 0.0;
  double        insert_ratio = 1.0;
  std::uint64_t seed         = 0;
};

// Draws round(fraction*m*insert_ratio) insertions and the complementary
// number of deletions from a normalized snapshot. Insertions are distinct
// uniform non-edges (u, v) with u != v; deletions are a uniform
// without-replacement sample of the existing non-self-loop edges. A nonzero
// fraction on a nonzero graph yields at least one edge. Identical (g, spec)
// always produce the identical batch, and the result satisfies apply_batch's
// strict preconditions.
BatchUpdate generate_batch(const GraphSnapshot& g, const BatchSpec& spec);

// Uniform random simple digraph with n vertices and (about) target_edges
// distinct non-self-loop edges, un-normalized. Experiment/benchmark support.
GraphSnapshot random_graph(Vertex n, std::uint64_t target_edges,
                           std::uint64_t seed);

}  // namespace dynrank
