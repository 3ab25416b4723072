#include "dynrank/batchgen.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "dynrank/error.hpp"
#include "dynrank/rng.hpp"

namespace dynrank {

namespace {

std::uint64_t pair_key(Vertex u, Vertex v, Vertex n) {
  return std::uint64_t(u) * n + v;
}

// Distinct uniform sample of `count` indices from [0, universe).
std::vector<std::uint64_t> sample_indices(std::uint64_t universe,
                                          std::uint64_t count,
                                          SplitMix64& rng) {
  std::vector<std::uint64_t> picked;
  picked.reserve(count);
  if (count * 2 >= universe) {
    // Dense request: partial Fisher-Yates over the whole index range.
    std::vector<std::uint64_t> ix(universe);
    for (std::uint64_t i = 0; i < universe; ++i) ix[i] = i;
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint64_t j = i + rng.next_below(universe - i);
      std::swap(ix[i], ix[j]);
      picked.push_back(ix[i]);
    }
  } else {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(count * 2);
    while (picked.size() < count) {
      std::uint64_t i = rng.next_below(universe);
      if (seen.insert(i).second) picked.push_back(i);
    }
  }
  return picked;
}

}  // namespace

BatchUpdate generate_batch(const GraphSnapshot& g, const BatchSpec& spec) {
  if (spec.fraction < 0.0) throw contract_error("fraction must be >= 0");
  if (spec.insert_ratio < 0.0 || spec.insert_ratio > 1.0)
    throw contract_error("insert_ratio must lie in [0, 1]");
  if (!g.is_normalized())
    throw contract_error("generate_batch requires a normalized graph");

  const Vertex n        = g.order();
  const double total    = spec.fraction * double(g.size());
  std::uint64_t n_ins   = std::uint64_t(std::llround(total * spec.insert_ratio));
  std::uint64_t n_del   =
      std::uint64_t(std::llround(total * (1.0 - spec.insert_ratio)));
  if (n_ins + n_del == 0 && spec.fraction > 0.0 && g.size() > 0) {
    if (spec.insert_ratio >= 0.5)
      n_ins = 1;
    else
      n_del = 1;
  }

  // One self-loop per vertex after normalization.
  const std::uint64_t non_loop_edges = g.size() - n;
  if (n_del > non_loop_edges)
    throw contract_error("requested " + std::to_string(n_del) +
                         " deletions but only " +
                         std::to_string(non_loop_edges) +
                         " non-self-loop edges exist");

  SplitMix64 rng(spec.seed);
  BatchUpdate batch;

  if (n_del > 0) {
    // Global index over non-self-loop edges in CSR order; the self-loop sits
    // at a known sorted position inside each neighbor list.
    std::vector<std::uint64_t> prefix(n + 1, 0);
    for (Vertex u = 0; u < n; ++u)
      prefix[u + 1] = prefix[u] + (g.out_degree(u) - 1);
    auto deletions_rng = rng.split(0xD31);
    for (std::uint64_t ix : sample_indices(non_loop_edges, n_del,
                                           deletions_rng)) {
      Vertex u = Vertex(std::upper_bound(prefix.begin(), prefix.end(), ix) -
                        prefix.begin() - 1);
      std::uint64_t local = ix - prefix[u];
      auto nbrs = g.out_neighbors(u);
      std::uint64_t loop_pos =
          std::lower_bound(nbrs.begin(), nbrs.end(), u) - nbrs.begin();
      Vertex v = nbrs[local < loop_pos ? local : local + 1];
      batch.deletions.emplace_back(u, v);
    }
    std::sort(batch.deletions.begin(), batch.deletions.end());
  }

  if (n_ins > 0) {
    if (n < 2)
      throw generation_error("cannot place insertions on a graph with " +
                             std::to_string(n) + " vertices");
    auto insertions_rng = rng.split(0x175);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(n_ins * 2);
    std::uint64_t budget = 100 * n_ins;
    while (batch.insertions.size() < n_ins) {
      if (budget-- == 0)
        throw generation_error(
            "insertion retry budget exhausted; graph too dense for " +
            std::to_string(n_ins) + " new edges");
      Vertex u = Vertex(insertions_rng.next_below(n));
      Vertex v = Vertex(insertions_rng.next_below(n));
      if (u == v || g.has_edge(u, v)) continue;
      if (!chosen.insert(pair_key(u, v, n)).second) continue;
      batch.insertions.emplace_back(u, v);
    }
    std::sort(batch.insertions.begin(), batch.insertions.end());
  }

  return batch;
}

GraphSnapshot random_graph(Vertex n, std::uint64_t target_edges,
                           std::uint64_t seed) {
  if (n < 2 && target_edges > 0)
    throw contract_error("need at least 2 vertices for non-loop edges");
  if (target_edges > std::uint64_t(n) * (n - 1))
    throw contract_error("more edges requested than distinct pairs exist");

  SplitMix64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(target_edges * 2);
  std::vector<Edge> edges;
  edges.reserve(target_edges);
  while (edges.size() < target_edges) {
    Vertex u = Vertex(rng.next_below(n));
    Vertex v = Vertex(rng.next_below(n));
    if (u == v) continue;
    if (!chosen.insert(pair_key(u, v, n)).second) continue;
    edges.emplace_back(u, v);
  }
  return GraphSnapshot::from_edges(n, std::move(edges));
}

}  // namespace dynrank
