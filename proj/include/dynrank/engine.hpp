#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "dynrank/graph.hpp"

namespace dynrank {

enum class Mode { synchronous, asynchronous };

// Algorithm parameters. Defaults: damping 0.85, L-inf iteration tolerance
// 1e-10, frontier tolerance tau/1e5, at most 500 iterations, asynchronous
// rank storage, dynamic chunks of 2048 vertices. threads == 0 means "all
// hardware threads".
struct EngineConfig {
  double alpha          = 0.85;
  double tau            = 1e-10;
  double tau_f          = 1e-15;
  int    max_iterations = 500;
  Mode   mode           = Mode::asynchronous;
  int    chunk_size     = 2048;
  int    threads        = 0;

  // Throws contract_error unless 0<alpha<1, 0<tau_f<=tau, max_iterations>=1,
  // chunk_size>=1 and threads>=0.
  void validate() const;

  EngineConfig with_tau(double t) const {
    EngineConfig c = *this;
    c.tau   = t;
    c.tau_f = t / 1e5;
    return c;
  }
};

// Per-vertex rank values (probability mass; sums to 1 at the fixed point).
struct RankVector {
  std::vector<double> values;

  RankVector() = default;
  explicit RankVector(std::size_t n, double fill = 0.0) : values(n, fill) {}

  std::size_t size() const { return values.size(); }
  double  operator[](std::size_t v) const { return values[v]; }
  double& operator[](std::size_t v) { return values[v]; }

  bool operator==(const RankVector&) const = default;
};

// Per-vertex byte flags: 1 marks a vertex whose rank will be recomputed.
// Flags only ever transition 0 -> 1 during a run.
struct AffectedFlags {
  std::vector<std::uint8_t> flags;

  AffectedFlags() = default;
  explicit AffectedFlags(std::size_t n) : flags(n, 0) {}

  std::size_t size() const { return flags.size(); }
  bool is_set(std::size_t v) const { return flags[v] != 0; }
  void set(std::size_t v) { flags[v] = 1; }
  std::uint64_t count() const;

  bool operator==(const AffectedFlags&) const = default;
};

struct RunResult {
  RankVector    ranks;
  int           iterations     = 0;
  std::uint64_t rank_updates   = 0;  // vertex-rank computations performed
  std::uint64_t affected_final = 0;  // vertices flagged at termination
  double        elapsed        = 0.0;  // seconds, marking + iterations
  bool          converged      = false;
};

// One application of the rank update to vertex v over graph g with ranks r:
//   (1-alpha)/n + alpha * sum_{u in g.in(v)} r[u] / out_degree(u).
// g must be normalized so every out-degree is at least 1.
double rank_of(Vertex v, const GraphSnapshot& g, std::span<const double> r,
               double alpha);

// Full power iteration from uniform 1/n ranks until the largest per-vertex
// change drops to cfg.tau or cfg.max_iterations is hit.
RunResult static_pagerank(const GraphSnapshot& g, const EngineConfig& cfg);

// Same loop seeded with the previous snapshot's ranks; still processes every
// vertex each iteration.
RunResult naive_dynamic_pagerank(const GraphSnapshot& g_curr,
                                 const RankVector& r_prev,
                                 const EngineConfig& cfg);

// Flags every vertex reachable (in either snapshot) from a source vertex of
// any deleted or inserted edge, sources included.
AffectedFlags mark_reachable(const GraphSnapshot& g_prev,
                             const GraphSnapshot& g_curr,
                             const BatchUpdate& b);

// Recomputes only the vertices flagged by mark_reachable; unflagged vertices
// keep their r_prev values bit-exactly. out_flags, when given, receives the
// processed set.
RunResult dynamic_traversal_pagerank(const GraphSnapshot& g_prev,
                                     const GraphSnapshot& g_curr,
                                     const BatchUpdate& b,
                                     const RankVector& r_prev,
                                     const EngineConfig& cfg,
                                     AffectedFlags* out_flags = nullptr);

// Flags the out-neighbors, in both snapshots, of the source vertex of every
// deleted or inserted edge. The source itself is skipped (its self-loop does
// not mark it), so it only becomes affected as another source's out-neighbor.
AffectedFlags mark_initial_affected(const GraphSnapshot& g_prev,
                                    const GraphSnapshot& g_curr,
                                    const BatchUpdate& b);

// Frontier engine: starts from mark_initial_affected plus the batch sources
// themselves (their out-degree change moves their own rank through the
// self-loop term), recomputes flagged vertices, and whenever a vertex's rank
// moves by more than cfg.tau_f flags its current out-neighbors as well.
// Stops once the largest change over the processed set is at most cfg.tau.
// out_flags, when given, receives the final affected set.
RunResult dynamic_frontier_pagerank(const GraphSnapshot& g_prev,
                                    const GraphSnapshot& g_curr,
                                    const BatchUpdate& b,
                                    const RankVector& r_prev,
                                    const EngineConfig& cfg,
                                    AffectedFlags* out_flags = nullptr);

}  // namespace dynrank
