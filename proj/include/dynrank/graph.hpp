#pragma once
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dynrank {

using Vertex = std::uint32_t;
using Edge   = std::pair<Vertex, Vertex>;

// Immutable directed graph snapshot with sorted out- and in-adjacency in
// compressed (offset + target array) form. Snapshots are never mutated after
// construction; updates produce a new snapshot, leaving the old one readable.
class GraphSnapshot {
 public:
  GraphSnapshot() = default;

  // Builds a snapshot over vertices [0, n) from an arbitrary edge list.
  // Duplicate edges collapse; ids must be < n.
  static GraphSnapshot from_edges(Vertex n, std::vector<Edge> edges);

  Vertex        order() const { return n_; }   // |V|
  std::uint64_t size()  const { return m_; }   // |E|, self-loops included

  std::span<const Vertex> out_neighbors(Vertex u) const {
    return {out_targets_.data() + out_offsets_[u],
            out_targets_.data() + out_offsets_[u + 1]};
  }
  std::span<const Vertex> in_neighbors(Vertex v) const {
    return {in_targets_.data() + in_offsets_[v],
            in_targets_.data() + in_offsets_[v + 1]};
  }
  Vertex out_degree(Vertex u) const {
    return Vertex(out_offsets_[u + 1] - out_offsets_[u]);
  }
  Vertex in_degree(Vertex v) const {
    return Vertex(in_offsets_[v + 1] - in_offsets_[v]);
  }

  bool has_edge(Vertex u, Vertex v) const;
  bool has_self_loop(Vertex v) const { return has_edge(v, v); }

  // True once every vertex carries a self-loop (no dead ends possible).
  bool is_normalized() const;

  // All edges in (source, target) order, ascending.
  std::vector<Edge> edges() const;

  bool operator==(const GraphSnapshot& other) const = default;

 private:
  Vertex        n_ = 0;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> out_offsets_{0};
  std::vector<Vertex>        out_targets_;
  std::vector<std::uint64_t> in_offsets_{0};
  std::vector<Vertex>        in_targets_;
};

// Batch of edge changes turning one snapshot into the next. Deletions and
// insertions are disjoint; self-loops never appear in deletions.
struct BatchUpdate {
  std::vector<Edge> deletions;
  std::vector<Edge> insertions;

  bool empty() const { return deletions.empty() && insertions.empty(); }
};

enum class BatchPolicy { strict, lenient };

// Reads a plain "u v" edge list ('#'/'%' comments, configurable 0/1 base) or
// a MatrixMarket coordinate file (detected by banner, implies 1-based ids;
// symmetric matrices expand to both directions). Returns an un-normalized
// snapshot. Throws parse_error with a line number on malformed input.
GraphSnapshot load_edge_list(const std::string& path, int base = 0);

// Adds a self-loop to every vertex lacking one. Idempotent.
GraphSnapshot add_self_loops(const GraphSnapshot& g);

// Applies a batch to a normalized snapshot: E' = E \ deletions U insertions,
// re-normalized. Strict policy rejects deleting a missing edge, inserting an
// existing one, out-of-range ids, and duplicate batch entries; lenient skips
// them. g_prev is left untouched and remains readable.
GraphSnapshot apply_batch(const GraphSnapshot& g_prev, const BatchUpdate& b,
                          BatchPolicy policy = BatchPolicy::strict);

// Writes a batch as "+ u v" / "- u v" lines, 0-based, deletions first.
void write_batch(const BatchUpdate& b, std::ostream& os);
void write_batch(const BatchUpdate& b, const std::string& path);

}  // namespace dynrank
