#include "dynrank/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "dynrank/error.hpp"

namespace dynrank {

void EngineConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw contract_error("alpha must lie in (0, 1)");
  if (!(tau > 0.0)) throw contract_error("tau must be positive");
  if (!(tau_f > 0.0 && tau_f <= tau))
    throw contract_error("tau_f must satisfy 0 < tau_f <= tau");
  if (max_iterations < 1)
    throw contract_error("max_iterations must be at least 1");
  if (chunk_size < 1) throw contract_error("chunk_size must be at least 1");
  if (threads < 0) throw contract_error("threads must be nonnegative");
}

std::uint64_t AffectedFlags::count() const {
  std::uint64_t c = 0;
  for (std::uint8_t f : flags) c += f != 0;
  return c;
}

double rank_of(Vertex v, const GraphSnapshot& g, std::span<const double> r,
               double alpha) {
  double acc = 0.0;
  for (Vertex u : g.in_neighbors(v)) acc += r[u] / g.out_degree(u);
  return (1.0 - alpha) / g.order() + alpha * acc;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_runnable(const GraphSnapshot& g) {
  if (g.order() == 0) throw contract_error("empty graph");
  for (Vertex v = 0; v < g.order(); ++v)
    if (g.out_degree(v) == 0)
      throw contract_error("vertex " + std::to_string(v) +
                           " is a dead end; normalize the graph first");
}

void require_same_order(const GraphSnapshot& a, const GraphSnapshot& b) {
  if (a.order() != b.order())
    throw contract_error("snapshots disagree on vertex count");
}

void require_seed(const GraphSnapshot& g, const RankVector& r) {
  if (r.size() != g.order())
    throw contract_error("seed rank vector length " +
                         std::to_string(r.size()) + " != vertex count " +
                         std::to_string(g.order()));
}

// Flags out-neighbors of every batch source in both snapshots, skipping the
// source's own self-loop so a source only becomes affected as some other
// source's out-neighbor.
void mark_initial_into(AffectedFlags& f, const GraphSnapshot& g_prev,
                       const GraphSnapshot& g_curr, const BatchUpdate& b,
                       int threads) {
  auto mark_from = [&](const std::vector<Edge>& edges) {
    const std::int64_t k = std::int64_t(edges.size());
#pragma omp parallel for schedule(auto) num_threads(threads)
    for (std::int64_t i = 0; i < k; ++i) {
      Vertex u = edges[i].first;
      for (Vertex w : g_prev.out_neighbors(u))
        if (w != u) f.flags[w] = 1;
      for (Vertex w : g_curr.out_neighbors(u))
        if (w != u) f.flags[w] = 1;
    }
  };
  mark_from(b.deletions);
  mark_from(b.insertions);
}

void bfs_into(std::vector<std::uint8_t>& visited, const GraphSnapshot& g,
              const BatchUpdate& b, std::vector<Vertex>& queue) {
  queue.clear();
  auto push = [&](Vertex u) {
    if (u < g.order() && !visited[u]) {
      visited[u] = 1;
      queue.push_back(u);
    }
  };
  for (const Edge& e : b.deletions) push(e.first);
  for (const Edge& e : b.insertions) push(e.first);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex w : g.out_neighbors(u)) push(w);
  }
}

// A batch source's rank shifts as well: its out-degree changed, so its
// self-loop feeds it r[u]/deg(u) at a new weight. The frontier run flags
// sources on top of the initial neighbor marking or it would converge onto a
// stale value for them.
void mark_sources_into(AffectedFlags& f, const BatchUpdate& b) {
  for (const Edge& e : b.deletions) f.flags[e.first] = 1;
  for (const Edge& e : b.insertions) f.flags[e.first] = 1;
}

void mark_reachable_into(AffectedFlags& f, const GraphSnapshot& g_prev,
                         const GraphSnapshot& g_curr, const BatchUpdate& b,
                         std::vector<std::uint8_t>& visited,
                         std::vector<Vertex>& queue) {
  std::fill(visited.begin(), visited.end(), 0);
  bfs_into(visited, g_prev, b, queue);
  for (Vertex v = 0; v < g_prev.order(); ++v) f.flags[v] |= visited[v];
  std::fill(visited.begin(), visited.end(), 0);
  bfs_into(visited, g_curr, b, queue);
  for (Vertex v = 0; v < g_curr.order(); ++v) f.flags[v] |= visited[v];
}

struct LoopStats {
  int           iterations = 0;
  std::uint64_t updates    = 0;
  bool          converged  = false;
};

// Shared power-iteration driver. `flags` nullptr processes every vertex;
// `marking` additionally flags out-neighbors of vertices whose rank moved by
// more than tau_f. Scratch buffers are caller-allocated so the timed region
// stays free of allocation.
//
// Asynchronous mode updates `ranks` in place; concurrent readers may observe
// a neighbor's value from the current or previous sweep (aligned 8-byte
// loads/stores do not tear on supported targets). Synchronous mode reads
// from one array and writes the other, swapping per iteration, and pins the
// processed set at the start of each sweep, so results are identical for any
// thread count.
LoopStats power_loop(const GraphSnapshot& g, const EngineConfig& cfg,
                     std::vector<double>& ranks, AffectedFlags* flags,
                     bool marking, std::vector<double>& scratch_next,
                     std::vector<std::uint8_t>& scratch_active) {
  const Vertex n       = g.order();
  const int    threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  const int    chunk   = cfg.chunk_size;
  const double alpha   = cfg.alpha;

  LoopStats stats;

  if (cfg.mode == Mode::asynchronous) {
    std::vector<double>& r = ranks;
    std::uint8_t* live = flags ? flags->flags.data() : nullptr;
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
      double        delta_max = 0.0;
      std::uint64_t updates   = 0;
#pragma omp parallel for schedule(dynamic, chunk) num_threads(threads) \
    reduction(max : delta_max) reduction(+ : updates)
      for (Vertex v = 0; v < n; ++v) {
        if (live && !live[v]) continue;
        double nr = rank_of(v, g, r, alpha);
        double dr = std::abs(nr - r[v]);
        r[v] = nr;
        ++updates;
        delta_max = std::max(delta_max, dr);
        if (marking && dr > cfg.tau_f) {
          for (Vertex w : g.out_neighbors(v))
            if (w != v) live[w] = 1;
        }
      }
      stats.updates += updates;
      stats.iterations = iter;
      if (delta_max <= cfg.tau) {
        stats.converged = true;
        break;
      }
    }
    return stats;
  }

  // Synchronous: `curr` is read-only during a sweep, `next` collects the new
  // ranks. Filtered runs first copy curr into next so skipped vertices carry
  // their values forward.
  std::vector<double>* curr = &ranks;
  std::vector<double>* next = &scratch_next;
  const bool filtered = flags != nullptr;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    const std::uint8_t* active = nullptr;
    if (filtered) {
      *next = *curr;
      if (marking) {
        scratch_active = flags->flags;  // marks apply from the next sweep on
        active = scratch_active.data();
      } else {
        active = flags->flags.data();
      }
    }
    double        delta_max = 0.0;
    std::uint64_t updates   = 0;
    const std::vector<double>& rc = *curr;
    std::vector<double>&       rn = *next;
#pragma omp parallel for schedule(dynamic, chunk) num_threads(threads) \
    reduction(max : delta_max) reduction(+ : updates)
    for (Vertex v = 0; v < n; ++v) {
      if (active && !active[v]) continue;
      double nr = rank_of(v, g, rc, alpha);
      double dr = std::abs(nr - rc[v]);
      rn[v] = nr;
      ++updates;
      delta_max = std::max(delta_max, dr);
      if (marking && dr > cfg.tau_f) {
        for (Vertex w : g.out_neighbors(v))
          if (w != v) flags->flags[w] = 1;
      }
    }
    std::swap(curr, next);
    stats.updates += updates;
    stats.iterations = iter;
    if (delta_max <= cfg.tau) {
      stats.converged = true;
      break;
    }
  }
  if (curr != &ranks) ranks = *curr;
  return stats;
}

RunResult finish(RankVector&& ranks, const LoopStats& stats,
                 std::uint64_t affected, double elapsed) {
  RunResult res;
  res.ranks          = std::move(ranks);
  res.iterations     = stats.iterations;
  res.rank_updates   = stats.updates;
  res.affected_final = affected;
  res.elapsed        = elapsed;
  res.converged      = stats.converged;
  return res;
}

}  // namespace

AffectedFlags mark_initial_affected(const GraphSnapshot& g_prev,
                                    const GraphSnapshot& g_curr,
                                    const BatchUpdate& b) {
  require_same_order(g_prev, g_curr);
  AffectedFlags f(g_curr.order());
  mark_initial_into(f, g_prev, g_curr, b, omp_get_max_threads());
  return f;
}

AffectedFlags mark_reachable(const GraphSnapshot& g_prev,
                             const GraphSnapshot& g_curr,
                             const BatchUpdate& b) {
  require_same_order(g_prev, g_curr);
  AffectedFlags f(g_curr.order());
  std::vector<std::uint8_t> visited(g_curr.order(), 0);
  std::vector<Vertex> queue;
  queue.reserve(g_curr.order());
  mark_reachable_into(f, g_prev, g_curr, b, visited, queue);
  return f;
}

RunResult static_pagerank(const GraphSnapshot& g, const EngineConfig& cfg) {
  cfg.validate();
  require_runnable(g);
  const Vertex n = g.order();
  RankVector ranks(n, 1.0 / n);
  std::vector<double> scratch_next;
  std::vector<std::uint8_t> scratch_active;
  if (cfg.mode == Mode::synchronous) scratch_next.resize(n);

  auto t0 = Clock::now();
  LoopStats stats = power_loop(g, cfg, ranks.values, nullptr, false,
                               scratch_next, scratch_active);
  double elapsed = seconds_since(t0);
  return finish(std::move(ranks), stats, n, elapsed);
}

RunResult naive_dynamic_pagerank(const GraphSnapshot& g_curr,
                                 const RankVector& r_prev,
                                 const EngineConfig& cfg) {
  cfg.validate();
  require_runnable(g_curr);
  require_seed(g_curr, r_prev);
  const Vertex n = g_curr.order();
  RankVector ranks = r_prev;
  std::vector<double> scratch_next;
  std::vector<std::uint8_t> scratch_active;
  if (cfg.mode == Mode::synchronous) scratch_next.resize(n);

  auto t0 = Clock::now();
  LoopStats stats = power_loop(g_curr, cfg, ranks.values, nullptr, false,
                               scratch_next, scratch_active);
  double elapsed = seconds_since(t0);
  return finish(std::move(ranks), stats, n, elapsed);
}

RunResult dynamic_traversal_pagerank(const GraphSnapshot& g_prev,
                                     const GraphSnapshot& g_curr,
                                     const BatchUpdate& b,
                                     const RankVector& r_prev,
                                     const EngineConfig& cfg,
                                     AffectedFlags* out_flags) {
  cfg.validate();
  require_runnable(g_curr);
  require_same_order(g_prev, g_curr);
  require_seed(g_curr, r_prev);
  const Vertex n = g_curr.order();
  RankVector ranks = r_prev;
  AffectedFlags flags(n);
  std::vector<std::uint8_t> visited(n, 0);
  std::vector<Vertex> queue;
  queue.reserve(n);
  std::vector<double> scratch_next;
  std::vector<std::uint8_t> scratch_active;
  if (cfg.mode == Mode::synchronous) scratch_next.resize(n);

  auto t0 = Clock::now();
  mark_reachable_into(flags, g_prev, g_curr, b, visited, queue);
  LoopStats stats = power_loop(g_curr, cfg, ranks.values, &flags, false,
                               scratch_next, scratch_active);
  double elapsed = seconds_since(t0);

  std::uint64_t affected = flags.count();
  if (out_flags) *out_flags = std::move(flags);
  return finish(std::move(ranks), stats, affected, elapsed);
}

RunResult dynamic_frontier_pagerank(const GraphSnapshot& g_prev,
                                    const GraphSnapshot& g_curr,
                                    const BatchUpdate& b,
                                    const RankVector& r_prev,
                                    const EngineConfig& cfg,
                                    AffectedFlags* out_flags) {
  cfg.validate();
  require_runnable(g_curr);
  require_same_order(g_prev, g_curr);
  require_seed(g_curr, r_prev);
  const Vertex n = g_curr.order();
  RankVector ranks = r_prev;
  AffectedFlags flags(n);
  std::vector<double> scratch_next;
  std::vector<std::uint8_t> scratch_active;
  if (cfg.mode == Mode::synchronous) {
    scratch_next.resize(n);
    scratch_active.resize(n);
  }

  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  auto t0 = Clock::now();
  mark_initial_into(flags, g_prev, g_curr, b, threads);
  mark_sources_into(flags, b);
  LoopStats stats = power_loop(g_curr, cfg, ranks.values, &flags, true,
                               scratch_next, scratch_active);
  double elapsed = seconds_since(t0);

  std::uint64_t affected = flags.count();
  if (out_flags) *out_flags = std::move(flags);
  return finish(std::move(ranks), stats, affected, elapsed);
}

}  // namespace dynrank
