#include "dynrank/serial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "dynrank/error.hpp"

// Straight-line re-implementations of the engines, one vertex at a time in
// ascending id order. No scheduling, no reductions; the arithmetic per
// vertex is the same, so synchronous results match the OpenMP kernels
// bit-for-bit and asynchronous ones match them at threads == 1.
namespace dynrank::serial {

namespace {

using Clock = std::chrono::steady_clock;

double vertex_rank(Vertex v, const GraphSnapshot& g,
                   const std::vector<double>& r, double alpha) {
  double acc = 0.0;
  for (Vertex u : g.in_neighbors(v)) acc += r[u] / g.out_degree(u);
  return (1.0 - alpha) / g.order() + alpha * acc;
}

void check_inputs(const GraphSnapshot& g, const EngineConfig& cfg,
                  const RankVector* seed) {
  cfg.validate();
  if (g.order() == 0) throw contract_error("empty graph");
  for (Vertex v = 0; v < g.order(); ++v)
    if (g.out_degree(v) == 0) throw contract_error("graph has a dead end");
  if (seed && seed->size() != g.order())
    throw contract_error("seed length mismatch");
}

struct SweepOutcome {
  int           iterations = 0;
  std::uint64_t updates    = 0;
  bool          converged  = false;
};

SweepOutcome iterate(const GraphSnapshot& g, const EngineConfig& cfg,
                     std::vector<double>& ranks, AffectedFlags* flags,
                     bool marking) {
  const Vertex n = g.order();
  SweepOutcome out;

  if (cfg.mode == Mode::asynchronous) {
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
      double delta_max = 0.0;
      for (Vertex v = 0; v < n; ++v) {
        if (flags && !flags->is_set(v)) continue;
        double nr = vertex_rank(v, g, ranks, cfg.alpha);
        double dr = std::abs(nr - ranks[v]);
        ranks[v] = nr;
        ++out.updates;
        delta_max = std::max(delta_max, dr);
        if (marking && dr > cfg.tau_f)
          for (Vertex w : g.out_neighbors(v))
            if (w != v) flags->flags[w] = 1;
      }
      out.iterations = iter;
      if (delta_max <= cfg.tau) {
        out.converged = true;
        break;
      }
    }
    return out;
  }

  std::vector<double> curr = ranks;
  std::vector<double> next(n);
  std::vector<std::uint8_t> active;
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    if (flags) {
      next = curr;
      active = flags->flags;
    }
    double delta_max = 0.0;
    for (Vertex v = 0; v < n; ++v) {
      if (flags && !active[v]) continue;
      double nr = vertex_rank(v, g, curr, cfg.alpha);
      double dr = std::abs(nr - curr[v]);
      next[v] = nr;
      ++out.updates;
      delta_max = std::max(delta_max, dr);
      if (marking && dr > cfg.tau_f)
        for (Vertex w : g.out_neighbors(v))
          if (w != v) flags->flags[w] = 1;
    }
    std::swap(curr, next);
    out.iterations = iter;
    if (delta_max <= cfg.tau) {
      out.converged = true;
      break;
    }
  }
  ranks = curr;
  return out;
}

RunResult package(std::vector<double>&& ranks, const SweepOutcome& out,
                  std::uint64_t affected, double elapsed) {
  RunResult res;
  res.ranks.values   = std::move(ranks);
  res.iterations     = out.iterations;
  res.rank_updates   = out.updates;
  res.affected_final = affected;
  res.elapsed        = elapsed;
  res.converged      = out.converged;
  return res;
}

}  // namespace

RunResult static_pagerank(const GraphSnapshot& g, const EngineConfig& cfg) {
  check_inputs(g, cfg, nullptr);
  std::vector<double> ranks(g.order(), 1.0 / g.order());
  auto t0 = Clock::now();
  SweepOutcome out = iterate(g, cfg, ranks, nullptr, false);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return package(std::move(ranks), out, g.order(), secs);
}

RunResult naive_dynamic_pagerank(const GraphSnapshot& g_curr,
                                 const RankVector& r_prev,
                                 const EngineConfig& cfg) {
  check_inputs(g_curr, cfg, &r_prev);
  std::vector<double> ranks = r_prev.values;
  auto t0 = Clock::now();
  SweepOutcome out = iterate(g_curr, cfg, ranks, nullptr, false);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return package(std::move(ranks), out, g_curr.order(), secs);
}

RunResult dynamic_traversal_pagerank(const GraphSnapshot& g_prev,
                                     const GraphSnapshot& g_curr,
                                     const BatchUpdate& b,
                                     const RankVector& r_prev,
                                     const EngineConfig& cfg,
                                     AffectedFlags* out_flags) {
  check_inputs(g_curr, cfg, &r_prev);
  if (g_prev.order() != g_curr.order())
    throw contract_error("snapshots disagree on vertex count");
  std::vector<double> ranks = r_prev.values;
  auto t0 = Clock::now();
  AffectedFlags flags = mark_reachable(g_prev, g_curr, b);
  SweepOutcome out = iterate(g_curr, cfg, ranks, &flags, false);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::uint64_t affected = flags.count();
  if (out_flags) *out_flags = std::move(flags);
  return package(std::move(ranks), out, affected, secs);
}

RunResult dynamic_frontier_pagerank(const GraphSnapshot& g_prev,
                                    const GraphSnapshot& g_curr,
                                    const BatchUpdate& b,
                                    const RankVector& r_prev,
                                    const EngineConfig& cfg,
                                    AffectedFlags* out_flags) {
  check_inputs(g_curr, cfg, &r_prev);
  if (g_prev.order() != g_curr.order())
    throw contract_error("snapshots disagree on vertex count");
  std::vector<double> ranks = r_prev.values;
  auto t0 = Clock::now();
  AffectedFlags flags = mark_initial_affected(g_prev, g_curr, b);
  // Sources rejoin the frontier: their out-degree change moves their own
  // rank through the self-loop term.
  for (const Edge& e : b.deletions) flags.flags[e.first] = 1;
  for (const Edge& e : b.insertions) flags.flags[e.first] = 1;
  SweepOutcome out = iterate(g_curr, cfg, ranks, &flags, true);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::uint64_t affected = flags.count();
  if (out_flags) *out_flags = std::move(flags);
  return package(std::move(ranks), out, affected, secs);
}

}  // namespace dynrank::serial
