#pragma once
#include "dynrank/engine.hpp"

// Plain single-threaded reference implementations of the four engines.
// Deliberately written as straight loops with no scheduling machinery; the
// test suite cross-checks the OpenMP kernels against these, and the kernel
// benchmark compares their throughput.
namespace dynrank::serial {

RunResult static_pagerank(const GraphSnapshot& g, const EngineConfig& cfg);

RunResult naive_dynamic_pagerank(const GraphSnapshot& g_curr,
                                 const RankVector& r_prev,
                                 const EngineConfig& cfg);

RunResult dynamic_traversal_pagerank(const GraphSnapshot& g_prev,
                                     const GraphSnapshot& g_curr,
                                     const BatchUpdate& b,
                                     const RankVector& r_prev,
                                     const EngineConfig& cfg,
                                     AffectedFlags* out_flags = nullptr);

RunResult dynamic_frontier_pagerank(const GraphSnapshot& g_prev,
                                    const GraphSnapshot& g_curr,
                                    const BatchUpdate& b,
                                    const RankVector& r_prev,
                                    const EngineConfig& cfg,
                                    AffectedFlags* out_flags = nullptr);

}  // namespace dynrank::serial
