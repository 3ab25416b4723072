#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynrank/batchgen.hpp"
#include "dynrank/engine.hpp"
#include "dynrank/graph.hpp"

namespace dynrank {

enum class Approach { static_full, naive, traversal, frontier };

const char* approach_name(Approach a);
const char* mode_name(Mode m);

// A graph already loaded and normalized, carrying its display name.
struct NamedGraph {
  std::string   name;
  GraphSnapshot graph;  // normalized
};

enum class ModeSelect { sync, async, both };

struct ExperimentPlan {
  std::vector<NamedGraph> graphs;
  std::vector<Approach>   approaches{Approach::static_full, Approach::naive,
                                     Approach::traversal, Approach::frontier};
  ModeSelect              modes = ModeSelect::async;
  std::vector<double>     fractions;
  double                  insert_ratio = 1.0;
  int                     repetitions  = 5;
  std::uint64_t           seed         = 0;
  std::vector<int>        thread_counts;  // scaling sweeps only
  EngineConfig            config;
  BatchPolicy             batch_policy = BatchPolicy::strict;
  // Runs grid cells concurrently. Timings become meaningless; meant for
  // correctness sweeps. Record order stays deterministic either way.
  bool                    parallel_cells = false;
};

// One grid cell. A non-empty `error` marks a failed cell; its metric fields
// are meaningless then.
struct ExperimentRecord {
  std::string   graph;
  Approach      approach = Approach::static_full;
  Mode          mode     = Mode::asynchronous;
  double        fraction = 0.0;
  double        insert_ratio = 1.0;
  int           repetition   = 0;
  int           threads      = 0;
  std::uint64_t seed         = 0;
  double        elapsed_s    = 0.0;
  double        preprocess_s = 0.0;  // apply_batch cost, outside elapsed_s
  int           iterations   = 0;
  std::uint64_t rank_updates = 0;
  std::uint64_t affected_final = 0;
  double        affected_fraction = 0.0;
  double        l1_error     = 0.0;
  bool          converged    = false;
  std::string   error;
};

// Synchronous static run at tau = 1e-100 capped at 500 iterations; in double
// precision this deterministically performs the full 500 sweeps.
RankVector reference_ranks(const GraphSnapshot& g, double alpha = 0.85);

// Sum of absolute per-vertex differences.
double l1_error(const RankVector& r, const RankVector& ref);

// exp(mean(log xs)); rejects empty input and nonpositive entries.
double geometric_mean(const std::vector<double>& xs);

// Runs the full (graph x fraction x repetition x approach x mode) grid:
// builds the previous snapshot, generates and applies the batch, computes
// reference ranks on the updated graph, seeds dynamic approaches with a
// converged run on the previous snapshot, and records metrics per cell.
// Failing cells carry an error marker instead of aborting the sweep.
// on_record, when given, is invoked as each record is produced.
std::vector<ExperimentRecord> run_experiment(
    const ExperimentPlan& plan,
    const std::function<void(const ExperimentRecord&)>& on_record = {});

// Repeats the frontier run on one fixed batch per graph for each requested
// thread count. Speedups are elapsed(threads=1)/elapsed(t) per graph.
std::vector<ExperimentRecord> scaling_sweep(
    const ExperimentPlan& plan,
    const std::function<void(const ExperimentRecord&)>& on_record = {});

// CSV: fixed header
// graph,approach,mode,fraction,insert_ratio,repetition,threads,seed,
// elapsed_s,preprocess_s,iterations,rank_updates,affected_final,
// affected_fraction,l1_error,converged
void write_csv_header(std::ostream& os);
void write_csv_record(std::ostream& os, const ExperimentRecord& rec);

// Geometric-mean rows across graphs, one per (approach, mode, fraction),
// with graph name "geomean". Columns whose cells are not all positive
// aggregate to 0.
std::vector<ExperimentRecord> summarize(
    const std::vector<ExperimentRecord>& records);

// JSON document: {"metadata": {...}, "records": [...]}.
std::string to_json(const std::vector<ExperimentRecord>& records,
                    const ExperimentPlan& plan);

}  // namespace dynrank
