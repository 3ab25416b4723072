#include "dynrank/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <tuple>

#include "dynrank/error.hpp"
#include "dynrank/rng.hpp"
#include "json.hpp"

namespace dynrank {

const char* approach_name(Approach a) {
  switch (a) {
    case Approach::static_full: return "static";
    case Approach::naive: return "naive";
    case Approach::traversal: return "traversal";
    case Approach::frontier: return "frontier";
  }
  return "?";
}

const char* mode_name(Mode m) {
  return m == Mode::synchronous ? "sync" : "async";
}

RankVector reference_ranks(const GraphSnapshot& g, double alpha) {
  EngineConfig cfg;
  cfg.alpha          = alpha;
  cfg.tau            = 1e-100;
  cfg.tau_f          = 1e-100;
  cfg.max_iterations = 500;
  cfg.mode           = Mode::synchronous;
  return static_pagerank(g, cfg).ranks;
}

double l1_error(const RankVector& r, const RankVector& ref) {
  if (r.size() != ref.size())
    throw contract_error("l1_error: length mismatch");
  double sum = 0.0;
  for (std::size_t v = 0; v < r.size(); ++v)
    sum += std::abs(r.values[v] - ref.values[v]);
  return sum;
}

double geometric_mean(const std::vector<double>& xs) {
  if (xs.empty()) throw contract_error("geometric_mean of empty list");
  double log_sum = 0.0;
  for (double x : xs) {
    if (!(x > 0.0))
      throw contract_error("geometric_mean requires positive entries");
    log_sum += std::log(x);
  }
  return std::exp(log_sum / double(xs.size()));
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t cell_seed(std::uint64_t base, std::size_t graph_i,
                        std::size_t fraction_i, int rep) {
  SplitMix64 root(base);
  auto a = root.split(graph_i + 1);
  auto b = a.split(fraction_i + 1);
  auto c = b.split(std::uint64_t(rep) + 1);
  return c.next();
}

std::vector<Mode> expand_modes(ModeSelect sel) {
  switch (sel) {
    case ModeSelect::sync: return {Mode::synchronous};
    case ModeSelect::async: return {Mode::asynchronous};
    case ModeSelect::both: return {Mode::synchronous, Mode::asynchronous};
  }
  return {};
}

RunResult run_approach(Approach a, const GraphSnapshot& g_prev,
                       const GraphSnapshot& g_curr, const BatchUpdate& b,
                       const RankVector& seed_prev, const EngineConfig& cfg) {
  switch (a) {
    case Approach::static_full: return static_pagerank(g_curr, cfg);
    case Approach::naive:
      return naive_dynamic_pagerank(g_curr, seed_prev, cfg);
    case Approach::traversal:
      return dynamic_traversal_pagerank(g_prev, g_curr, b, seed_prev, cfg);
    case Approach::frontier:
      return dynamic_frontier_pagerank(g_prev, g_curr, b, seed_prev, cfg);
  }
  throw contract_error("unknown approach");
}

// Converged previous-snapshot ranks that seed the dynamic approaches.
// Synchronous so the seed is identical for any thread count.
RankVector seed_ranks(const GraphSnapshot& g_prev, const EngineConfig& base) {
  EngineConfig cfg = base;
  cfg.mode = Mode::synchronous;
  return static_pagerank(g_prev, cfg).ranks;
}

void emit(std::vector<ExperimentRecord>& all, ExperimentRecord rec,
          const std::function<void(const ExperimentRecord&)>& on_record) {
  if (on_record) on_record(rec);
  all.push_back(std::move(rec));
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(
    const ExperimentPlan& plan,
    const std::function<void(const ExperimentRecord&)>& on_record) {
  if (plan.fractions.empty())
    throw contract_error("experiment plan needs at least one fraction");
  if (plan.repetitions < 1)
    throw contract_error("repetitions must be at least 1");
  plan.config.validate();

  const std::vector<Mode> modes = expand_modes(plan.modes);

  // Snapshots and previous-graph seeds are shared across cells; compute them
  // once up front.
  std::vector<GraphSnapshot> prev_graphs;
  std::vector<RankVector>    prev_ranks;
  for (const NamedGraph& ng : plan.graphs) {
    prev_graphs.push_back(add_self_loops(ng.graph));
    prev_ranks.push_back(seed_ranks(prev_graphs.back(), plan.config));
  }

  struct Cell {
    std::size_t gi, fi;
    int         rep;
  };
  std::vector<Cell> cells;
  for (std::size_t gi = 0; gi < plan.graphs.size(); ++gi)
    for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi)
      for (int rep = 0; rep < plan.repetitions; ++rep)
        cells.push_back({gi, fi, rep});

  auto run_cell = [&](const Cell& cell) {
    std::vector<ExperimentRecord> group;
    const GraphSnapshot& g_prev = prev_graphs[cell.gi];
    const RankVector&    prev   = prev_ranks[cell.gi];
    const std::uint64_t seed = cell_seed(plan.seed, cell.gi, cell.fi, cell.rep);

    ExperimentRecord proto;
    proto.graph        = plan.graphs[cell.gi].name;
    proto.fraction     = plan.fractions[cell.fi];
    proto.insert_ratio = plan.insert_ratio;
    proto.repetition   = cell.rep;
    proto.threads      = plan.config.threads > 0 ? plan.config.threads
                                                 : omp_get_max_threads();
    proto.seed         = seed;

    try {
      BatchUpdate batch = generate_batch(
          g_prev, {plan.fractions[cell.fi], plan.insert_ratio, seed});
      auto t0 = Clock::now();
      GraphSnapshot g_curr = apply_batch(g_prev, batch, plan.batch_policy);
      double preprocess_s =
          std::chrono::duration<double>(Clock::now() - t0).count();
      RankVector ref = reference_ranks(g_curr, plan.config.alpha);

      for (Approach a : plan.approaches) {
        for (Mode m : modes) {
          ExperimentRecord rec = proto;
          rec.approach     = a;
          rec.mode         = m;
          rec.preprocess_s = preprocess_s;
          try {
            EngineConfig cfg = plan.config;
            cfg.mode = m;
            RunResult r = run_approach(a, g_prev, g_curr, batch, prev, cfg);
            rec.elapsed_s         = r.elapsed;
            rec.iterations        = r.iterations;
            rec.rank_updates      = r.rank_updates;
            rec.affected_final    = r.affected_final;
            rec.affected_fraction =
                double(r.affected_final) / double(g_curr.order());
            rec.l1_error  = l1_error(r.ranks, ref);
            rec.converged = r.converged;
          } catch (const std::exception& e) {
            rec.error = e.what();
          }
          group.push_back(std::move(rec));
        }
      }
    } catch (const std::exception& e) {
      // Batch generation or graph rebuild failed: one marker row for the
      // whole cell group.
      ExperimentRecord rec = proto;
      rec.error = e.what();
      group.push_back(std::move(rec));
    }
    return group;
  };

  std::vector<ExperimentRecord> records;
  if (plan.parallel_cells) {
    // Cells run concurrently; engine-internal parallel regions collapse to
    // one thread inside this loop. Output order stays the grid order, and
    // the callback fires after the loop so consumers never see interleaving.
    std::vector<std::vector<ExperimentRecord>> slots(cells.size());
    const std::int64_t k = std::int64_t(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < k; ++i) slots[i] = run_cell(cells[i]);
    for (auto& group : slots)
      for (auto& rec : group) emit(records, std::move(rec), on_record);
  } else {
    for (const Cell& cell : cells)
      for (auto& rec : run_cell(cell)) emit(records, std::move(rec), on_record);
  }
  return records;
}

std::vector<ExperimentRecord> scaling_sweep(
    const ExperimentPlan& plan,
    const std::function<void(const ExperimentRecord&)>& on_record) {
  if (plan.thread_counts.empty())
    throw contract_error("scaling sweep needs thread counts");
  const double fraction =
      plan.fractions.empty() ? 1e-4 : plan.fractions.front();

  std::vector<ExperimentRecord> records;
  for (std::size_t gi = 0; gi < plan.graphs.size(); ++gi) {
    const GraphSnapshot g_prev = add_self_loops(plan.graphs[gi].graph);
    const RankVector prev = seed_ranks(g_prev, plan.config);
    const std::uint64_t seed = cell_seed(plan.seed, gi, 0, 0);

    BatchUpdate batch =
        generate_batch(g_prev, {fraction, plan.insert_ratio, seed});
    auto t0 = Clock::now();
    GraphSnapshot g_curr = apply_batch(g_prev, batch, plan.batch_policy);
    double preprocess_s =
        std::chrono::duration<double>(Clock::now() - t0).count();
    RankVector ref = reference_ranks(g_curr, plan.config.alpha);

    for (int threads : plan.thread_counts) {
      for (int rep = 0; rep < plan.repetitions; ++rep) {
        ExperimentRecord rec;
        rec.graph        = plan.graphs[gi].name;
        rec.approach     = Approach::frontier;
        rec.fraction     = fraction;
        rec.insert_ratio = plan.insert_ratio;
        rec.repetition   = rep;
        rec.threads      = threads;
        rec.seed         = seed;
        rec.preprocess_s = preprocess_s;
        try {
          EngineConfig cfg = plan.config;
          cfg.threads = threads;
          rec.mode    = cfg.mode;
          RunResult r =
              dynamic_frontier_pagerank(g_prev, g_curr, batch, prev, cfg);
          rec.elapsed_s         = r.elapsed;
          rec.iterations        = r.iterations;
          rec.rank_updates      = r.rank_updates;
          rec.affected_final    = r.affected_final;
          rec.affected_fraction =
              double(r.affected_final) / double(g_curr.order());
          rec.l1_error  = l1_error(r.ranks, ref);
          rec.converged = r.converged;
        } catch (const std::exception& e) {
          rec.error = e.what();
        }
        emit(records, std::move(rec), on_record);
      }
    }
  }
  return records;
}

namespace {

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& os) {
  os << "graph,approach,mode,fraction,insert_ratio,repetition,threads,seed,"
        "elapsed_s,preprocess_s,iterations,rank_updates,affected_final,"
        "affected_fraction,l1_error,converged\n";
}

void write_csv_record(std::ostream& os, const ExperimentRecord& rec) {
  os << rec.graph << ',' << approach_name(rec.approach) << ','
     << mode_name(rec.mode) << ',' << fmt("%g", rec.fraction) << ','
     << fmt("%g", rec.insert_ratio) << ',' << rec.repetition << ','
     << rec.threads << ',' << rec.seed << ','
     << fmt("%.9f", rec.elapsed_s) << ',' << fmt("%.9f", rec.preprocess_s)
     << ',' << rec.iterations << ',' << rec.rank_updates << ','
     << rec.affected_final << ',' << fmt("%.17g", rec.affected_fraction)
     << ',' << fmt("%.17g", rec.l1_error) << ','
     << (rec.converged ? "true" : "false") << '\n';
}

std::vector<ExperimentRecord> summarize(
    const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<Approach, Mode, double>;
  std::map<Key, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records)
    if (r.error.empty())
      groups[{r.approach, r.mode, r.fraction}].push_back(&r);

  auto positive_geomean = [](const std::vector<double>& xs) {
    for (double x : xs)
      if (!(x > 0.0)) return 0.0;
    return geometric_mean(xs);
  };

  std::vector<ExperimentRecord> out;
  for (const auto& [key, rows] : groups) {
    ExperimentRecord s;
    s.graph        = "geomean";
    s.approach     = std::get<0>(key);
    s.mode         = std::get<1>(key);
    s.fraction     = std::get<2>(key);
    s.insert_ratio = rows.front()->insert_ratio;
    s.repetition   = -1;
    s.threads      = rows.front()->threads;
    s.seed         = 0;
    std::vector<double> col;
    auto collect = [&](auto&& get) {
      col.clear();
      for (const auto* r : rows) col.push_back(double(get(*r)));
      return positive_geomean(col);
    };
    s.elapsed_s    = collect([](const auto& r) { return r.elapsed_s; });
    s.preprocess_s = collect([](const auto& r) { return r.preprocess_s; });
    s.iterations =
        int(std::lround(collect([](const auto& r) { return r.iterations; })));
    s.rank_updates = std::uint64_t(
        std::llround(collect([](const auto& r) { return r.rank_updates; })));
    s.affected_final = std::uint64_t(std::llround(
        collect([](const auto& r) { return r.affected_final; })));
    s.affected_fraction =
        collect([](const auto& r) { return r.affected_fraction; });
    s.l1_error = collect([](const auto& r) { return r.l1_error; });
    s.converged = std::all_of(rows.begin(), rows.end(),
                              [](const auto* r) { return r->converged; });
    out.push_back(std::move(s));
  }
  return out;
}

std::string to_json(const std::vector<ExperimentRecord>& records,
                    const ExperimentPlan& plan) {
  nlohmann::json doc;
  nlohmann::json meta;
  meta["alpha"]          = plan.config.alpha;
  meta["tau"]            = plan.config.tau;
  meta["tau_f"]          = plan.config.tau_f;
  meta["max_iterations"] = plan.config.max_iterations;
  meta["chunk_size"]     = plan.config.chunk_size;
  meta["threads"]        = plan.config.threads;
  meta["repetitions"]    = plan.repetitions;
  meta["seed"]           = plan.seed;
  meta["insert_ratio"]   = plan.insert_ratio;
  meta["fractions"]      = plan.fractions;
  meta["rng"]            = SplitMix64::algorithm_name();
  meta["hardware_threads"] = omp_get_max_threads();
  doc["metadata"] = std::move(meta);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json row;
    row["graph"]             = r.graph;
    row["approach"]          = approach_name(r.approach);
    row["mode"]              = mode_name(r.mode);
    row["fraction"]          = r.fraction;
    row["insert_ratio"]      = r.insert_ratio;
    row["repetition"]        = r.repetition;
    row["threads"]           = r.threads;
    row["seed"]              = r.seed;
    row["elapsed_s"]         = r.elapsed_s;
    row["preprocess_s"]      = r.preprocess_s;
    row["iterations"]        = r.iterations;
    row["rank_updates"]      = r.rank_updates;
    row["affected_final"]    = r.affected_final;
    row["affected_fraction"] = r.affected_fraction;
    row["l1_error"]          = r.l1_error;
    row["converged"]         = r.converged;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  doc["records"] = std::move(rows);
  return doc.dump(2);
}

}  // namespace dynrank
