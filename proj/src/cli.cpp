#include "dynrank/cli.hpp"

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dynrank/batchgen.hpp"
#include "dynrank/engine.hpp"
#include "dynrank/error.hpp"
#include "dynrank/graph.hpp"
#include "dynrank/harness.hpp"
#include "dynrank/rng.hpp"
#include "json.hpp"

namespace dynrank::cli {

namespace {

struct EngineFlags {
  double                alpha     = 0.85;
  double                tau       = 1e-10;
  std::optional<double> tau_f;
  int                   max_iters = 500;
  int                   chunk     = 2048;
  std::optional<int>    threads;
  std::string           mode      = "async";
  bool                  lenient   = false;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f,
                      bool allow_both_modes = false) {
  cmd->add_option("--alpha", f.alpha, "Damping factor (0, 1)");
  cmd->add_option("--tau", f.tau, "Iteration tolerance (L-inf)");
  cmd->add_option("--tau-f", f.tau_f,
                  "Frontier tolerance (default tau/1e5)");
  cmd->add_option("--max-iters", f.max_iters, "Iteration cap");
  cmd->add_option("--chunk", f.chunk, "Dynamic scheduling chunk size");
  cmd->add_option("--threads", f.threads,
                  "Worker threads (default: DYNRANK_THREADS or all cores)");
  std::vector<std::string> modes = {"sync", "async"};
  if (allow_both_modes) modes.push_back("both");
  cmd->add_option("--mode", f.mode, "Rank storage mode")
      ->check(CLI::IsMember(modes));
  auto* strict = cmd->add_flag("--strict", "Reject invalid batch edges");
  cmd->add_flag("--lenient", f.lenient, "Skip invalid batch edges silently")
      ->excludes(strict);
}

int threads_from_env() {
  if (const char* env = std::getenv("DYNRANK_THREADS")) {
    char* end = nullptr;
    long  v   = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return int(v);
  }
  return 0;
}

EngineConfig make_config(const EngineFlags& f) {
  EngineConfig cfg;
  cfg.alpha          = f.alpha;
  cfg.tau            = f.tau;
  cfg.tau_f          = f.tau_f ? *f.tau_f : f.tau / 1e5;
  cfg.max_iterations = f.max_iters;
  cfg.chunk_size     = f.chunk;
  cfg.mode = f.mode == "sync" ? Mode::synchronous : Mode::asynchronous;
  cfg.threads        = f.threads ? *f.threads : threads_from_env();
  cfg.validate();
  return cfg;
}

BatchPolicy policy_of(const EngineFlags& f) {
  return f.lenient ? BatchPolicy::lenient : BatchPolicy::strict;
}

Approach parse_approach(const std::string& s) {
  if (s == "static") return Approach::static_full;
  if (s == "naive") return Approach::naive;
  if (s == "traversal") return Approach::traversal;
  if (s == "frontier") return Approach::frontier;
  throw contract_error("unknown approach \"" + s + "\"");
}

std::string graph_display_name(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
}

// Either stdout or a file, selected by --out.
class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) throw io_error("cannot write \"" + path + "\"");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

int cmd_stats(const std::string& path, int base, std::ostream& out,
              std::ostream& err) {
  GraphSnapshot g = add_self_loops(load_edge_list(path, base));
  if (g.order() == 0) err << "warning: " << path << " contains no edges\n";
  double davg = g.order() ? double(g.size()) / g.order() : 0.0;
  out << "|V|=" << g.order() << " |E|=" << g.size() << " Davg=" << std::fixed
      << std::setprecision(2) << davg << '\n';
  return 0;
}

nlohmann::json record_json(const ExperimentRecord& r) {
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
  return row;
}

int cmd_run(const std::string& path, int base, const std::string& approach_s,
            double fraction, double insert_ratio, std::uint64_t seed,
            const EngineFlags& flags, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
  EngineConfig cfg  = make_config(flags);
  Approach approach = parse_approach(approach_s);

  GraphSnapshot g_prev = add_self_loops(load_edge_list(path, base));
  BatchUpdate batch = generate_batch(g_prev, {fraction, insert_ratio, seed});

  auto t0 = std::chrono::steady_clock::now();
  GraphSnapshot g_curr = apply_batch(g_prev, batch, policy_of(flags));
  double preprocess_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  RankVector ref = reference_ranks(g_curr, cfg.alpha);
  RankVector seed_ranks;
  if (approach != Approach::static_full) {
    EngineConfig seed_cfg = cfg;
    seed_cfg.mode = Mode::synchronous;
    seed_ranks = static_pagerank(g_prev, seed_cfg).ranks;
  }

  RunResult r;
  switch (approach) {
    case Approach::static_full: r = static_pagerank(g_curr, cfg); break;
    case Approach::naive:
      r = naive_dynamic_pagerank(g_curr, seed_ranks, cfg);
      break;
    case Approach::traversal:
      r = dynamic_traversal_pagerank(g_prev, g_curr, batch, seed_ranks, cfg);
      break;
    case Approach::frontier:
      r = dynamic_frontier_pagerank(g_prev, g_curr, batch, seed_ranks, cfg);
      break;
  }
  if (!r.converged)
    err << "note: did not converge within " << cfg.max_iterations
        << " iterations\n";

  ExperimentRecord rec;
  rec.graph        = graph_display_name(path);
  rec.approach     = approach;
  rec.mode         = cfg.mode;
  rec.fraction     = fraction;
  rec.insert_ratio = insert_ratio;
  rec.repetition   = 0;
  rec.threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
  rec.seed         = seed;
  rec.elapsed_s    = r.elapsed;
  rec.preprocess_s = preprocess_s;
  rec.iterations   = r.iterations;
  rec.rank_updates = r.rank_updates;
  rec.affected_final    = r.affected_final;
  rec.affected_fraction = double(r.affected_final) / double(g_curr.order());
  rec.l1_error          = l1_error(r.ranks, ref);
  rec.converged         = r.converged;

  nlohmann::json row = record_json(rec);
  row["rng"]   = SplitMix64::algorithm_name();
  row["ranks"] = r.ranks.values;
  OutputSink sink(out_path, out);
  sink.stream() << row.dump(2) << '\n';
  return 0;
}

struct BenchArgs {
  std::vector<std::string> graphs;
  int                      base = 0;
  std::vector<double>      fractions;
  std::vector<std::string> approaches = {"static", "naive", "traversal",
                                         "frontier"};
  double        insert_ratio = 1.0;
  int           reps         = 5;
  std::uint64_t seed         = 0;
  std::string   out_path;
  std::string   format         = "csv";
  bool          summary        = false;
  bool          parallel_cells = false;
};

ExperimentPlan make_plan(const BenchArgs& a, const EngineFlags& flags) {
  ExperimentPlan plan;
  for (const auto& path : a.graphs)
    plan.graphs.push_back({graph_display_name(path),
                           add_self_loops(load_edge_list(path, a.base))});
  plan.approaches.clear();
  for (const auto& s : a.approaches)
    plan.approaches.push_back(parse_approach(s));
  plan.fractions    = a.fractions;
  plan.insert_ratio = a.insert_ratio;
  plan.repetitions  = a.reps;
  plan.seed         = a.seed;
  plan.config         = make_config(flags);
  plan.batch_policy   = policy_of(flags);
  plan.parallel_cells = a.parallel_cells;
  if (flags.mode == "both")
    plan.modes = ModeSelect::both;
  else if (flags.mode == "sync")
    plan.modes = ModeSelect::sync;
  else
    plan.modes = ModeSelect::async;
  return plan;
}

int emit_records(const std::vector<ExperimentRecord>& records,
                 const ExperimentPlan& plan, const BenchArgs& args,
                 bool already_streamed, OutputSink& sink, std::ostream& err) {
  if (args.format == "json") {
    nlohmann::json doc = nlohmann::json::parse(to_json(records, plan));
    if (args.summary) {
      nlohmann::json s = nlohmann::json::array();
      for (const auto& rec : summarize(records)) s.push_back(record_json(rec));
      doc["summary"] = std::move(s);
    }
    sink.stream() << doc.dump(2) << '\n';
  } else if (args.summary) {
    for (const auto& rec : summarize(records))
      write_csv_record(sink.stream(), rec);
  }
  sink.stream().flush();

  int failed = 0;
  for (const auto& rec : records)
    if (!rec.error.empty()) {
      ++failed;
      err << "cell failed: " << rec.graph << ' '
          << approach_name(rec.approach) << " fraction=" << rec.fraction
          << " rep=" << rec.repetition << ": " << rec.error << '\n';
    }
  (void)already_streamed;
  return failed == 0 ? 0 : 1;
}

int cmd_bench(const BenchArgs& args, const EngineFlags& flags,
              std::ostream& out, std::ostream& err) {
  ExperimentPlan plan = make_plan(args, flags);
  OutputSink sink(args.out_path, out);

  bool stream_csv = args.format == "csv";
  if (stream_csv) write_csv_header(sink.stream());
  auto on_record = [&](const ExperimentRecord& rec) {
    err << "[" << rec.graph << "] " << approach_name(rec.approach) << '/'
        << mode_name(rec.mode) << " f=" << rec.fraction
        << " rep=" << rec.repetition
        << (rec.error.empty() ? "" : " ERROR") << '\n';
    if (stream_csv) {
      write_csv_record(sink.stream(), rec);
      sink.stream().flush();  // keep partial results on interrupt
    }
  };

  std::vector<ExperimentRecord> records = run_experiment(plan, on_record);
  return emit_records(records, plan, args, stream_csv, sink, err);
}

int cmd_scale(const BenchArgs& args, const EngineFlags& flags,
              std::vector<int> thread_counts, std::ostream& out,
              std::ostream& err) {
  ExperimentPlan plan = make_plan(args, flags);
  plan.approaches = {Approach::frontier};
  if (thread_counts.empty()) {
    int hw = omp_get_max_threads();
    for (int t = 1; t < hw; t *= 2) thread_counts.push_back(t);
    thread_counts.push_back(hw);
  }
  plan.thread_counts = thread_counts;

  OutputSink sink(args.out_path, out);
  bool stream_csv = args.format == "csv";
  if (stream_csv) write_csv_header(sink.stream());
  auto on_record = [&](const ExperimentRecord& rec) {
    err << "[" << rec.graph << "] threads=" << rec.threads
        << " rep=" << rec.repetition << (rec.error.empty() ? "" : " ERROR")
        << '\n';
    if (stream_csv) {
      write_csv_record(sink.stream(), rec);
      sink.stream().flush();
    }
  };

  std::vector<ExperimentRecord> records = scaling_sweep(plan, on_record);

  // Speedup as the ratio of geometric-mean elapsed times vs one thread.
  std::map<int, std::vector<double>> by_threads;
  for (const auto& rec : records)
    if (rec.error.empty() && rec.elapsed_s > 0.0)
      by_threads[rec.threads].push_back(rec.elapsed_s);
  if (by_threads.count(1)) {
    double base = geometric_mean(by_threads.at(1));
    for (const auto& [t, xs] : by_threads)
      err << "threads=" << t << " speedup=" << std::fixed
          << std::setprecision(2) << base / geometric_mean(xs) << "x\n";
  }
  if (args.format == "json")
    return emit_records(records, plan, args, false, sink, err);

  int failed = 0;
  for (const auto& rec : records)
    if (!rec.error.empty()) ++failed;
  return failed == 0 ? 0 : 1;
}

int cmd_gen_batch(const std::string& path, int base, double fraction,
                  double insert_ratio, std::uint64_t seed,
                  const std::string& out_path, std::ostream& out) {
  GraphSnapshot g = add_self_loops(load_edge_list(path, base));
  BatchUpdate batch = generate_batch(g, {fraction, insert_ratio, seed});
  OutputSink sink(out_path, out);
  write_batch(batch, sink.stream());
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Incremental PageRank on dynamic graphs"};
  app.require_subcommand(1);

  std::string graph_path;
  int         base = 0;
  double      fraction     = 0.0;
  double      insert_ratio = 1.0;
  std::uint64_t seed       = 0;
  std::string out_path;
  std::string approach = "frontier";
  EngineFlags run_flags, bench_flags, scale_flags;

  auto* stats = app.add_subcommand("stats", "Print graph size statistics");
  stats->add_option("--graph", graph_path, "Edge-list or MatrixMarket file")
      ->required();
  stats->add_option("--base", base, "Vertex id base for plain edge lists")
      ->check(CLI::IsMember({0, 1}));

  auto* runc = app.add_subcommand("run", "One approach on one batch");
  runc->add_option("--graph", graph_path)->required();
  runc->add_option("--base", base)->check(CLI::IsMember({0, 1}));
  runc->add_option("--approach", approach)
      ->check(CLI::IsMember({"static", "naive", "traversal", "frontier"}));
  runc->add_option("--fraction", fraction, "Batch size as a fraction of |E|");
  runc->add_option("--insert-ratio", insert_ratio,
                   "Insertions share of the batch");
  runc->add_option("--seed", seed);
  runc->add_option("--out", out_path, "Write JSON here instead of stdout");
  add_engine_flags(runc, run_flags);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Full experiment sweep (CSV)");
  bench->add_option("--graph", bench_args.graphs, "Graph file (repeatable)")
      ->required();
  bench->add_option("--base", bench_args.base)->check(CLI::IsMember({0, 1}));
  bench->add_option("--fractions", bench_args.fractions, "Batch fractions")
      ->required()
      ->delimiter(',');
  bench->add_option("--approach", bench_args.approaches, "Approaches to run")
      ->delimiter(',')
      ->check(CLI::IsMember({"static", "naive", "traversal", "frontier"}));
  bench->add_option("--insert-ratio", bench_args.insert_ratio);
  bench->add_option("--reps", bench_args.reps, "Batches per size");
  bench->add_option("--seed", bench_args.seed);
  bench->add_option("--out", bench_args.out_path);
  bench->add_option("--format", bench_args.format)
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--summary", bench_args.summary,
                  "Append geometric-mean rows");
  bench->add_flag("--parallel-cells", bench_args.parallel_cells,
                  "Run grid cells concurrently (timings meaningless)");
  add_engine_flags(bench, bench_flags, true);

  BenchArgs scale_args;
  std::vector<int> scale_threads;
  double scale_fraction = 1e-4;
  auto* scale = app.add_subcommand("scale", "Frontier thread-scaling sweep");
  scale->add_option("--graph", scale_args.graphs)->required();
  scale->add_option("--base", scale_args.base)->check(CLI::IsMember({0, 1}));
  scale->add_option("--fraction", scale_fraction,
                    "Batch size as a fraction of |E|");
  scale->add_option("--insert-ratio", scale_args.insert_ratio);
  scale->add_option("--reps", scale_args.reps);
  scale->add_option("--seed", scale_args.seed);
  scale->add_option("--threads", scale_threads,
                    "Thread counts (default powers of two up to all cores)")
      ->delimiter(',');
  scale->add_option("--out", scale_args.out_path);
  scale->add_option("--format", scale_args.format)
      ->check(CLI::IsMember({"csv", "json"}));
  scale->add_option("--alpha", scale_flags.alpha);
  scale->add_option("--tau", scale_flags.tau);
  scale->add_option("--tau-f", scale_flags.tau_f);
  scale->add_option("--max-iters", scale_flags.max_iters);
  scale->add_option("--chunk", scale_flags.chunk);
  scale->add_option("--mode", scale_flags.mode)
      ->check(CLI::IsMember({"sync", "async"}));

  auto* gen = app.add_subcommand("gen-batch", "Emit a reproducible batch");
  gen->add_option("--graph", graph_path)->required();
  gen->add_option("--base", base)->check(CLI::IsMember({0, 1}));
  gen->add_option("--fraction", fraction)->required();
  gen->add_option("--insert-ratio", insert_ratio);
  gen->add_option("--seed", seed);
  gen->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (stats->parsed()) return cmd_stats(graph_path, base, out, err);
    if (runc->parsed())
      return cmd_run(graph_path, base, approach, fraction, insert_ratio, seed,
                     run_flags, out_path, out, err);
    if (bench->parsed()) return cmd_bench(bench_args, bench_flags, out, err);
    if (scale->parsed()) {
      scale_args.fractions = {scale_fraction};
      return cmd_scale(scale_args, scale_flags, scale_threads, out, err);
    }
    if (gen->parsed())
      return cmd_gen_batch(graph_path, base, fraction, insert_ratio, seed,
                           out_path, out);
  } catch (const contract_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace dynrank::cli
