#include <algorithm>
#include <set>

#include "doctest.h"
#include "dynrank/batchgen.hpp"
#include "dynrank/error.hpp"
#include "dynrank/graph.hpp"
#include "fixtures.hpp"

using namespace dynrank;

TEST_CASE("zero fraction yields an empty batch") {
  GraphSnapshot g = add_self_loops(random_graph(50, 200, 1));
  BatchUpdate b = generate_batch(g, {0.0, 0.8, 42});
  CHECK(b.empty());
}

TEST_CASE("batch sizes follow the fraction and the insert ratio") {
  // 200 vertices + 800 random edges -> m = 1000 after self-loops.
  GraphSnapshot g = add_self_loops(random_graph(200, 800, 2));
  REQUIRE(g.size() == 1000);
  BatchUpdate b = generate_batch(g, {0.01, 0.8, 7});
  CHECK(b.insertions.size() == 8);
  CHECK(b.deletions.size() == 2);

  SUBCASE("insertions-only and deletions-only splits") {
    CHECK(generate_batch(g, {0.01, 1.0, 7}).insertions.size() == 10);
    CHECK(generate_batch(g, {0.01, 0.0, 7}).deletions.size() == 10);
  }

  SUBCASE("a tiny nonzero fraction still produces one edge") {
    BatchUpdate tiny = generate_batch(g, {1e-9, 1.0, 7});
    CHECK(tiny.insertions.size() + tiny.deletions.size() == 1);
  }
}

TEST_CASE("identical spec reproduces the identical batch") {
  GraphSnapshot g = add_self_loops(random_graph(100, 400, 3));
  BatchSpec spec{0.02, 0.8, 90210};
  BatchUpdate a = generate_batch(g, spec);
  BatchUpdate b = generate_batch(g, spec);
  CHECK(a.deletions == b.deletions);
  CHECK(a.insertions == b.insertions);
  CHECK_FALSE(a.empty());
}

TEST_CASE("generated batches satisfy the strict apply contract") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GraphSnapshot g = add_self_loops(random_graph(80, 320, seed));
    BatchUpdate b = generate_batch(g, {0.05, 0.8, seed * 1337});
    for (const auto& [u, v] : b.insertions) {
      CHECK_FALSE(g.has_edge(u, v));
      CHECK(u != v);
    }
    for (const auto& [u, v] : b.deletions) {
      CHECK(g.has_edge(u, v));
      CHECK(u != v);
    }
    // Distinctness within each list.
    auto ins = b.insertions;
    std::sort(ins.begin(), ins.end());
    CHECK(std::adjacent_find(ins.begin(), ins.end()) == ins.end());
    auto del = b.deletions;
    std::sort(del.begin(), del.end());
    CHECK(std::adjacent_find(del.begin(), del.end()) == del.end());

    CHECK_NOTHROW(apply_batch(g, b));
  }
}

TEST_CASE("deleting more edges than exist is a contract error") {
  GraphSnapshot g = add_self_loops(fixtures::directed_path(3));  // 2 non-loops
  CHECK_THROWS_AS(generate_batch(g, {1.0, 0.0, 1}), contract_error);
}

TEST_CASE("a full graph cannot take insertions") {
  // Complete digraph on 4 vertices: every non-loop pair present.
  std::vector<Edge> edges;
  for (Vertex u = 0; u < 4; ++u)
    for (Vertex v = 0; v < 4; ++v)
      if (u != v) edges.emplace_back(u, v);
  GraphSnapshot g = add_self_loops(GraphSnapshot::from_edges(4, edges));
  CHECK_THROWS_AS(generate_batch(g, {0.3, 1.0, 5}), generation_error);
}

TEST_CASE("spec bounds are validated") {
  GraphSnapshot g = add_self_loops(fixtures::directed_cycle(4));
  CHECK_THROWS_AS(generate_batch(g, {-0.1, 0.5, 1}), contract_error);
  CHECK_THROWS_AS(generate_batch(g, {0.1, 1.5, 1}), contract_error);
  CHECK_THROWS_AS(generate_batch(fixtures::directed_cycle(4), {0.1, 1.0, 1}),
                  contract_error);  // not normalized
}

TEST_CASE("random_graph is reproducible and simple") {
  GraphSnapshot a = random_graph(60, 300, 77);
  GraphSnapshot b = random_graph(60, 300, 77);
  CHECK(a == b);
  CHECK(a.size() == 300);
  for (Vertex v = 0; v < a.order(); ++v) CHECK_FALSE(a.has_edge(v, v));
  CHECK_THROWS_AS(random_graph(3, 100, 1), contract_error);
}
