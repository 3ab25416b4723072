#pragma once
// Shared test graphs and conveniences.
#include <initializer_list>
#include <vector>

#include "dynrank/graph.hpp"

namespace fixtures {

// Edges given with 1-based labels, stored 0-based.
inline dynrank::GraphSnapshot from_labels(
    dynrank::Vertex n, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<dynrank::Edge> list;
  for (auto [u, v] : edges)
    list.emplace_back(dynrank::Vertex(u - 1), dynrank::Vertex(v - 1));
  return dynrank::GraphSnapshot::from_edges(n, std::move(list));
}

// 16-vertex, 25-edge digraph whose update (delete 2->1, insert 4->12) drives
// the frontier marking tests. Out-neighborhoods of the vertices involved:
//   1 -> {3, 5}    2 -> {1, 4, 8}   3 -> {4}    4 -> {3}
//   5 -> {6}       8 -> {4}         11 -> {15}  12 -> {11, 14}  14 -> {15}
inline dynrank::GraphSnapshot walkthrough_initial() {
  return from_labels(
      16, {{1, 3},   {1, 5},   {2, 1},  {2, 4},  {2, 8},   {3, 4},  {4, 3},
           {5, 6},   {8, 4},   {11, 15}, {12, 11}, {12, 14}, {14, 15},
           {6, 7},   {6, 2},   {7, 2},  {7, 6},  {9, 2},   {9, 10}, {10, 9},
           {10, 13}, {13, 10}, {13, 16}, {15, 16}, {16, 13}});
}

// Batch for the walk-through, 1-based labels (2,1) deleted and (4,12) added.
inline dynrank::BatchUpdate walkthrough_batch() {
  dynrank::BatchUpdate b;
  b.deletions.emplace_back(1, 0);    // 2 -> 1
  b.insertions.emplace_back(3, 11);  // 4 -> 12
  return b;
}

inline dynrank::GraphSnapshot directed_path(dynrank::Vertex n) {
  std::vector<dynrank::Edge> edges;
  for (dynrank::Vertex v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return dynrank::GraphSnapshot::from_edges(n, std::move(edges));
}

inline dynrank::GraphSnapshot directed_cycle(dynrank::Vertex n) {
  std::vector<dynrank::Edge> edges;
  for (dynrank::Vertex v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
  return dynrank::GraphSnapshot::from_edges(n, std::move(edges));
}

}  // namespace fixtures
