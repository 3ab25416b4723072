#include "dynrank/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "dynrank/error.hpp"

namespace dynrank {

namespace {

void sort_unique(std::vector<Edge>& edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

GraphSnapshot GraphSnapshot::from_edges(Vertex n, std::vector<Edge> edges) {
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n)
      throw contract_error("edge (" + std::to_string(u) + ", " +
                           std::to_string(v) + ") exceeds vertex count " +
                           std::to_string(n));
  }
  sort_unique(edges);

  GraphSnapshot g;
  g.n_ = n;
  g.m_ = edges.size();
  g.out_offsets_.assign(n + 1, 0);
  g.in_offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++g.out_offsets_[u + 1];
    ++g.in_offsets_[v + 1];
  }
  for (Vertex i = 0; i < n; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }
  g.out_targets_.resize(edges.size());
  g.in_targets_.resize(edges.size());
  std::vector<std::uint64_t> cursor(g.in_offsets_.begin(),
                                    g.in_offsets_.end() - 1);
  std::uint64_t k = 0;
  for (const auto& [u, v] : edges) {
    g.out_targets_[k++] = v;          // edges sorted by (u, v): CSR order
    g.in_targets_[cursor[v]++] = u;   // sources arrive in ascending order
  }
  return g;
}

bool GraphSnapshot::has_edge(Vertex u, Vertex v) const {
  if (u >= n_ || v >= n_) return false;
  auto nbrs = out_neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

bool GraphSnapshot::is_normalized() const {
  for (Vertex v = 0; v < n_; ++v)
    if (!has_self_loop(v)) return false;
  return true;
}

std::vector<Edge> GraphSnapshot::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (Vertex u = 0; u < n_; ++u)
    for (Vertex v : out_neighbors(u)) out.emplace_back(u, v);
  return out;
}

namespace {

// One "u v" pair with 1-based line numbers in error messages.
Edge parse_pair(std::string_view line, const std::string& path, size_t lineno,
                long long base, Vertex* max_id, bool allow_extra) {
  long long ids[2];
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (int i = 0; i < 2; ++i) {
    while (p != end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    auto [next, ec] = std::from_chars(p, end, ids[i]);
    if (ec != std::errc() || next == p)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected two integers, got \"" +
                        std::string(line) + "\"");
    p = next;
  }
  while (p != end && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (p != end && !allow_extra)
    throw parse_error(path + ":" + std::to_string(lineno) +
                      ": trailing content after edge: \"" + std::string(line) +
                      "\"");
  if (ids[0] < base || ids[1] < base)
    throw parse_error(path + ":" + std::to_string(lineno) + ": vertex id below base " +
                      std::to_string(base));
  Vertex u = Vertex(ids[0] - base);
  Vertex v = Vertex(ids[1] - base);
  *max_id = std::max(*max_id, std::max(u, v));
  return {u, v};
}

GraphSnapshot load_matrix_market(std::ifstream& in, const std::string& path,
                                 const std::string& banner) {
  std::istringstream hdr(banner);
  std::string tag, object, format, field, symmetry;
  hdr >> tag >> object >> format >> field >> symmetry;
  if (object != "matrix" || format != "coordinate")
    throw parse_error(path + ":1: unsupported MatrixMarket header \"" + banner +
                      "\" (need matrix coordinate)");
  bool symmetric = symmetry == "symmetric" || symmetry == "skew-symmetric";
  bool has_value = field != "pattern";

  std::string line;
  size_t lineno = 1;
  long long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream dims(line);
    if (!(dims >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": malformed MatrixMarket size line");
    break;
  }
  if (rows < 0)
    throw parse_error(path + ": missing MatrixMarket size line");

  Vertex n = Vertex(std::max(rows, cols));
  std::vector<Edge> edges;
  edges.reserve(size_t(nnz) * (symmetric ? 2 : 1));
  long long seen = 0;
  Vertex max_id = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    Edge e = parse_pair(line, path, lineno, 1, &max_id, has_value);
    if (e.first >= n || e.second >= n)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": entry exceeds declared dimensions");
    edges.push_back(e);
    if (symmetric && e.first != e.second)
      edges.emplace_back(e.second, e.first);
    ++seen;
  }
  if (seen != nnz)
    throw parse_error(path + ": expected " + std::to_string(nnz) +
                      " entries, found " + std::to_string(seen));
  return GraphSnapshot::from_edges(n, std::move(edges));
}

}  // namespace

GraphSnapshot load_edge_list(const std::string& path, int base) {
  if (base != 0 && base != 1)
    throw contract_error("base must be 0 or 1");
  std::ifstream in(path);
  if (!in) throw io_error("cannot open \"" + path + "\"");

  std::string line;
  size_t lineno = 0;
  std::vector<Edge> edges;
  Vertex max_id = 0;
  bool any_edge = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("%%MatrixMarket", 0) == 0)
      return load_matrix_market(in, path, line);
    std::string_view sv(line);
    size_t first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    if (sv[first] == '#' || sv[first] == '%') continue;
    edges.push_back(parse_pair(sv, path, lineno, base, &max_id, false));
    any_edge = true;
  }
  Vertex n = any_edge ? max_id + 1 : 0;
  return GraphSnapshot::from_edges(n, std::move(edges));
}

GraphSnapshot add_self_loops(const GraphSnapshot& g) {
  std::vector<Edge> edges = g.edges();
  for (Vertex v = 0; v < g.order(); ++v)
    if (!g.has_self_loop(v)) edges.emplace_back(v, v);
  return GraphSnapshot::from_edges(g.order(), std::move(edges));
}

GraphSnapshot apply_batch(const GraphSnapshot& g_prev, const BatchUpdate& b,
                          BatchPolicy policy) {
  const Vertex n = g_prev.order();
  const bool strict = policy == BatchPolicy::strict;

  auto check = [&](bool ok, const Edge& e, const char* what) {
    if (ok || !strict) return ok;
    throw contract_error(std::string(what) + ": (" + std::to_string(e.first) +
                         ", " + std::to_string(e.second) + ")");
  };

  std::vector<Edge> deletions, insertions;
  deletions.reserve(b.deletions.size());
  insertions.reserve(b.insertions.size());
  for (const Edge& e : b.deletions) {
    if (!check(e.first < n && e.second < n, e, "deletion id out of range"))
      continue;
    if (!check(e.first != e.second, e, "self-loops cannot be deleted"))
      continue;
    if (!check(g_prev.has_edge(e.first, e.second), e,
               "deleting a missing edge"))
      continue;
    deletions.push_back(e);
  }
  for (const Edge& e : b.insertions) {
    if (!check(e.first < n && e.second < n, e, "insertion id out of range"))
      continue;
    if (!check(!g_prev.has_edge(e.first, e.second), e,
               "inserting an existing edge"))
      continue;
    insertions.push_back(e);
  }

  auto reject_duplicates = [&](std::vector<Edge>& v, const char* what) {
    std::sort(v.begin(), v.end());
    auto dup = std::adjacent_find(v.begin(), v.end());
    if (dup != v.end()) {
      if (strict)
        throw contract_error(std::string(what) + " duplicated in batch: (" +
                             std::to_string(dup->first) + ", " +
                             std::to_string(dup->second) + ")");
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
  };
  reject_duplicates(deletions, "deletion");
  reject_duplicates(insertions, "insertion");

  std::vector<Edge> edges = g_prev.edges();
  std::vector<Edge> kept;
  kept.reserve(edges.size() + insertions.size());
  std::set_difference(edges.begin(), edges.end(), deletions.begin(),
                      deletions.end(), std::back_inserter(kept));
  kept.insert(kept.end(), insertions.begin(), insertions.end());
  GraphSnapshot next = GraphSnapshot::from_edges(n, std::move(kept));
  return add_self_loops(next);
}

void write_batch(const BatchUpdate& b, std::ostream& os) {
  for (const auto& [u, v] : b.deletions) os << "- " << u << ' ' << v << '\n';
  for (const auto& [u, v] : b.insertions) os << "+ " << u << ' ' << v << '\n';
}

void write_batch(const BatchUpdate& b, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write \"" + path + "\"");
  write_batch(b, out);
  if (!out) throw io_error("write failed for \"" + path + "\"");
}

}  // namespace dynrank
