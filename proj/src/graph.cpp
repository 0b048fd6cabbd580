#include "sccd/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "sccd/errors.hpp"
#include "sccd/rng.hpp"

namespace sccd {
namespace {

bool blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Splits a line into whitespace-separated tokens.
std::vector<std::string_view> tokens_of(const std::string& line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(std::string_view(line).substr(i, j - i));
    i = j;
  }
  return out;
}

Index parse_node_id(std::string_view tok, const std::string& path, Index line) {
  Index v = 0;
  auto [p, ec] = std::from_chars(tok.begin(), tok.end(), v);
  if (ec != std::errc() || p != tok.end() || v < 0)
    throw parse_error(path + ":" + std::to_string(line) +
                      ": expected non-negative node id, got '" +
                      std::string(tok) + "'");
  return v;
}

double parse_real(std::string_view tok, const std::string& path, Index line) {
  std::string buf(tok);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size())
    throw parse_error(path + ":" + std::to_string(line) +
                      ": expected real number, got '" + buf + "'");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

DataGraph build_graph(Index n_nodes, std::vector<std::pair<Index, Index>> pairs,
                      LoadStats* stats) {
  LoadStats local;
  for (auto& [u, v] : pairs) {
    if (u > v) std::swap(u, v);
  }
  std::erase_if(pairs, [&local](const std::pair<Index, Index>& e) {
    if (e.first == e.second) {
      local.self_loops++;
      return true;
    }
    return false;
  });
  std::sort(pairs.begin(), pairs.end());
  auto last = std::unique(pairs.begin(), pairs.end());
  local.duplicate_edges = static_cast<Index>(pairs.end() - last);
  pairs.erase(last, pairs.end());
  if (stats) *stats = local;

  DataGraph g;
  g.n_nodes = n_nodes;
  for (const auto& [u, v] : pairs) {
    if (v >= n_nodes)
      throw dimension_error("edge endpoint " + std::to_string(v) +
                            " out of range for " + std::to_string(n_nodes) +
                            " nodes");
  }
  g.edges = std::move(pairs);

  g.adj.rows = g.adj.cols = n_nodes;
  g.adj.offsets.assign(static_cast<std::size_t>(n_nodes) + 1, 0);
  for (const auto& [u, v] : g.edges) {
    g.adj.offsets[u + 1]++;
    g.adj.offsets[v + 1]++;
  }
  for (Index i = 0; i < n_nodes; ++i) g.adj.offsets[i + 1] += g.adj.offsets[i];
  g.adj.targets.resize(g.edges.size() * 2);
  std::vector<Index> cursor(g.adj.offsets.begin(), g.adj.offsets.end() - 1);
  for (const auto& [u, v] : g.edges) {
    g.adj.targets[cursor[u]++] = v;
    g.adj.targets[cursor[v]++] = u;
  }
  for (Index i = 0; i < n_nodes; ++i)
    std::sort(g.adj.targets.begin() + g.adj.offsets[i],
              g.adj.targets.begin() + g.adj.offsets[i + 1]);
  return g;
}

std::vector<std::pair<Index, Index>> read_edge_pairs(
    const std::string& edge_path) {
  std::ifstream in(edge_path);
  if (!in) throw parse_error("cannot open edge file: " + edge_path);
  std::vector<std::pair<Index, Index>> pairs;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    auto toks = tokens_of(line);
    if (toks.size() != 2)
      throw parse_error(edge_path + ":" + std::to_string(lineno) +
                        ": expected 'u v', got " + std::to_string(toks.size()) +
                        " tokens");
    pairs.emplace_back(parse_node_id(toks[0], edge_path, lineno),
                       parse_node_id(toks[1], edge_path, lineno));
  }
  return pairs;
}

namespace {

void load_attrs(DataGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open attribute file: " + path);
  std::string line;
  Index lineno = 0;
  if (!std::getline(in, line))
    throw parse_error(path + ":1: missing 'N F' header");
  ++lineno;
  auto head = tokens_of(line);
  if (head.size() != 2)
    throw parse_error(path + ":1: expected header 'N F'");
  Index n = parse_node_id(head[0], path, 1);
  Index f = parse_node_id(head[1], path, 1);
  if (n < g.n_nodes)
    throw dimension_error(path + ": attribute rows " + std::to_string(n) +
                          " < required nodes " + std::to_string(g.n_nodes));
  if (n > g.n_nodes) {
    // Attribute header may declare isolated trailing nodes.
    DataGraph grown = build_graph(n, g.edges);
    grown.labels = std::move(g.labels);
    grown.n_communities = g.n_communities;
    g = std::move(grown);
  }
  g.n_attrs = f;
  g.attrs.resize(static_cast<std::size_t>(n) * f);
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw dimension_error(path + ": expected " + std::to_string(n) +
                            " attribute rows, found " + std::to_string(i));
    ++lineno;
    auto toks = tokens_of(line);
    if (static_cast<Index>(toks.size()) != f)
      throw dimension_error(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(f) + " values, got " +
                            std::to_string(toks.size()));
    for (Index j = 0; j < f; ++j)
      g.attrs[i * f + j] = parse_real(toks[j], path, lineno);
  }
}

void load_labels(DataGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open label file: " + path);
  std::string line;
  Index lineno = 0;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank_or_comment(line)) continue;
    auto toks = tokens_of(line);
    if (toks.size() != 1)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected one label per line");
    labels.push_back(static_cast<int>(parse_node_id(toks[0], path, lineno)));
  }
  if (static_cast<Index>(labels.size()) != g.n_nodes)
    throw dimension_error(path + ": " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(g.n_nodes) +
                          " nodes");
  g.labels = std::move(labels);
  int max_label = -1;
  for (int l : g.labels) max_label = std::max(max_label, l);
  g.n_communities = max_label + 1;
}

}  // namespace

DataGraph load_graph(const std::string& edge_path,
                     const std::optional<std::string>& attr_path,
                     const std::optional<std::string>& label_path,
                     LoadStats* stats) {
  auto pairs = read_edge_pairs(edge_path);
  Index max_id = -1;
  for (const auto& [u, v] : pairs) max_id = std::max({max_id, u, v});
  DataGraph g = build_graph(max_id + 1, std::move(pairs), stats);
  if (attr_path) load_attrs(g, *attr_path);
  if (label_path) load_labels(g, *label_path);
  return g;
}

void save_graph(const DataGraph& g, const std::string& edge_path,
                const std::optional<std::string>& attr_path,
                const std::optional<std::string>& label_path) {
  auto out = open_out(edge_path);
  for (const auto& [u, v] : g.edges) out << u << ' ' << v << '\n';
  if (attr_path) {
    if (!g.has_attrs())
      throw config_error("graph has no attributes to save");
    auto aout = open_out(*attr_path);
    aout << g.n_nodes << ' ' << g.n_attrs << '\n';
    char buf[32];
    for (Index i = 0; i < g.n_nodes; ++i) {
      for (Index j = 0; j < g.n_attrs; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", g.attrs[i * g.n_attrs + j]);
        aout << (j ? " " : "") << buf;
      }
      aout << '\n';
    }
  }
  if (label_path) {
    if (!g.has_labels()) throw config_error("graph has no labels to save");
    auto lout = open_out(*label_path);
    for (int l : g.labels) lout << l << '\n';
  }
}

DataGraph adjacency_as_attrs(const DataGraph& g) {
  DataGraph out = g;
  out.n_attrs = g.n_nodes;
  out.attrs.assign(static_cast<std::size_t>(g.n_nodes) * g.n_nodes, 0.0);
  for (const auto& [u, v] : g.edges) {
    out.attrs[u * g.n_nodes + v] = 1.0;
    out.attrs[v * g.n_nodes + u] = 1.0;
  }
  return out;
}

std::vector<std::pair<Index, Index>> remap_node_ids(
    std::span<const std::pair<Index, Index>> pairs,
    std::vector<Index>& old_of_new) {
  old_of_new.clear();
  for (const auto& [u, v] : pairs) {
    old_of_new.push_back(u);
    old_of_new.push_back(v);
  }
  std::sort(old_of_new.begin(), old_of_new.end());
  old_of_new.erase(std::unique(old_of_new.begin(), old_of_new.end()),
                   old_of_new.end());
  std::unordered_map<Index, Index> new_of_old;
  new_of_old.reserve(old_of_new.size());
  for (std::size_t i = 0; i < old_of_new.size(); ++i)
    new_of_old[old_of_new[i]] = static_cast<Index>(i);
  std::vector<std::pair<Index, Index>> out;
  out.reserve(pairs.size());
  for (const auto& [u, v] : pairs)
    out.emplace_back(new_of_old[u], new_of_old[v]);
  return out;
}

std::vector<Index> SplitAssignment::nodes_with(SplitRole r) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < role.size(); ++i)
    if (role[i] == r) out.push_back(static_cast<Index>(i));
  return out;
}

SplitAssignment make_split(const DataGraph& g, std::uint64_t seed) {
  if (!g.has_labels())
    throw config_error("make_split requires labels");
  const Index n = g.n_nodes;
  std::vector<Index> order(n);
  for (Index i = 0; i < n; ++i) order[i] = i;
  Rng rng = named_stream(seed, "split");
  rng.shuffle(order);

  SplitAssignment sp;
  sp.seed = seed;
  sp.role.assign(n, SplitRole::test);
  const Index train_end = 8 * n / 10;
  const Index val_end = 9 * n / 10;
  for (Index i = 0; i < n; ++i) {
    if (i < train_end)
      sp.role[order[i]] = SplitRole::train;
    else if (i < val_end)
      sp.role[order[i]] = SplitRole::val;
  }
  return sp;
}

}  // namespace sccd
