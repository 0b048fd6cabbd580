#include "sccd/mining.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "sccd/errors.hpp"

namespace sccd {
namespace {

// Intersection size of two sorted ranges. Galloping variant kicks in when one
// list is much shorter, keeping the work near O(min(du, dv)) per edge.
Index intersect_count(std::span<const Index> a, std::span<const Index> b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return 0;
  Index count = 0;
  if (b.size() >= 8 * a.size()) {
    auto lo = b.begin();
    for (Index x : a) {
      lo = std::lower_bound(lo, b.end(), x);
      if (lo == b.end()) break;
      if (*lo == x) ++count;
    }
    return count;
  }
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (a[i] > b[j])
      ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

}  // namespace

Index edge_index(const DataGraph& g, Index u, Index v) {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(g.edges.begin(), g.edges.end(),
                             std::make_pair(u, v));
  if (it == g.edges.end() || *it != std::make_pair(u, v)) return -1;
  return static_cast<Index>(it - g.edges.begin());
}

std::vector<Index> count_edge_triangles_serial(const DataGraph& g) {
  std::vector<Index> support(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& [u, v] = g.edges[e];
    auto nu = g.neighbors(u);
    auto nv = g.neighbors(v);
    Index count = 0;
    std::size_t i = 0, j = 0;
    while (i < nu.size() && j < nv.size()) {
      if (nu[i] < nv[j])
        ++i;
      else if (nu[i] > nv[j])
        ++j;
      else {
        ++count;
        ++i;
        ++j;
      }
    }
    support[e] = count;
  }
  return support;
}

std::vector<Index> count_edge_triangles(const DataGraph& g) {
  const Index m = g.n_edges();
  std::vector<Index> support(m);
#pragma omp parallel for schedule(dynamic, 64) if (m > 256)
  for (Index e = 0; e < m; ++e) {
    const auto& [u, v] = g.edges[e];
    support[e] = intersect_count(g.neighbors(u), g.neighbors(v));
  }
  return support;
}

std::vector<Index> core_decomposition(const DataGraph& g) {
  const Index n = g.n_nodes;
  std::vector<Index> core(n), pos(n), vert(n);
  Index max_deg = 0;
  for (Index v = 0; v < n; ++v) {
    core[v] = g.degree(v);
    max_deg = std::max(max_deg, core[v]);
  }

  // Bin-sort peeling: process nodes in non-decreasing current degree,
  // decrementing surviving neighbors.
  std::vector<Index> bin(max_deg + 2, 0);
  for (Index v = 0; v < n; ++v) bin[core[v] + 1]++;
  for (Index d = 0; d <= max_deg; ++d) bin[d + 1] += bin[d];
  std::vector<Index> start(bin.begin(), bin.end() - 1);
  for (Index v = 0; v < n; ++v) {
    pos[v] = start[core[v]]++;
    vert[pos[v]] = v;
  }

  for (Index i = 0; i < n; ++i) {
    const Index v = vert[i];
    for (Index u : g.neighbors(v)) {
      if (core[u] > core[v]) {
        // Move u to the front of its bin, then shrink its degree.
        const Index du = core[u];
        const Index pu = pos[u];
        const Index pw = bin[du];
        const Index w = vert[pw];
        if (u != w) {
          std::swap(vert[pu], vert[pw]);
          pos[u] = pw;
          pos[w] = pu;
        }
        bin[du]++;
        core[u]--;
      }
    }
  }
  return core;
}

std::vector<Index> truss_decomposition(const DataGraph& g) {
  const Index m = g.n_edges();
  std::vector<Index> support = count_edge_triangles(g);
  std::vector<Index> truss(m, 2);
  if (m == 0) return truss;

  // Bin-sort peeling over edges by current support, mirroring the k-core
  // routine. Removing the minimum-support edge at level k assigns truss k+2
  // (clamped monotone), then decrements the two companion edges of every
  // still-alive triangle through it.
  Index max_sup = 0;
  for (Index s : support) max_sup = std::max(max_sup, s);
  std::vector<Index> bin(max_sup + 2, 0), pos(m), edge_at(m);
  for (Index e = 0; e < m; ++e) bin[support[e] + 1]++;
  for (Index s = 0; s <= max_sup; ++s) bin[s + 1] += bin[s];
  std::vector<Index> start(bin.begin(), bin.end() - 1);
  for (Index e = 0; e < m; ++e) {
    pos[e] = start[support[e]]++;
    edge_at[pos[e]] = e;
  }

  std::vector<char> alive(m, 1);
  auto reduce_support = [&](Index e, Index floor_sup) {
    if (support[e] <= floor_sup) return;
    const Index s = support[e];
    const Index p = pos[e];
    const Index pw = bin[s];
    const Index w = edge_at[pw];
    if (e != w) {
      std::swap(edge_at[p], edge_at[pw]);
      pos[e] = pw;
      pos[w] = p;
    }
    bin[s]++;
    support[e]--;
  };

  Index level = 0;  // current support floor
  for (Index i = 0; i < m; ++i) {
    const Index e = edge_at[i];
    level = std::max(level, support[e]);
    truss[e] = level + 2;
    alive[e] = 0;

    const auto& [u, v] = g.edges[e];
    auto nu = g.neighbors(u);
    auto nv = g.neighbors(v);
    std::size_t a = 0, b = 0;
    while (a < nu.size() && b < nv.size()) {
      if (nu[a] < nv[b])
        ++a;
      else if (nu[a] > nv[b])
        ++b;
      else {
        const Index w = nu[a];
        const Index e1 = edge_index(g, u, w);
        const Index e2 = edge_index(g, v, w);
        if (alive[e1] && alive[e2]) {
          reduce_support(e1, level);
          reduce_support(e2, level);
        }
        ++a;
        ++b;
      }
    }
  }
  return truss;
}

PatternSet PatternSet::parse(const std::string& text) {
  PatternSet ps;
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw config_error("pattern set '" + text + "': " + what);
  };
  while (i < text.size()) {
    std::size_t j = text.find(',', i);
    if (j == std::string::npos) j = text.size();
    std::string item = text.substr(i, j - i);
    // trim
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front())))
      item.erase(item.begin());
    while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back())))
      item.pop_back();
    if (!item.empty()) {
      if (item == "triangle") {
        ps.patterns.push_back({PatternKind::triangle, 0});
      } else {
        PatternKind kind;
        std::string prefix;
        if (item.rfind("k-core(", 0) == 0) {
          kind = PatternKind::k_core;
          prefix = "k-core(";
        } else if (item.rfind("k-truss(", 0) == 0) {
          kind = PatternKind::k_truss;
          prefix = "k-truss(";
        } else if (item.rfind("k-plex", 0) == 0) {
          fail("k-plex is not supported");
          return ps;
        } else {
          fail("unknown pattern '" + item + "'");
          return ps;
        }
        if (item.back() != ')') fail("missing ')' in '" + item + "'");
        const std::string num = item.substr(prefix.size(),
                                            item.size() - prefix.size() - 1);
        int k = 0;
        try {
          std::size_t used = 0;
          k = std::stoi(num, &used);
          if (used != num.size()) throw std::invalid_argument(num);
        } catch (const std::exception&) {
          fail("bad parameter '" + num + "'");
        }
        if (k < 1) fail("parameter must be >= 1 in '" + item + "'");
        ps.patterns.push_back({kind, k});
      }
    }
    i = j + 1;
  }
  if (ps.patterns.empty()) fail("pattern list is empty");
  return ps;
}

std::string PatternSet::to_string() const {
  std::string out;
  for (const auto& p : patterns) {
    if (!out.empty()) out += ",";
    switch (p.kind) {
      case PatternKind::triangle: out += "triangle"; break;
      case PatternKind::k_core: out += "k-core(" + std::to_string(p.k) + ")"; break;
      case PatternKind::k_truss: out += "k-truss(" + std::to_string(p.k) + ")"; break;
    }
  }
  return out;
}

std::vector<Index> count_patterns(const DataGraph& g, const PatternSet& ps) {
  if (ps.patterns.empty()) throw config_error("pattern set is empty");
  const Index m = g.n_edges();
  std::vector<Index> dic(m, 0);
  std::vector<Index> triangles, cores, trusses;
  for (const auto& p : ps.patterns) {
    switch (p.kind) {
      case PatternKind::triangle: {
        if (triangles.empty()) triangles = count_edge_triangles(g);
        for (Index e = 0; e < m; ++e) dic[e] += triangles[e];
        break;
      }
      case PatternKind::k_core: {
        if (cores.empty()) cores = core_decomposition(g);
        for (Index e = 0; e < m; ++e) {
          const auto& [u, v] = g.edges[e];
          if (std::min(cores[u], cores[v]) >= p.k) dic[e] += 1;
        }
        break;
      }
      case PatternKind::k_truss: {
        if (trusses.empty()) trusses = truss_decomposition(g);
        for (Index e = 0; e < m; ++e)
          if (trusses[e] >= p.k) dic[e] += 1;
        break;
      }
    }
  }
  return dic;
}

namespace {

// Assembles the sparse similarity matrix: one entry per adjacency slot plus
// the unit diagonal, rows sorted by construction.
Csr build_sim(const DataGraph& g, const std::vector<Index>& dic,
              Index max_count) {
  const Index n = g.n_nodes;
  const double denom = static_cast<double>(max_count) + 1.0;
  Csr sim;
  sim.rows = sim.cols = n;
  sim.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index v = 0; v < n; ++v)
    sim.offsets[v + 1] = sim.offsets[v] + g.degree(v) + 1;
  sim.targets.resize(sim.offsets[n]);
  sim.values.resize(sim.offsets[n]);

  for (Index v = 0; v < n; ++v) {
    Index w = sim.offsets[v];
    bool diag_done = false;
    for (Index k = g.adj.offsets[v]; k < g.adj.offsets[v + 1]; ++k) {
      const Index u = g.adj.targets[k];
      if (!diag_done && u > v) {
        sim.targets[w] = v;
        sim.values[w] = 1.0;
        ++w;
        diag_done = true;
      }
      const Index e = edge_index(g, v, u);
      sim.targets[w] = u;
      sim.values[w] = (static_cast<double>(dic[e]) + 1.0) / denom;
      ++w;
    }
    if (!diag_done) {
      sim.targets[w] = v;
      sim.values[w] = 1.0;
      ++w;
    }
  }
  return sim;
}

Csr build_high_adj(const DataGraph& g, const std::vector<Index>& dic) {
  const Index n = g.n_nodes;
  Csr high;
  high.rows = high.cols = n;
  high.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (dic[e] > 0) {
      high.offsets[g.edges[e].first + 1]++;
      high.offsets[g.edges[e].second + 1]++;
    }
  }
  for (Index v = 0; v < n; ++v) high.offsets[v + 1] += high.offsets[v];
  high.targets.resize(high.offsets[n]);
  std::vector<Index> cursor(high.offsets.begin(), high.offsets.end() - 1);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (dic[e] > 0) {
      const auto& [u, v] = g.edges[e];
      high.targets[cursor[u]++] = v;
      high.targets[cursor[v]++] = u;
    }
  }
  for (Index v = 0; v < n; ++v)
    std::sort(high.targets.begin() + high.offsets[v],
              high.targets.begin() + high.offsets[v + 1]);
  return high;
}

}  // namespace

StructureView build_structure_view(const DataGraph& g, const PatternSet& ps) {
  StructureView view;
  view.dic = count_patterns(g, ps);
  view.max_count = 0;
  for (Index c : view.dic) view.max_count = std::max(view.max_count, c);
  view.high_adj = build_high_adj(g, view.dic);
  view.sim = build_sim(g, view.dic, view.max_count);
  return view;
}

void save_structure_view(const StructureView& view, const DataGraph& g,
                         const std::string& dir) {
  {
    std::ofstream out(dir + "/similarity.txt");
    if (!out) throw parse_error("cannot write " + dir + "/similarity.txt");
    char buf[32];
    const double denom = static_cast<double>(view.max_count) + 1.0;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const double s = (static_cast<double>(view.dic[e]) + 1.0) / denom;
      std::snprintf(buf, sizeof buf, "%.17g", s);
      out << g.edges[e].first << ' ' << g.edges[e].second << ' ' << view.dic[e]
          << ' ' << buf << '\n';
    }
  }
  {
    std::ofstream out(dir + "/high_adj.txt");
    if (!out) throw parse_error("cannot write " + dir + "/high_adj.txt");
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      if (view.dic[e] > 0)
        out << g.edges[e].first << ' ' << g.edges[e].second << '\n';
  }
}

StructureView load_structure_view(const DataGraph& g, const std::string& dir) {
  const std::string path = dir + "/similarity.txt";
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  StructureView view;
  view.dic.assign(g.edges.size(), -1);
  std::string line;
  Index lineno = 0;
  Index u, v, c;
  double s;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (std::sscanf(line.c_str(), "%ld %ld %ld %lf", &u, &v, &c, &s) != 4)
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected 'u v count sim'");
    const Index e = edge_index(g, u, v);
    if (e < 0)
      throw dimension_error(path + ":" + std::to_string(lineno) + ": edge (" +
                            std::to_string(u) + "," + std::to_string(v) +
                            ") not in graph");
    view.dic[e] = c;
  }
  for (std::size_t e = 0; e < view.dic.size(); ++e)
    if (view.dic[e] < 0)
      throw dimension_error(path + ": missing edge (" +
                            std::to_string(g.edges[e].first) + "," +
                            std::to_string(g.edges[e].second) + ")");
  view.max_count = 0;
  for (Index c2 : view.dic) view.max_count = std::max(view.max_count, c2);
  view.high_adj = build_high_adj(g, view.dic);
  view.sim = build_sim(g, view.dic, view.max_count);
  return view;
}

}  // namespace sccd
