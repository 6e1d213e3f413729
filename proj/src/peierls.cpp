#include "gffmod/peierls.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <numeric>

#include "gffmod/gff.hpp"
#include "gffmod/parallel.hpp"

namespace gffmod {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<int> bfs_distances(const Lattice& lattice, const std::vector<char>& in, int src, int& far) {
  std::vector<int> dist(lattice.num_vertices(), -1);
  std::deque<int> q{src};
  dist[src] = 0;
  far = src;
  while (!q.empty()) {
    const int x = q.front();
    q.pop_front();
    if (dist[x] > dist[far]) far = x;
    for (int y : lattice.neighbors(x))
      if (in[y] && dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push_back(y);
      }
  }
  return dist;
}

}  // namespace

std::vector<int> ComponentMap::cluster(int v) const {
  std::vector<int> out;
  if (label[v] == 0) return out;
  for (int u = 0; u < static_cast<int>(label.size()); ++u)
    if (label[u] == label[v]) out.push_back(u);
  return out;
}

std::vector<int> label_components(const Lattice& lattice, const std::vector<char>& mask) {
  const int nv = lattice.num_vertices();
  UnionFind uf(nv);
  for (const Edge& e : lattice.edges())
    if (mask[e.tail] && mask[e.head]) uf.unite(e.tail, e.head);
  std::vector<int> label(nv, -1), root_label(nv, -1);
  int next = 0;
  for (int v = 0; v < nv; ++v) {
    if (!mask[v]) continue;
    const int r = uf.find(v);
    if (root_label[r] < 0) root_label[r] = next++;
    label[v] = root_label[r];
  }
  return label;
}

std::vector<int> label_components_bfs(const Lattice& lattice, const std::vector<char>& mask) {
  const int nv = lattice.num_vertices();
  std::vector<int> label(nv, -1);
  int next = 0;
  for (int v = 0; v < nv; ++v) {
    if (!mask[v] || label[v] >= 0) continue;
    std::deque<int> q{v};
    label[v] = next;
    while (!q.empty()) {
      const int x = q.front();
      q.pop_front();
      for (int y : lattice.neighbors(x))
        if (mask[y] && label[y] < 0) {
          label[y] = next;
          q.push_back(y);
        }
    }
    ++next;
  }
  return label;
}

int component_extent(const Lattice& lattice, const std::vector<int>& vertices) {
  if (vertices.empty()) return 0;
  int c0 = lattice.width(), c1 = -1, r0 = lattice.height(), r1 = -1;
  for (int v : vertices) {
    const Site s = lattice.site(v);
    c0 = std::min(c0, s.col);
    c1 = std::max(c1, s.col);
    r0 = std::min(r0, s.row);
    r1 = std::max(r1, s.row);
  }
  return std::max(c1 - c0, r1 - r0);
}

int component_diameter(const Lattice& lattice, const std::vector<int>& vertices) {
  if (vertices.size() <= 1) return 0;
  std::vector<char> in(lattice.num_vertices(), 0);
  for (int v : vertices) in[v] = 1;
  int far = vertices.front();
  if (vertices.size() <= 2000) {
    int best = 0;
    for (int v : vertices) {
      const auto d = bfs_distances(lattice, in, v, far);
      best = std::max(best, d[far]);
    }
    return best;
  }
  bfs_distances(lattice, in, vertices.front(), far);
  int far2 = far;
  const auto d = bfs_distances(lattice, in, far, far2);
  return std::max(d[far2], component_extent(lattice, vertices));
}

namespace {

void fill_geometry(const Lattice& lattice, ComponentMap& map) {
  const int labels = map.label.empty() ? 0 : *std::max_element(map.label.begin(), map.label.end()) + 1;
  std::vector<std::vector<int>> members(std::max(labels, 1));
  for (int v = 0; v < static_cast<int>(map.label.size()); ++v) members[map.label[v]].push_back(v);
  map.diam.assign(members.size(), 0);
  map.extent.assign(members.size(), 0);
  for (std::size_t k = 0; k < members.size(); ++k) {
    map.diam[k] = component_diameter(lattice, members[k]);
    map.extent[k] = component_extent(lattice, members[k]);
  }
}

// Labels the complement of I (given by in_I) as 1, 2, ...
void label_complement(const Lattice& lattice, const std::vector<char>& in_I, ComponentMap& map) {
  std::vector<char> rest(lattice.num_vertices());
  for (int v = 0; v < lattice.num_vertices(); ++v) rest[v] = !in_I[v];
  const auto comp = label_components(lattice, rest);
  map.label.assign(lattice.num_vertices(), 0);
  for (int v = 0; v < lattice.num_vertices(); ++v)
    if (!in_I[v]) map.label[v] = comp[v] + 1;
}

void check_pair(const Lattice& lattice, const IntegerField& m1, const IntegerField& m2) {
  if (static_cast<int>(m1.size()) != lattice.num_vertices() || m1.size() != m2.size())
    throw Error("height fields do not match lattice");
}

}  // namespace

ComponentMap agreement_dirichlet(const IntegerField& m1, const IntegerField& m2, const Lattice& lattice) {
  check_pair(lattice, m1, m2);
  const int nv = lattice.num_vertices();
  std::vector<char> agree(nv);
  for (int v = 0; v < nv; ++v) agree[v] = m1[v] == m2[v];
  const auto comp = label_components(lattice, agree);
  std::vector<char> boundary_comp(nv, 0);
  for (int v = 0; v < nv; ++v)
    if (lattice.is_boundary(v) && comp[v] >= 0) boundary_comp[comp[v]] = 1;
  std::vector<char> in_I(nv);
  for (int v = 0; v < nv; ++v) in_I[v] = comp[v] >= 0 && boundary_comp[comp[v]];
  ComponentMap map;
  label_complement(lattice, in_I, map);
  map.empty_I = std::none_of(in_I.begin(), in_I.end(), [](char c) { return c; });
  fill_geometry(lattice, map);
  if (map.empty_I) map.diam[0] = map.extent[0] = 0;
  return map;
}

ComponentMap agreement_free(const IntegerField& m1, const IntegerField& m2, const Lattice& lattice) {
  check_pair(lattice, m1, m2);
  const int nv = lattice.num_vertices();
  std::map<int, std::vector<int>> by_offset;
  for (int v = 0; v < nv; ++v) by_offset[m2[v] - m1[v]].push_back(v);
  struct Candidate {
    int k;
    std::vector<int> members;
    int diam;
  };
  std::vector<Candidate> big;
  for (const auto& [k, verts] : by_offset) {
    std::vector<char> mask(nv, 0);
    for (int v : verts) mask[v] = 1;
    const auto comp = label_components(lattice, mask);
    const int labels = *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<int> size(labels, 0);
    for (int v : verts) ++size[comp[v]];
    // labels are ordered by smallest member, so the first maximum wins ties
    const int best = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<int> members;
    for (int v : verts)
      if (comp[v] == best) members.push_back(v);
    const int d = component_diameter(lattice, members);
    if (d > lattice.n() / 2.0) big.push_back({k, std::move(members), d});
  }
  ComponentMap map;
  if (big.size() == 1) {
    std::vector<char> in_I(nv, 0);
    for (int v : big.front().members) in_I[v] = 1;
    label_complement(lattice, in_I, map);
    map.m_I = big.front().k;
    fill_geometry(lattice, map);
  } else {
    map.empty_I = true;
    map.label.assign(nv, 1);
    fill_geometry(lattice, map);
    map.diam[0] = map.extent[0] = 0;
  }
  return map;
}

GradientRuleCheck check_gradient_rule(const ComponentMap& map, const IntegerField& m1, const IntegerField& m2,
                                      const PhaseField& a) {
  const Lattice& L = a.lattice;
  const VertexField p1 = lift(m1, a);
  const VertexField p2 = lift(m2, a);
  const double threshold = std::numbers::pi / a.T * (1.0 - 1e-9);
  GradientRuleCheck out;
  for (const Edge& e : L.edges()) {
    if (map.in_I(e.tail) == map.in_I(e.head)) continue;
    ++out.edges_checked;
    const double g1 = std::abs(p1[e.head] - p1[e.tail]);
    const double g2 = std::abs(p2[e.head] - p2[e.tail]);
    if (g1 < threshold && g2 < threshold) ++out.violations;
  }
  return out;
}

TailResult cluster_tail(const Lattice& lattice, double T, int x, const DisorderConfig& config) {
  const int n = static_cast<int>(std::lround(lattice.n()));
  const int maxL = 2 * n;
  const GffSampler sampler(lattice);
  const double beta = beta_of(T);
  struct Row {
    std::vector<int> extents;  // -1 for an empty cluster
    GradientRuleCheck rule;
  };
  const auto rows = parallel_map(
      static_cast<std::size_t>(config.n_disorder),
      [&](std::size_t d) {
        Rng rng = make_rng(config.seed, {static_cast<std::uint64_t>(d)});
        const VertexField phi = sampler.sample(rng);
        const PhaseField a = observe(lattice, phi, T);
        const IntegerField truth = true_heights(a, phi);
        Row row;
        for (int p = 0; p < config.pairs_per_disorder; ++p) {
          auto observer = [&](const IntegerField& m1, const IntegerField& m2) {
            const ComponentMap map = agreement(m1, m2, lattice);
            row.extents.push_back(map.in_I(x) ? -1 : map.extent[map.label[x]]);
            const auto r = check_gradient_rule(map, m1, m2, a);
            row.rule.edges_checked += r.edges_checked;
            row.rule.violations += r.violations;
          };
          sample_pair(a, beta, config.chain, rng, &truth, observer);
        }
        return row;
      },
      config.threads);
  TailResult out;
  std::vector<long> count(maxL + 1, 0);
  long total = 0;
  for (const auto& r : rows) {
    out.gradient_rule.edges_checked += r.rule.edges_checked;
    out.gradient_rule.violations += r.rule.violations;
    for (int e : r.extents) {
      ++total;
      for (int L = 0; L <= std::min(e, maxL); ++L) ++count[L];
    }
  }
  out.n_pairs = config.n_disorder * config.pairs_per_disorder;
  out.n_observations = total;
  std::vector<double> xs, ys;
  for (int L = 0; L <= maxL; ++L) {
    out.L.push_back(L);
    const double s = total > 0 ? static_cast<double>(count[L]) / total : 0.0;
    out.survival.push_back(s);
    if (s > 0.0) {
      xs.push_back(L);
      ys.push_back(std::log(s));
    }
  }
  out.degenerate = xs.size() < 3;
  if (!out.degenerate) {
    out.fit = linear_fit(xs, ys);
    out.rate = -out.fit.slope;
  }
  return out;
}

}  // namespace gffmod
