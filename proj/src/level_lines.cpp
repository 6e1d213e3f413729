#include "gffmod/level_lines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace gffmod {

namespace {

struct Dir {
  int dc, dr;
};

Dir turn_left(Dir d) { return {-d.dr, d.dc}; }
Dir turn_right(Dir d) { return {d.dr, -d.dc}; }

std::string site_name(const Lattice& L, int v) {
  const Site s = L.site(v);
  return "(" + std::to_string(s.col) + "," + std::to_string(s.row) + ")";
}

void require_square_dirichlet(const Lattice& L) {
  if (L.is_free()) throw Error("level lines need a Dirichlet lattice");
  if (L.width() != L.height() || L.width() % 2 == 0) throw Error("level lines need a square lattice of odd side");
}

}  // namespace

VertexField harmonic_boundary(const Lattice& lattice, double lambda) {
  require_square_dirichlet(lattice);
  std::vector<char> fixed(lattice.num_vertices(), 0);
  VertexField values(lattice.num_vertices());
  const int mid = lattice.width() / 2;
  for (int v = 0; v < lattice.num_vertices(); ++v)
    if (lattice.is_boundary(v)) values[v] = lattice.site(v).col >= mid ? lambda : -lambda;
  return solve_dirichlet(lattice, fixed, values);
}

DualPath trace_level_line(const VertexField& S, const Lattice& L) {
  require_square_dirichlet(L);
  if (static_cast<int>(S.size()) != L.num_vertices()) throw Error("field does not match lattice");
  const int mid = L.width() / 2;
  const int top = L.height() - 1;
  auto neg = [&](int v) { return S[v] < 0.0; };

  Site left, right;
  Dir d;
  DualPath path;
  if (neg(L.index(mid - 1, 0)) && !neg(L.index(mid, 0))) {
    left = {mid - 1, 0};
    right = {mid, 0};
    d = {0, 1};
  } else if (neg(L.index(mid, top)) && !neg(L.index(mid - 1, top))) {
    left = {mid, top};
    right = {mid - 1, top};
    d = {0, -1};
    path.northward = false;
  } else {
    throw Error("no admissible start: anchor edges do not separate negative from non-negative values");
  }
  const std::size_t cap = 4 * static_cast<std::size_t>(L.num_vertices());
  auto record = [&](Site l, Site r) {
    const int lv = L.index(l), rv = L.index(r);
    path.steps.push_back({L.edge_between(lv, rv), lv, rv});
    path.points.push_back({0.5 * (L.x(lv) + L.x(rv)), 0.5 * (L.y(lv) + L.y(rv))});
  };
  record(left, right);
  for (;;) {
    const Site al{left.col + d.dc, left.row + d.dr};
    const Site ar{right.col + d.dc, right.row + d.dr};
    if (!L.contains(al.col, al.row) || !L.contains(ar.col, ar.row)) {
      const bool at_top = path.northward && left.row == top && left.col == mid - 1 && right.col == mid;
      const bool at_bottom = !path.northward && left.row == 0 && left.col == mid && right.col == mid - 1;
      if (at_top || at_bottom) return path;
      throw Error("level line left the lattice away from the end anchor at dual vertex beyond edge " +
                  site_name(L, L.index(left)) + "-" + site_name(L, L.index(right)));
    }
    const bool nl = neg(L.index(al)), nr = neg(L.index(ar));
    if (!nl) {
      right = al;
      d = turn_left(d);
    } else if (!nr) {
      left = al;
      right = ar;
    } else {
      left = ar;
      d = turn_right(d);
    }
    record(left, right);
    if (path.steps.size() > cap)
      throw Error("level line did not terminate; stuck near dual vertex beyond edge " + site_name(L, L.index(left)) +
                  "-" + site_name(L, L.index(right)));
  }
}

DualPath trace_phase_level_line(const PhaseField& a, double lambda) {
  if (!(a.T * lambda < std::numbers::pi)) throw Error("phase level lines need T * lambda < pi");
  const VertexField u = harmonic_boundary(a.lattice, lambda);
  VertexField s(a.lattice.num_vertices());
  for (int v = 0; v < a.lattice.num_vertices(); ++v)
    s[v] = std::sin(2.0 * std::numbers::pi * a.a[v] + a.T * u[v]);
  return trace_level_line(s, a.lattice);
}

std::string validate_path(const DualPath& path, const VertexField& S, const Lattice& L) {
  if (path.steps.empty()) return "empty path";
  std::set<int> seen;
  const int mid = L.width() / 2, top = L.height() - 1;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const auto& st = path.steps[i];
    if (st.edge < 0 || L.edge_between(st.left, st.right) != st.edge) return "step " + std::to_string(i) + " is not an edge";
    if (!(S[st.left] < 0.0) || S[st.right] < 0.0) return "sign rule fails at step " + std::to_string(i);
    if (!seen.insert(st.edge).second) return "edge crossed twice at step " + std::to_string(i);
    if (i > 0) {
      // consecutive crossed edges bound a common plaquette
      const auto& pr = path.steps[i - 1];
      const Site a = L.site(pr.left), b = L.site(pr.right), c = L.site(st.left), e = L.site(st.right);
      const int c0 = std::min({a.col, b.col, c.col, e.col}), c1 = std::max({a.col, b.col, c.col, e.col});
      const int r0 = std::min({a.row, b.row, c.row, e.row}), r1 = std::max({a.row, b.row, c.row, e.row});
      if (c1 - c0 != 1 || r1 - r0 != 1) return "steps " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not adjacent";
    }
  }
  const Site first = L.site(path.steps.front().left), last = L.site(path.steps.back().left);
  const int bottom_col = path.northward ? mid - 1 : mid;
  const int top_col = path.northward ? mid - 1 : mid;
  const Site start = path.northward ? Site{bottom_col, 0} : Site{top_col, top};
  const Site end = path.northward ? Site{top_col, top} : Site{bottom_col, 0};
  if (!(first == start)) return "path does not start at the anchor";
  if (!(last == end)) return "path does not end at the anchor";
  return {};
}

double hausdorff(const DualPath& p1, const DualPath& p2) {
  if (p1.points.empty() || p2.points.empty()) throw Error("Hausdorff distance of an empty path");
  auto directed = [](const DualPath& a, const DualPath& b) {
    double worst = 0.0;
    for (const auto& p : a.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : b.points) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(p1, p2), directed(p2, p1));
}

DualPath reconstructed_level_line(const PhaseField& a, const ReconConfig& config, std::uint64_t seed, double lambda) {
  const ReconResult r = reconstruct(a, config, seed);
  const VertexField u = harmonic_boundary(a.lattice, lambda);
  VertexField s(a.lattice.num_vertices());
  for (int v = 0; v < a.lattice.num_vertices(); ++v) s[v] = r.mean_field[v] + u[v];
  return trace_level_line(s, a.lattice);
}

}  // namespace gffmod
