#include "doctest.h"

#include <random>

#include "gffmod/lattice.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/stats.hpp"

using namespace gffmod;

namespace {

VertexField random_field(const Lattice& L, Rng& rng, bool zero_boundary) {
  std::normal_distribution<double> N;
  VertexField s(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) s[v] = (zero_boundary && L.is_boundary(v)) ? 0.0 : N(rng);
  return s;
}

}  // namespace

TEST_CASE("square lattice sizes and coordinates") {
  const Lattice L = Lattice::square(3);
  CHECK(L.num_vertices() == 49);
  CHECK(L.num_edges() == 2 * 7 * 6);
  CHECK(L.num_interior() == 25);
  CHECK(L.x(L.center()) == doctest::Approx(0.0));
  CHECK(L.y(L.index(0, 0)) == doctest::Approx(-1.0));
  CHECK(L.x(L.index(6, 0)) == doctest::Approx(1.0));
  CHECK(L.is_boundary(L.index(0, 3)));
  CHECK_FALSE(L.is_boundary(L.index(1, 1)));
  CHECK(L.degree(L.index(0, 0)) == 2);
  CHECK(L.degree(L.center()) == 4);
  CHECK(L.edge_between(L.index(0, 0), L.index(2, 0)) == -1);
}

TEST_CASE("edges point east or north") {
  const Lattice L = Lattice::rectangle(4, 3);
  for (const Edge& e : L.edges()) {
    const Site t = L.site(e.tail), h = L.site(e.head);
    if (e.horizontal) CHECK((h.col == t.col + 1 && h.row == t.row));
    else CHECK((h.row == t.row + 1 && h.col == t.col));
  }
}

TEST_CASE("free lattice has a single boundary vertex") {
  const Lattice L = Lattice::square(2, BoundaryCondition::free({2, 0}));
  CHECK(L.num_interior() == L.num_vertices() - 1);
  CHECK(L.is_boundary(L.index(2, 0)));
  CHECK(L.root() == L.index(2, 0));
  CHECK_FALSE(L.is_boundary(L.index(0, 0)));
}

TEST_CASE("gradient and divergence are adjoint up to sign") {
  Rng rng = make_rng(11);
  for (const Lattice& L : {Lattice::square(4), Lattice::rectangle(5, 3)}) {
    const VertexField s = random_field(L, rng, false);
    std::normal_distribution<double> N;
    EdgeField a(L.num_edges());
    for (double& x : a) x = N(rng);
    CHECK(dot(gradient(L, s), a) == doctest::Approx(-dot(s, divergence(L, a))).epsilon(1e-12));
  }
}

TEST_CASE("laplacian equals divergence of gradient and energy identity") {
  Rng rng = make_rng(12);
  const Lattice L = Lattice::square(5);
  const VertexField s = random_field(L, rng, true);
  const VertexField lap = laplacian(L, s);
  const VertexField dg = divergence(L, gradient(L, s));
  for (int v = 0; v < L.num_vertices(); ++v) CHECK(lap[v] == doctest::Approx(dg[v]).epsilon(1e-12));
  CHECK(dirichlet_energy(L, s) == doctest::Approx(-dot(s, lap)).epsilon(1e-12));
}

TEST_CASE("poisson solve inverts minus the laplacian") {
  Rng rng = make_rng(13);
  const Lattice L = Lattice::square(6);
  const VertexField rhs = random_field(L, rng, true);
  const VertexField u = solve_poisson(L, rhs);
  const VertexField lap = laplacian(L, u);
  for (int v : L.interior_vertices()) CHECK(-lap[v] == doctest::Approx(rhs[v]).epsilon(1e-10));
  for (int v = 0; v < L.num_vertices(); ++v)
    if (L.is_boundary(v)) CHECK(u[v] == 0.0);
}

TEST_CASE("green function is symmetric and positive") {
  const Lattice L = Lattice::square(4);
  const int x = L.center(), y = L.index(2, 5);
  CHECK(green(L, x, y) == doctest::Approx(green(L, y, x)).epsilon(1e-12));
  CHECK(green(L, x, x) > green(L, x, y));
  CHECK(green(L, x, L.index(0, 0)) == 0.0);
  // one interior vertex of degree 4: G = 1/4
  const Lattice one = Lattice::rectangle(3, 3);
  CHECK(green(one, 4, 4) == doctest::Approx(0.25));
}

TEST_CASE("green at the centre grows like log n / (2 pi)") {
  const double g8 = green(Lattice::square(8), Lattice::square(8).center(), Lattice::square(8).center());
  const Lattice L16 = Lattice::square(16);
  const double g16 = green(L16, L16.center(), L16.center());
  CHECK(g16 - g8 == doctest::Approx(std::log(2.0) / (2.0 * 3.141592653589793)).epsilon(0.05));
}

TEST_CASE("dirichlet problem keeps fixed values and is harmonic elsewhere") {
  const Lattice L = Lattice::square(3);
  std::vector<char> fixed(L.num_vertices(), 0);
  VertexField vals(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v)
    if (L.is_boundary(v)) vals[v] = L.x(v) + 2.0 * L.y(v);
  const VertexField h = solve_dirichlet(L, fixed, vals);
  // affine data is harmonic on the grid
  for (int v = 0; v < L.num_vertices(); ++v) CHECK(h[v] == doctest::Approx(L.x(v) + 2.0 * L.y(v)).epsilon(1e-10));
}

TEST_CASE("poisson factor correlate gives the Green covariance") {
  const Lattice L = Lattice::rectangle(4, 4);
  const auto& F = L.factor();
  const int ni = F.size();
  // covariance of correlate(z) is M M^T where M columns are correlate(e_k)
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < ni; ++k) {
    std::vector<double> e(ni, 0.0);
    e[k] = 1.0;
    cols.push_back(F.correlate(e));
  }
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < ni; ++j) {
      double c = 0.0;
      for (int k = 0; k < ni; ++k) c += cols[k][i] * cols[k][j];
      CHECK(c == doctest::Approx(green(L, L.interior_vertex(i), L.interior_vertex(j))).epsilon(1e-12));
    }
}

TEST_CASE("invalid lattices are rejected") {
  CHECK_THROWS_AS(Lattice::square(0), Error);
  CHECK_THROWS_AS(Lattice::rectangle(0, 3), Error);
  CHECK(Lattice::rectangle(2, 2).num_interior() == 0);
  CHECK_THROWS_AS(Lattice::square(2, BoundaryCondition::free({9, 9})), Error);
}
