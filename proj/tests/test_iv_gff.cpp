#include "doctest.h"

#include <cmath>
#include <numeric>

#include "gffmod/gff.hpp"
#include "gffmod/iv_gff.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/stats.hpp"

using namespace gffmod;

namespace {

VertexField random_shift(const Lattice& L, Rng& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  VertexField a(L.num_vertices());
  for (int v : L.interior_vertices()) a[v] = U(rng);
  return a;
}

}  // namespace

TEST_CASE("energy is beta/2 times the Dirichlet energy of m + a") {
  const Lattice L = Lattice::rectangle(4, 4);
  Rng rng = make_rng(1);
  const VertexField a = random_shift(L, rng);
  IntegerField m(L.num_vertices(), 0);
  m[L.interior_vertex(0)] = 2;
  VertexField s(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) s[v] = m[v] + a[v];
  CHECK(energy(L, m, a, 1.7) == doctest::Approx(0.85 * dirichlet_energy(L, s)));
}

TEST_CASE("heat-bath conditional matches the energy differences") {
  const Lattice L = Lattice::square(3);
  Rng rng = make_rng(2);
  const VertexField a = random_shift(L, rng);
  IntegerField m(L.num_vertices(), 0);
  std::uniform_int_distribution<int> U(-2, 2);
  for (int v : L.interior_vertices()) m[v] = U(rng);
  const double beta = 0.8;
  const int v = L.center();
  const SiteConditional c = heat_bath_conditional(L, m, a, beta, v);
  CHECK(std::accumulate(c.p.begin(), c.p.end(), 0.0) == doctest::Approx(1.0));
  for (int y = c.lo; y < c.lo + static_cast<int>(c.p.size()) - 1; ++y) {
    IntegerField m1 = m, m2 = m;
    m1[v] = y;
    m2[v] = y + 1;
    const double ratio = std::exp(energy(L, m1, a, beta) - energy(L, m2, a, beta));
    CHECK(c.prob(y + 1) / c.prob(y) == doctest::Approx(ratio).epsilon(1e-10));
  }
  CHECK_THROWS_AS(heat_bath_conditional(L, m, a, beta, 0), Error);
}

TEST_CASE("enumeration is normalised and consistent") {
  const Lattice L = Lattice::rectangle(4, 3);
  Rng rng = make_rng(3);
  const VertexField a = random_shift(L, rng);
  const auto t = enumerate_exact(L, a, 1.0, 5);
  CHECK(std::accumulate(t.probs.begin(), t.probs.end(), 0.0) == doctest::Approx(1.0));
  CHECK(t.tail_mass < 1e-8);
  for (std::size_t i = 0; i < t.size(); i += 7) CHECK(t.index_of(t.state(i)) == i);
  const auto marg = t.marginal(L.interior_vertex(0));
  CHECK(std::accumulate(marg.begin(), marg.end(), 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(enumerate_exact(Lattice::square(3), VertexField(49), 1.0, 8), Error);
}

TEST_CASE("shifting a by an integer shifts the law") {
  const Lattice L = Lattice::rectangle(3, 3);
  const int c = L.interior_vertex(0);
  VertexField a(L.num_vertices()), b(L.num_vertices());
  a[c] = 0.3;
  b[c] = 1.3;
  const auto ma = enumerate_exact(L, a, 0.7, 8).marginal(c);
  const auto mb = enumerate_exact(L, b, 0.7, 8).marginal(c);
  for (int k = -7; k <= 8; ++k) CHECK(mb[k - 1 + 8] == doctest::Approx(ma[k + 8]).epsilon(1e-9));
}

TEST_CASE("ground state at small T recovers the true heights") {
  const Lattice L = Lattice::square(8);
  Rng rng = make_rng(4);
  const VertexField phi = GffSampler(L).sample(rng);
  const PhaseField a = observe(L, phi, 0.25);
  const GroundState gs = ground_state(a);
  CHECK(gs.converged);
  CHECK(gs.m == true_heights(a, phi));
  CHECK(unwrap_lift(a) == true_heights(a, phi));
}

TEST_CASE("ground state is a local minimum") {
  const Lattice L = Lattice::square(6);
  Rng rng = make_rng(5);
  const VertexField phi = GffSampler(L).sample(rng);
  const PhaseField a = observe(L, phi, 6.0);
  const GroundState gs = ground_state(a);
  const double e0 = energy(gs.m, a, 1.0);
  for (int v : L.interior_vertices())
    for (int d : {-1, 1}) {
      IntegerField m = gs.m;
      m[v] += d;
      CHECK(energy(m, a, 1.0) >= e0 - 1e-9);
    }
}

TEST_CASE("Gibbs chain keeps the boundary and is reproducible") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(6);
  const VertexField a = random_shift(L, rng);
  IvGibbsChain c1(L, a, 0.5, IntegerField(L.num_vertices(), 0), make_rng(7));
  IvGibbsChain c2(L, a, 0.5, IntegerField(L.num_vertices(), 0), make_rng(7));
  c1.run(50);
  c2.run(50);
  CHECK(c1.state() == c2.state());
  CHECK(c1.sweeps_done() == 50);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (L.is_boundary(v)) CHECK(c1.state()[v] == 0);
  IntegerField bad(L.num_vertices(), 0);
  bad[0] = 1;
  CHECK_THROWS_AS(IvGibbsChain(L, a, 0.5, bad, make_rng(1)), Error);
}

TEST_CASE("Gibbs marginals match enumeration on one interior vertex") {
  const Lattice L = Lattice::rectangle(3, 3);
  const int c = L.interior_vertex(0);
  VertexField a(L.num_vertices());
  a[c] = 0.4;
  const double beta = 0.3;
  const auto exact = enumerate_exact(L, a, beta, 10).marginal(c);
  IvGibbsChain chain(L, a, beta, IntegerField(L.num_vertices(), 0), make_rng(8));
  std::vector<double> emp(21, 0.0);
  const int N = 100000;
  for (int s = 0; s < N; ++s) {
    chain.sweep();
    emp[chain.state()[c] + 10] += 1.0 / N;
  }
  CHECK(total_variation(emp, exact) < 0.01);
}

TEST_CASE("chain pair reports diagnostics") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(9);
  const VertexField phi = GffSampler(L).sample(rng);
  const PhaseField a = observe(L, phi, 1.0);
  int seen = 0;
  const PairResult r = sample_pair(a, a.beta(), {50, 20, 2, 1.1}, rng, nullptr,
                                   [&](const IntegerField&, const IntegerField&) { ++seen; });
  CHECK(seen == 20);
  CHECK(r.rhat >= 0.0);
  CHECK(r.converged == (r.rhat <= 1.1));
}
