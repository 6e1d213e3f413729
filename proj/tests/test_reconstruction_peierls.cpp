#include "doctest.h"

#include <cmath>
#include <random>

#include "gffmod/gff.hpp"
#include "gffmod/peierls.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/reconstruction.hpp"
#include "gffmod/rng.hpp"

using namespace gffmod;

TEST_CASE("conditional variance of the zero functional vanishes") {
  const Lattice L = Lattice::square(4);
  DisorderConfig c;
  c.n_disorder = 2;
  const auto r = conditional_variance(L, VertexField(L.num_vertices()), 1.0, c);
  CHECK(r.value == 0.0);
}

TEST_CASE("Monte Carlo conditional variance matches the one-site integral") {
  const Lattice L = Lattice::rectangle(3, 3);
  VertexField f(L.num_vertices());
  f[L.interior_vertex(0)] = 1.0;
  const double T = 4.0;
  const double exact = conditional_variance_exact(L, f, T);
  DisorderConfig c;
  c.n_disorder = 400;
  c.pairs_per_disorder = 2;
  c.chain = {20, 40, 1, 1.1};
  c.seed = 3;
  const auto mc = conditional_variance(L, f, T, c);
  CHECK(std::abs(mc.value - exact) < 4.0 * mc.std_error + 1e-3);
  // no information at large T: the conditional variance approaches G
  CHECK(conditional_variance_exact(L, f, 30.0) == doctest::Approx(0.25).epsilon(1e-3));
  // full information at small T
  CHECK(conditional_variance_exact(L, f, 0.5) < 1e-10);
}

TEST_CASE("reconstruction at small T reproduces the field") {
  const Lattice L = Lattice::square(6);
  Rng rng = make_rng(4);
  const VertexField phi = GffSampler(L).sample(rng);
  const PhaseField a = observe(L, phi, 0.25);
  ReconConfig rc;
  rc.chain = {50, 20, 2, 1.1};
  rc.n_chains = 2;
  const ReconResult r = reconstruct(a, rc, 5);
  for (int v = 0; v < L.num_vertices(); ++v) CHECK(r.mean_field[v] == doctest::Approx(phi[v]).epsilon(1e-9));
  CHECK(r.converged);
}

TEST_CASE("union-find and breadth-first labelling agree") {
  Rng rng = make_rng(6);
  std::bernoulli_distribution B(0.55);
  for (int rep = 0; rep < 20; ++rep) {
    const Lattice L = Lattice::square(6);
    std::vector<char> mask(L.num_vertices());
    for (auto& m : mask) m = B(rng);
    CHECK(label_components(L, mask) == label_components_bfs(L, mask));
  }
}

TEST_CASE("component geometry") {
  const Lattice L = Lattice::square(4);
  std::vector<int> row;
  for (int c = 0; c < 9; ++c) row.push_back(L.index(c, 3));
  CHECK(component_diameter(L, row) == 8);
  CHECK(component_extent(L, row) == 8);
  // U shape: graph distance exceeds the extent
  const std::vector<int> u{L.index(0, 0), L.index(0, 1), L.index(0, 2), L.index(1, 2), L.index(2, 2), L.index(2, 1),
                           L.index(2, 0)};
  CHECK(component_diameter(L, u) == 6);
  CHECK(component_extent(L, u) == 2);
  CHECK(component_diameter(L, {L.center()}) == 0);
}

TEST_CASE("Dirichlet agreement set and clusters") {
  const Lattice L = Lattice::square(3);
  IntegerField m1(L.num_vertices(), 0), m2(L.num_vertices(), 0);
  m2[L.index(2, 2)] = 1;
  m2[L.index(2, 3)] = 1;
  m2[L.index(5, 5)] = -1;
  const ComponentMap map = agreement_dirichlet(m1, m2, L);
  CHECK(map.num_labels() == 3);
  CHECK(map.in_I(L.index(0, 0)));
  CHECK(map.label[L.index(2, 2)] == 1);
  CHECK(map.label[L.index(5, 5)] == 2);
  CHECK(map.cluster(L.index(2, 3)).size() == 2);
  CHECK(map.cluster(L.index(0, 0)).empty());
  CHECK(map.diam[1] == 1);
  CHECK_FALSE(map.m_I.has_value());
}

TEST_CASE("gradient rule holds for coupled pairs") {
  const Lattice L = Lattice::square(6);
  Rng rng = make_rng(7);
  for (double T : {1.5, 3.0}) {
    const VertexField phi = GffSampler(L).sample(rng);
    const PhaseField a = observe(L, phi, T);
    long violations = 0;
    sample_pair(a, a.beta(), {100, 10, 5, 1.1}, rng, nullptr, [&](const IntegerField& m1, const IntegerField& m2) {
      violations += check_gradient_rule(agreement(m1, m2, L), m1, m2, a).violations;
    });
    CHECK(violations == 0);
  }
}

TEST_CASE("cluster tail bookkeeping") {
  const Lattice L = Lattice::square(6);
  DisorderConfig c;
  c.n_disorder = 6;
  c.pairs_per_disorder = 2;
  c.chain = {50, 5, 2, 1.1};
  const TailResult r = cluster_tail(L, 3.0, L.center(), c);
  CHECK(r.n_pairs == 12);
  CHECK(r.L.size() == 13);
  for (std::size_t i = 1; i < r.survival.size(); ++i) CHECK(r.survival[i] <= r.survival[i - 1]);
  CHECK(r.gradient_rule.violations == 0);
}
