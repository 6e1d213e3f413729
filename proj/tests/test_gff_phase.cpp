#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gffmod/gff.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/stats.hpp"

using namespace gffmod;

TEST_CASE("GFF draws vanish on the boundary") {
  const Lattice L = Lattice::square(5);
  Rng rng = make_rng(1);
  const VertexField phi = GffSampler(L).sample(rng);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (L.is_boundary(v)) CHECK(phi[v] == 0.0);
}

TEST_CASE("centre variance matches the Green function") {
  const Lattice L = Lattice::square(4);
  const GffSampler s(L);
  Rng rng = make_rng(2);
  std::vector<double> x2;
  for (int i = 0; i < 40000; ++i) {
    const double v = s.sample(rng)[L.center()];
    x2.push_back(v * v);
  }
  const double g = green(L, L.center(), L.center());
  CHECK(std::abs(mean(x2) - g) < 4.0 * std_error(x2));
}

TEST_CASE("Markov split adds up and has the right supports") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(3);
  const std::vector<int> B{L.index(2, 2), L.index(2, 3), L.index(3, 3)};
  const auto sp = GffSampler(L).sample_markov_split(B, rng);
  const VertexField lap = laplacian(L, sp.harmonic);
  for (int v = 0; v < L.num_vertices(); ++v) {
    const bool inB = std::find(B.begin(), B.end(), v) != B.end();
    if (inB || L.is_boundary(v)) CHECK(sp.residual[v] == doctest::Approx(0.0));
    else CHECK(lap[v] == doctest::Approx(0.0).epsilon(1e-10));
  }
  const auto again = markov_split(L, [&] {
    VertexField s(L.num_vertices());
    for (int v = 0; v < L.num_vertices(); ++v) s[v] = sp.harmonic[v] + sp.residual[v];
    return s;
  }(), B);
  for (int v = 0; v < L.num_vertices(); ++v) CHECK(again.harmonic[v] == doctest::Approx(sp.harmonic[v]).epsilon(1e-10));
}

TEST_CASE("white noise decomposition solves the Poisson equation") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(4);
  const WhiteNoiseDraw d = sample_via_white_noise(L, rng);
  const VertexField lap = laplacian(L, d.phi);
  const VertexField div = divergence(L, d.W);
  for (int v : L.interior_vertices()) CHECK(-lap[v] == doctest::Approx(-div[v]).epsilon(1e-10));
}

TEST_CASE("observation and lift round trip") {
  const Lattice L = Lattice::square(5);
  Rng rng = make_rng(5);
  const VertexField phi = GffSampler(L).sample(rng);
  for (double T : {0.25, 1.0, 7.0}) {
    const PhaseField a = observe(L, phi, T);
    for (double x : a.a) {
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
    }
    const IntegerField m = true_heights(a, phi);
    const VertexField back = lift(m, a);
    for (int v = 0; v < L.num_vertices(); ++v) CHECK(back[v] == doctest::Approx(phi[v]).epsilon(1e-12));
  }
}

TEST_CASE("beta_T and wrap_unit") {
  CHECK(beta_of(2.0 * std::numbers::pi) == doctest::Approx(1.0));
  CHECK(wrap_unit(1.25) == doctest::Approx(0.25));
  CHECK(wrap_unit(-0.25) == doctest::Approx(0.75));
  CHECK(wrap_unit(1.0 - 1e-14) == 0.0);
}
