#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gffmod/gff.hpp"
#include "gffmod/level_lines.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/sine_gordon.hpp"
#include "gffmod/stats.hpp"

using namespace gffmod;

TEST_CASE("site log ratio equals the change in log density") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(1);
  std::normal_distribution<double> N;
  SgConfig c;
  const VertexField a = draw_disorder(L, c, rng);
  VertexField phi(L.num_vertices());
  for (int v : L.interior_vertices()) phi[v] = 3.0 * N(rng);
  for (int k = 0; k < 200; ++k) {
    const int v = L.interior_vertex(k % L.num_interior());
    const double y = phi[v] + 2.0 * N(rng);
    VertexField moved = phi;
    moved[v] = y;
    const double direct = sg_log_density(L, moved, a, 0.2, 4.0) - sg_log_density(L, phi, a, 0.2, 4.0);
    CHECK(std::abs(sg_site_log_ratio(L, phi, a, 0.2, 4.0, v, y) - direct) < 1e-12 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("shifting the disorder by 2 pi leaves the density unchanged") {
  const Lattice L = Lattice::square(3);
  Rng rng = make_rng(2);
  SgConfig c;
  const VertexField a = draw_disorder(L, c, rng);
  VertexField b = a;
  for (int v : L.interior_vertices()) b[v] += 2.0 * std::numbers::pi;
  const VertexField phi = GffSampler(L).sample(rng);
  CHECK(sg_log_density(L, phi, a, 0.3, 2.0) == doctest::Approx(sg_log_density(L, phi, b, 0.3, 2.0)).epsilon(1e-13));
}

TEST_CASE("disorder draws") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(3);
  SgConfig c;
  const VertexField a = draw_disorder(L, c, rng);
  for (int v = 0; v < L.num_vertices(); ++v) {
    if (L.is_boundary(v)) CHECK(a[v] == 0.0);
    else CHECK((a[v] >= 0.0 && a[v] < 2.0 * std::numbers::pi));
  }
  c.disorder = DisorderKind::GffMod;
  c.T = 2.0;
  const VertexField g = draw_disorder(L, c, rng);
  for (int v : L.interior_vertices()) CHECK((g[v] >= 0.0 && g[v] < 2.0 * std::numbers::pi));
}

TEST_CASE("z = 0 reduces to the GFF at inverse temperature beta") {
  SgConfig c;
  c.z = 0.0;
  c.beta = 0.5;
  c.burn_in = 100;
  c.samples = 50;
  c.thin = 5;
  const auto rows = variance_profile(c, {4}, 200, 4, 1);
  CHECK(rows[0].variance == doctest::Approx(rows[0].gff_reference).epsilon(0.1));
  CHECK(rows[0].acceptance > 0.25);
  CHECK(rows[0].acceptance < 0.75);
}

TEST_CASE("small z stays close to the GFF variance") {
  SgConfig c;
  c.z = 0.1;
  c.beta = 0.5;
  c.burn_in = 200;
  c.samples = 50;
  c.thin = 5;
  const auto rows = variance_profile(c, {4}, 200, 5, 1);
  CHECK(rows[0].variance == doctest::Approx(rows[0].gff_reference).epsilon(0.15));
}

TEST_CASE("pinned model with GFF-mod disorder is annealed GFF") {
  CHECK(pinned_annealed_tv(Lattice::rectangle(3, 3), 2.0) < 1e-6);
  CHECK_THROWS_AS(pinned_annealed_tv(Lattice::square(2), 2.0), Error);
}

TEST_CASE("Metropolis chain adapts its scales") {
  const Lattice L = Lattice::square(4);
  Rng rng = make_rng(6);
  SgConfig c;
  c.adapt_interval = 20;
  const VertexField a = draw_disorder(L, c, rng);
  SgChain chain(L, a, c, VertexField(L.num_vertices()), make_rng(7));
  for (int s = 0; s < 400; ++s) chain.sweep(true);
  const double acc = chain.acceptance_rate();
  CHECK(acc > 0.2);
  CHECK(acc < 0.6);
  for (int v = 0; v < L.num_vertices(); ++v)
    if (L.is_boundary(v)) CHECK(chain.state()[v] == 0.0);
}

TEST_CASE("half-plane field gives a straight path and its mirror runs south") {
  const Lattice L = Lattice::square(3);
  VertexField s(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) s[v] = L.x(v) >= 0.0 ? 1.0 : -1.0;
  const DualPath p = trace_level_line(s, L);
  CHECK(p.northward);
  CHECK(p.steps.size() == 7);
  for (const auto& pt : p.points) CHECK(pt.x == doctest::Approx(-1.0 / 6.0));
  CHECK(validate_path(p, s, L).empty());
  VertexField m = s;
  for (double& v : m) v = -v;
  const DualPath q = trace_level_line(m, L);
  CHECK_FALSE(q.northward);
  CHECK(q.steps.size() == 7);
  CHECK(hausdorff(p, q) == 0.0);
  CHECK(validate_path(q, m, L).empty());
}

TEST_CASE("random fields give simple anchored paths obeying the sign rule") {
  const Lattice L = Lattice::square(16);
  const VertexField u = harmonic_boundary(L);
  for (int rep = 0; rep < 10; ++rep) {
    Rng rng = make_rng(8, {static_cast<std::uint64_t>(rep)});
    const VertexField phi = GffSampler(L).sample(rng);
    VertexField s(L.num_vertices());
    for (int v = 0; v < L.num_vertices(); ++v) s[v] = phi[v] + u[v];
    const DualPath p = trace_level_line(s, L);
    CHECK(validate_path(p, s, L).empty());
  }
}

TEST_CASE("phase level line equals the field level line without wrapping") {
  const Lattice L = Lattice::square(8);
  Rng rng = make_rng(9);
  const VertexField phi = GffSampler(L).sample(rng);
  const double T = 0.2;
  const VertexField u = harmonic_boundary(L);
  VertexField s(L.num_vertices());
  double worst = 0.0;
  for (int v = 0; v < L.num_vertices(); ++v) {
    s[v] = phi[v] + u[v];
    worst = std::max(worst, std::abs(T * s[v]));
  }
  REQUIRE(worst < std::numbers::pi);
  const DualPath a = trace_level_line(s, L);
  const DualPath b = trace_phase_level_line(observe(L, phi, T));
  CHECK(hausdorff(a, b) == 0.0);
  CHECK(a.steps.size() == b.steps.size());
}

TEST_CASE("Hausdorff distance") {
  const Lattice L = Lattice::square(4);
  VertexField s(L.num_vertices()), t(L.num_vertices());
  for (int v = 0; v < L.num_vertices(); ++v) {
    s[v] = L.site(v).col >= 4 ? 1.0 : -1.0;
    t[v] = (L.site(v).col >= 5 || (L.site(v).col == 4 && (L.site(v).row == 0 || L.site(v).row == 8))) ? 1.0 : -1.0;
  }
  const DualPath p = trace_level_line(s, L);
  const DualPath q = trace_level_line(t, L);
  CHECK(hausdorff(p, p) == 0.0);
  CHECK(hausdorff(p, q) == doctest::Approx(0.25));
  Rng rng = make_rng(10);
  const VertexField u = harmonic_boundary(L);
  std::vector<DualPath> paths;
  for (int i = 0; i < 3; ++i) {
    const VertexField phi = GffSampler(L).sample(rng);
    VertexField f(L.num_vertices());
    for (int v = 0; v < L.num_vertices(); ++v) f[v] = phi[v] + u[v];
    paths.push_back(trace_level_line(f, L));
  }
  CHECK(hausdorff(paths[0], paths[2]) <= hausdorff(paths[0], paths[1]) + hausdorff(paths[1], paths[2]) + 1e-15);
}

TEST_CASE("degenerate fields are reported, not traced") {
  const Lattice L = Lattice::square(3);
  CHECK_THROWS_AS(trace_level_line(VertexField(L.num_vertices()), L), Error);
  CHECK_THROWS_AS(trace_level_line(VertexField(L.num_vertices(), -1.0), L), Error);
  CHECK_THROWS_AS(harmonic_boundary(Lattice::square(3, BoundaryCondition::free({0, 0}))), Error);
  PhaseField a{L, 40.0, VertexField(L.num_vertices())};
  CHECK_THROWS_AS(trace_phase_level_line(a), Error);
}

TEST_CASE("harmonic boundary values") {
  const Lattice L = Lattice::square(4);
  const VertexField u = harmonic_boundary(L);
  CHECK(u[L.index(8, 0)] == doctest::Approx(kLevelLineLambda));
  CHECK(u[L.index(0, 8)] == doctest::Approx(-kLevelLineLambda));
  CHECK(std::abs(u[L.center()]) < kLevelLineLambda);
}
