#include "gffmod/gff.hpp"

#include <random>

namespace gffmod {

VertexField GffSampler::sample(Rng& rng) const {
  VertexField phi(lattice_.num_vertices());
  const int n = lattice_.num_interior();
  if (n == 0) return phi;
  std::normal_distribution<double> normal;
  std::vector<double> z(n);
  for (double& v : z) v = normal(rng);
  const auto x = lattice_.factor().correlate(z);
  for (int k = 0; k < n; ++k) phi[lattice_.interior_vertex(k)] = x[k];
  return phi;
}

GffSampler::Split markov_split(const Lattice& lattice, const VertexField& phi, const std::vector<int>& B) {
  std::vector<char> fixed(lattice.num_vertices(), 0);
  VertexField values(lattice.num_vertices());
  for (int v : B) {
    if (v < 0 || v >= lattice.num_vertices()) throw Error("vertex outside lattice in Markov split");
    if (lattice.is_boundary(v)) throw Error("Markov split set must avoid the boundary");
    fixed[v] = 1;
    values[v] = phi[v];
  }
  GffSampler::Split out;
  out.harmonic = solve_dirichlet(lattice, fixed, values);
  out.residual = VertexField(lattice.num_vertices());
  for (int v = 0; v < lattice.num_vertices(); ++v) out.residual[v] = phi[v] - out.harmonic[v];
  for (int v : B) out.residual[v] = 0.0;
  return out;
}

GffSampler::Split GffSampler::sample_markov_split(const std::vector<int>& B, Rng& rng) const {
  return markov_split(lattice_, sample(rng), B);
}

WhiteNoiseDraw sample_via_white_noise(const Lattice& lattice, Rng& rng) {
  std::normal_distribution<double> normal;
  WhiteNoiseDraw out;
  out.W = EdgeField(lattice.num_edges());
  for (double& w : out.W) w = normal(rng);
  VertexField rhs = divergence(lattice, out.W);
  for (double& v : rhs) v = -v;
  out.phi = solve_poisson(lattice, rhs);
  return out;
}

}  // namespace gffmod
