#pragma once

#include <utility>
#include <vector>

#include "gffmod/lattice.hpp"
#include "gffmod/rng.hpp"

namespace gffmod {

/// Exact sampler for the discrete GFF with density proportional to
/// exp(-<grad phi, grad phi> / 2) and zero boundary values.
class GffSampler {
 public:
  explicit GffSampler(Lattice lattice) : lattice_(std::move(lattice)) {}

  const Lattice& lattice() const { return lattice_; }

  VertexField sample(Rng& rng) const;

  struct Split {
    VertexField harmonic;  // phi_B: harmonic off B and the boundary
    VertexField residual;  // phi^B: zero on B and the boundary
  };
  /// Weak Markov decomposition phi = phi_B + phi^B with respect to the vertex
  /// set B. B must avoid the boundary.
  Split sample_markov_split(const std::vector<int>& B, Rng& rng) const;

 private:
  Lattice lattice_;
};

/// Splits an existing field along B. Deterministic part of sample_markov_split.
GffSampler::Split markov_split(const Lattice& lattice, const VertexField& phi, const std::vector<int>& B);

struct WhiteNoiseDraw {
  EdgeField W;       // i.i.d. standard normal per undirected edge
  VertexField phi;   // solution of -Delta phi = -div W, zero on the boundary
};

WhiteNoiseDraw sample_via_white_noise(const Lattice& lattice, Rng& rng);

}  // namespace gffmod
