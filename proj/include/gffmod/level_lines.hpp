#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gffmod/lattice.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/reconstruction.hpp"

namespace gffmod {

/// sqrt(pi / 8).
inline const double kLevelLineLambda = std::sqrt(std::numbers::pi / 8.0);

struct DualStep {
  int edge = 0;   // crossed primal edge
  int left = 0;   // endpoint on the left of the direction of travel
  int right = 0;  // endpoint on the right
};

struct PathPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Dual path given by the primal edges it crosses, in order. points holds
/// the midpoints of the crossed edges in [-1,1]^2 coordinates.
struct DualPath {
  std::vector<DualStep> steps;
  std::vector<PathPoint> points;
  bool northward = true;  // false when traced from the top anchor
};

/// Harmonic function with boundary values +lambda where x >= 0 and -lambda
/// where x < 0. Needs a Dirichlet lattice.
VertexField harmonic_boundary(const Lattice& lattice, double lambda = kLevelLineLambda);

/// Interface between negative and non-negative values of S, traced across
/// plaquettes from the bottom anchor edge (-1/n,-1)-(0,-1) to the top anchor
/// (-1/n,1)-(0,1), keeping negative values on the left. If the bottom anchor
/// has the opposite orientation the trace runs southward from the top anchor
/// instead. At a saddle the path turns left. Zero counts as positive.
DualPath trace_level_line(const VertexField& S, const Lattice& lattice);

/// Level line of sin(2 pi a + T u), the imaginary part of e^{iT(phi + u)}.
DualPath trace_phase_level_line(const PhaseField& a, double lambda = kLevelLineLambda);

/// Checks the sign rule on every step, adjacency of consecutive crossings,
/// simplicity (no edge crossed twice) and the anchors. Returns an empty
/// string when all hold, otherwise a description of the first failure.
std::string validate_path(const DualPath& path, const VertexField& S, const Lattice& lattice);

/// Symmetric Hausdorff distance between the point sets of two paths.
double hausdorff(const DualPath& p1, const DualPath& p2);

/// Traces the level line of reconstruct(a).mean_field + u.
DualPath reconstructed_level_line(const PhaseField& a, const ReconConfig& config, std::uint64_t seed,
                                  double lambda = kLevelLineLambda);

}  // namespace gffmod
