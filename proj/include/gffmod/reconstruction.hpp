#pragma once

#include <cstdint>
#include <vector>

#include "gffmod/iv_gff.hpp"
#include "gffmod/lattice.hpp"
#include "gffmod/phase.hpp"

namespace gffmod {

struct ReconConfig {
  ChainConfig chain;
  int n_chains = 4;
};

/// Monte Carlo estimate of the conditional mean E[phi | e^{iT phi}].
struct ReconResult {
  VertexField mean_field;
  VertexField per_site_var;
  double rhat = 1.0;  // split R-hat of phi at the centre across chains
  bool converged = true;
  int n_samples = 0;
  double T = 1.0;
};

ReconResult reconstruct(const PhaseField& a, const ReconConfig& config, std::uint64_t seed);

/// Options shared by the disorder-averaged estimators. Each disorder index d
/// draws a fresh GFF phi with seed derive_seed(seed, {d}), observes it at T
/// and runs pairs_per_disorder chain pairs. Chain 2 of each pair starts from
/// the true heights of phi, an exact draw from the conditional law.
struct DisorderConfig {
  int n_disorder = 64;
  int pairs_per_disorder = 4;
  ChainConfig chain;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct VarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int n_disorder = 0;
  int n_chain_pairs = 0;
  int n_flagged = 0;  // non-converged pairs, excluded from the mean
  double rhat_max = 1.0;
};

/// One half of E[<phi1 - phi2, f>^2]. On a free lattice f is recentred to
/// zero mean first.
VarianceEstimate conditional_variance(const Lattice& lattice, const VertexField& f, double T,
                                      const DisorderConfig& config);

/// The same quantity on a lattice with one interior vertex, computed by
/// integrating the enumerated conditional variance against the wrapped
/// Gaussian law of a.
double conditional_variance_exact(const Lattice& lattice, const VertexField& f, double T, int K = 12);

struct TwoPointRow {
  int distance = 0;  // lattice steps east of x
  double value = 0.0;
  double std_error = 0.0;
};

struct OnePointStats {
  VarianceEstimate var_diff;  // E[(phi1 - phi2)(x)^2]
  std::vector<TwoPointRow> two_point;
};

/// E[(phi1 - phi2)^2(x)] and E[(phi1 - phi2)(x)(phi1 - phi2)(y)] for y on the
/// ray from x to the east boundary.
OnePointStats one_point_stats(const Lattice& lattice, double T, int x, const DisorderConfig& config);

struct SweepRow {
  double T = 0.0;
  int n = 0;
  double ratio = 0.0;  // conditional_variance(f) / <f, (-Delta)^{-1} f>, f = delta_0 (recentred if free)
  double std_error = 0.0;
  double green = 0.0;  // the denominator
  double rhat_max = 1.0;
  int n_flagged = 0;
};

std::vector<SweepRow> transition_sweep(const std::vector<double>& Ts, const std::vector<int>& ns,
                                       const DisorderConfig& config,
                                       BoundaryCondition bc = BoundaryCondition::dirichlet());

}  // namespace gffmod
