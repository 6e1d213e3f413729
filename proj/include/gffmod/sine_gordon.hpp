#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "gffmod/lattice.hpp"
#include "gffmod/rng.hpp"

namespace gffmod {

enum class DisorderKind { Uniform, GffMod };

/// Random-phase Sine-Gordon model: density proportional to
///   exp(-beta/2 <grad phi, grad phi> + z sum_i cos(phi_i - a_i))
/// with quenched phases a. z = infinity pins phi to the fibres 2 pi Z + a.
struct SgConfig {
  double beta = 0.2;
  double z = 4.0;
  DisorderKind disorder = DisorderKind::Uniform;
  double T = 1.0;  // GffMod disorder: a = T phi mod 2 pi with phi a unit GFF
  int burn_in = 2000;
  int samples = 200;
  int thin = 10;
  int adapt_interval = 50;

  bool pinned() const { return z == std::numeric_limits<double>::infinity(); }
};

/// Log of the unnormalised density.
double sg_log_density(const Lattice& lattice, const VertexField& phi, const VertexField& a, double beta, double z);

/// Change in sg_log_density when phi_v moves to y, from local terms only.
double sg_site_log_ratio(const Lattice& lattice, const VertexField& phi, const VertexField& a, double beta,
                         double z, int v, double y);

/// Single-site random-walk Metropolis chain for finite z.
class SgChain {
 public:
  SgChain(Lattice lattice, VertexField a, const SgConfig& config, VertexField init, Rng rng);

  /// One systematic sweep. With adapt set, the per-site proposal scales are
  /// nudged every adapt_interval sweeps toward acceptance in [0.3, 0.5].
  void sweep(bool adapt = false);

  const VertexField& state() const { return phi_; }
  double acceptance_rate() const;
  const std::vector<double>& scales() const { return scale_; }

 private:
  Lattice lattice_;
  VertexField a_;
  SgConfig cfg_;
  VertexField phi_;
  Rng rng_;
  std::vector<double> scale_;
  std::vector<int> accepted_, proposed_;
  long total_accepted_ = 0, total_proposed_ = 0;
  int since_adapt_ = 0;
};

/// Quenched phases in [0, 2 pi) on the interior, 0 on the boundary.
VertexField draw_disorder(const Lattice& lattice, const SgConfig& config, Rng& rng);

struct SgProfileRow {
  int n = 0;
  double variance = 0.0;  // annealed Var(phi(0))
  double std_error = 0.0;
  double gff_reference = 0.0;  // G_n(0,0) / beta
  int n_disorder = 0;
  double acceptance = 0.0;
};

std::vector<SgProfileRow> variance_profile(const SgConfig& config, const std::vector<int>& ns, int n_disorder,
                                           std::uint64_t seed, int threads = 0);

/// Total variation between the annealed law of phi at the single interior
/// vertex under z = infinity with GffMod(T) disorder, built from enumerated
/// conditional tables, and the GFF law at beta = 1/T^2.
double pinned_annealed_tv(const Lattice& lattice, double T, int K = 12);

}  // namespace gffmod
