#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gffmod/lattice.hpp"
#include "gffmod/phase.hpp"
#include "gffmod/rng.hpp"

namespace gffmod {

/// (beta / 2) <grad(m + a), grad(m + a)>.
double energy(const Lattice& lattice, const IntegerField& m, const VertexField& a, double beta);
double energy(const IntegerField& m, const PhaseField& a, double beta);

/// Heat-bath law of m_v given the other heights: P(m_v = lo + k) = p[k].
/// The window is +-(ceil(8 / sqrt(beta deg)) + 2) around the continuous mode.
struct SiteConditional {
  int lo = 0;
  std::vector<double> p;
  double prob(int value) const {
    const int k = value - lo;
    return (k >= 0 && k < static_cast<int>(p.size())) ? p[k] : 0.0;
  }
};

SiteConditional heat_bath_conditional(const Lattice& lattice, const IntegerField& m, const VertexField& a,
                                      double beta, int v);

/// Single-site heat-bath Gibbs sampler for the a-shifted integer-valued GFF.
class IvGibbsChain {
 public:
  IvGibbsChain(Lattice lattice, VertexField a, double beta, IntegerField init, Rng rng);
  IvGibbsChain(const PhaseField& a, double beta, IntegerField init, Rng rng)
      : IvGibbsChain(a.lattice, a.a, beta, std::move(init), std::move(rng)) {}

  /// One systematic sweep over the interior vertices in index order.
  void sweep();
  void run(int sweeps) {
    for (int s = 0; s < sweeps; ++s) sweep();
  }

  const IntegerField& state() const { return m_; }
  const VertexField& shift() const { return a_; }
  const Lattice& lattice() const { return lattice_; }
  double beta() const { return beta_; }
  long sweeps_done() const { return sweeps_; }

 private:
  Lattice lattice_;
  VertexField a_;
  double beta_;
  IntegerField m_;
  Rng rng_;
  long sweeps_ = 0;
  std::vector<double> weights_;
  std::vector<int> nbr_;
  std::vector<double> site_c_, site_q_;
  std::vector<int> site_half_;
};

/// Unwraps the phase from the boundary (or root) by breadth-first search,
/// choosing m_y - m_x = round(a_x - a_y) along each tree edge. With a
/// generator the search order is randomised.
IntegerField unwrap_lift(const PhaseField& a, Rng* rng = nullptr);

struct GroundState {
  IntegerField m;
  bool converged = false;
  int rounds = 0;
};

/// Iterated conditional modes on <grad(m + a), grad(m + a)> starting from
/// init. A site moves only to a strictly better value; the optimum is
/// chosen with m + a - mean(neighbours) in (-1/2, 1/2].
GroundState ground_state(const PhaseField& a, IntegerField init, int max_rounds = 100000);
/// Same, starting from unwrap_lift(a).
GroundState ground_state(const PhaseField& a, int max_rounds = 100000);

/// Exact law of the heights over the window {-K..K}^interior.
struct IvDistributionTable {
  Lattice lattice;
  VertexField a;
  double beta = 1.0;
  int K = 0;
  std::vector<double> probs;   // mixed radix over interior vertices, digit 0 <-> -K
  double log_partition = 0.0;  // log of the unnormalised window sum
  double tail_mass = 0.0;      // mass on states touching |m_v| = K

  std::size_t size() const { return probs.size(); }
  IntegerField state(std::size_t index) const;
  std::size_t index_of(const IntegerField& m) const;
  /// Law of m at vertex v, indexed by m + K.
  std::vector<double> marginal(int v) const;
  double expectation(const std::function<double(const IntegerField&)>& g) const;
};

inline constexpr std::size_t kMaxEnumerationStates = std::size_t{1} << 25;

IvDistributionTable enumerate_exact(const Lattice& lattice, const VertexField& a, double beta, int K);
IvDistributionTable enumerate_exact(const PhaseField& a, double beta, int K);

struct ChainConfig {
  int burn_in = 1000;
  int samples = 100;  // recorded states per chain after burn-in
  int thin = 10;
  double rhat_threshold = 1.1;
};

struct PairResult {
  IntegerField m1;
  IntegerField m2;
  double rhat = 1.0;
  bool converged = true;
};

using PairObserver = std::function<void(const IntegerField&, const IntegerField&)>;

/// Runs two independent chains for the same phase data. Chain 1 starts from
/// the ground state; chain 2 from init2 when given, otherwise from a
/// randomised unwrap followed by descent. The observer sees every recorded
/// pair of states. The diagnostic is the split R-hat of phi at the centre
/// vertex and, when f is given, of <phi, f>.
PairResult sample_pair(const PhaseField& a, double beta, const ChainConfig& config, Rng& rng,
                       const IntegerField* init2 = nullptr, const PairObserver& observer = {},
                       const VertexField* f = nullptr);

}  // namespace gffmod
