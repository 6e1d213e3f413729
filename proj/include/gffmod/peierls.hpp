#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gffmod/iv_gff.hpp"
#include "gffmod/lattice.hpp"
#include "gffmod/reconstruction.hpp"
#include "gffmod/stats.hpp"

namespace gffmod {

/// Partition of the vertices into the agreement set I (label 0) and the
/// connected components of its complement (labels 1, 2, ... ordered by their
/// smallest vertex). When I is empty every vertex carries label 1.
struct ComponentMap {
  std::vector<int> label;
  std::optional<int> m_I;    // free boundary: m2 - m1 on I
  std::vector<int> diam;     // graph diameter per label (0 for an empty I)
  std::vector<int> extent;   // l-infinity extent in lattice steps per label
  bool empty_I = false;

  int num_labels() const { return static_cast<int>(diam.size()); }
  bool in_I(int v) const { return label[v] == 0; }
  /// Vertices of O(v), empty when v lies in I.
  std::vector<int> cluster(int v) const;
};

/// Connected components of the vertices with mask[v] != 0 by union-find.
/// Returns -1 outside the mask; labels follow the smallest member index.
std::vector<int> label_components(const Lattice& lattice, const std::vector<char>& mask);
/// Same labelling by breadth-first search.
std::vector<int> label_components_bfs(const Lattice& lattice, const std::vector<char>& mask);

/// Graph diameter of the subgraph induced by vertices. Exact (BFS from every
/// vertex) up to 2000 vertices; above that the larger of a double sweep and
/// the l-infinity extent, both lower bounds.
int component_diameter(const Lattice& lattice, const std::vector<int>& vertices);
int component_extent(const Lattice& lattice, const std::vector<int>& vertices);

ComponentMap agreement_dirichlet(const IntegerField& m1, const IntegerField& m2, const Lattice& lattice);

/// Free boundary: for each offset k = m2 - m1 the largest component of
/// {m2 - m1 = k} is a candidate (ties to the component holding the smallest
/// vertex). Exactly one candidate with diameter > n/2 becomes I; two or more,
/// or none, leave I empty.
ComponentMap agreement_free(const IntegerField& m1, const IntegerField& m2, const Lattice& lattice);

inline ComponentMap agreement(const IntegerField& m1, const IntegerField& m2, const Lattice& lattice) {
  return lattice.is_free() ? agreement_free(m1, m2, lattice) : agreement_dirichlet(m1, m2, lattice);
}

struct GradientRuleCheck {
  long edges_checked = 0;
  long violations = 0;
};

/// Every edge joining I to its complement must carry a gradient of size at
/// least pi/T on one of the two lifts.
GradientRuleCheck check_gradient_rule(const ComponentMap& map, const IntegerField& m1, const IntegerField& m2,
                                      const PhaseField& a);

struct TailResult {
  std::vector<int> L;             // 0 .. 2n
  std::vector<double> survival;   // P(extent O(x) >= L), empty clusters excluded
  LinearFit fit;                  // log survival against L over the positive part
  double rate = 0.0;              // -fit.slope
  bool degenerate = false;        // fewer than three positive survival values
  int n_pairs = 0;         // independent coupled pairs (disorders x pairs per disorder)
  long n_observations = 0; // recorded pair states entering the curve
  GradientRuleCheck gradient_rule;
};

/// Survival curve of the l-infinity extent of the disagreement cluster of x
/// over coupled pairs drawn as in conditional_variance. Every recorded pair
/// state contributes one observation.
TailResult cluster_tail(const Lattice& lattice, double T, int x, const DisorderConfig& config);

}  // namespace gffmod
