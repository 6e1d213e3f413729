#include "gffmod/phase.hpp"

#include <cmath>
#include <numbers>

namespace gffmod {

double beta_of(double T) {
  if (!(T > 0.0)) throw Error("temperature must be positive");
  const double r = 2.0 * std::numbers::pi / T;
  return r * r;
}

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0 - 1e-12) r = 0.0;
  return r;
}

PhaseField observe(const Lattice& lattice, const VertexField& phi, double T) {
  if (static_cast<int>(phi.size()) != lattice.num_vertices()) throw Error("field does not match lattice");
  PhaseField out{lattice, T, VertexField(lattice.num_vertices())};
  const double scale = T / (2.0 * std::numbers::pi);
  for (int v = 0; v < lattice.num_vertices(); ++v)
    out.a[v] = lattice.is_boundary(v) ? 0.0 : wrap_unit(scale * phi[v]);
  return out;
}

VertexField lift(const IntegerField& m, const PhaseField& a) {
  if (m.size() != a.a.size()) throw Error("integer field and phase field do not match");
  VertexField phi(m.size());
  const double scale = 2.0 * std::numbers::pi / a.T;
  for (std::size_t v = 0; v < m.size(); ++v) phi[v] = scale * (m[v] + a.a[v]);
  return phi;
}

IntegerField true_heights(const PhaseField& a, const VertexField& phi) {
  if (phi.size() != a.a.size()) throw Error("field and phase field do not match");
  IntegerField m(phi.size());
  const double scale = a.T / (2.0 * std::numbers::pi);
  for (std::size_t v = 0; v < phi.size(); ++v) m[v] = static_cast<int>(std::lround(scale * phi[v] - a.a[v]));
  return m;
}

}  // namespace gffmod
