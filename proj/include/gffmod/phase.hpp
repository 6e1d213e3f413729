#pragma once

#include "gffmod/lattice.hpp"

namespace gffmod {

/// beta_T = (2 pi)^2 / T^2.
double beta_of(double T);

/// Reduces x into [0,1); values within 1e-12 of 1 become 0.
double wrap_unit(double x);

/// Observed phase data a = (T / 2 pi) phi mod 1.
struct PhaseField {
  Lattice lattice;
  double T = 1.0;
  VertexField a;

  double beta() const { return beta_of(T); }
};

PhaseField observe(const Lattice& lattice, const VertexField& phi, double T);

/// phi = (2 pi / T)(m + a).
VertexField lift(const IntegerField& m, const PhaseField& a);

/// The integer field m with lift(m, observe(phi)) == phi up to rounding.
IntegerField true_heights(const PhaseField& a, const VertexField& phi);

}  // namespace gffmod
