#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

#include "gffmod/lattice.hpp"

namespace gffmod {

using Complex = std::complex<double>;

struct ThetaValue {
  Complex value;
  double tail_bound = 0.0;  // magnitude of the largest omitted term times 2
  int terms = 0;
  bool extended_precision = false;  // recomputed with 50 digits after cancellation
};

/// theta(z | tau) = sum_n exp(i pi n^2 tau + 2 i pi n z), Im tau > 0. Terms
/// are added outward from the largest one until they fall below 1e-17 of it.
ThetaValue jacobi_theta(Complex z, Complex tau);

/// theta(z | Omega) = sum_{m in Z^g} exp(i pi m^T Omega m + 2 i pi m^T z) for
/// symmetric Omega with positive-definite imaginary part.
ThetaValue riemann_theta(const Eigen::VectorXcd& z, const Eigen::MatrixXcd& Omega);

/// E[X | X mod 2 pi = a] for X ~ N(0, 1/beta), a in (-pi, pi], by the direct
/// sum over the fibre 2 pi Z + a.
double cond_mean_primal(double beta, double a);
/// The same quantity from the Poisson-dual sums
///   (1/beta) sum_q e^{-q^2/(2 beta)} q sin(q a) / sum_q e^{-q^2/(2 beta)} cos(q a),
/// escalating to 50 and 150 significant digits when either sum cancels.
/// Throws when even 150 digits cannot resolve the cancellation (large beta
/// with a near +-pi).
double cond_mean_dual(double beta, double a);

/// sigma(T) = beta_T E[E[Z | Z mod 1]^2], Z ~ N(0, 1/beta_T): the variance of
/// the conditional mean of a standard normal given its value mod 2 pi / T.
double sigma_T(double T);
/// 2 T^2 exp(-T^2).
double sigma_T_asymptote(double T);
/// sigma_T(T) / sigma_T_asymptote(T) - 1, computed without cancellation for T >= 2.
double sigma_T_excess(double T);
/// The two quadrature routes behind sigma_T, exposed for cross-checks.
double sigma_T_primal(double T);
double sigma_T_dual(double T);

/// E[W | W mod 2 pi / T = w mod 2 pi / T] for W ~ N(0, 1).
double edge_conditional_mean(double T, double w);

struct InformationBound {
  double lhs = 0.0;            // E[E[<phi, f> | e^{iTW}]^2]
  double lhs_std_error = 0.0;
  double rhs = 0.0;            // sigma(T) <f, (-Delta)^{-1} f>
  double ratio = 0.0;          // lhs / rhs (0 when both vanish)
  double second_moment = 0.0;  // E[<phi, f>^2] from the same draws
};

/// Monte Carlo over white-noise draws W, using <phi, f> = <W, grad (-Delta)^{-1} f>
/// and edgewise conditional means.
InformationBound information_bound_check(const Lattice& lattice, double T, const VertexField& f, int samples,
                                         std::uint64_t seed);

struct ModularCheck {
  double lhs = 0.0;  // E[<phi, f>] over the fibres 2 pi (Z + a)
  double rhs = 0.0;  // -<sigma, grad_a log Z>, sigma = (1/beta)(-Delta)^{-1} f
  double gap = 0.0;
};

/// Both sides of the modular invariance identity on a tiny lattice. a is given
/// in unit-period form (fibres Z + a); the identity is evaluated with fibres
/// 2 pi Z + 2 pi a at inverse temperature beta. The derivative is a central
/// difference along sigma with one Richardson step (h and 2h).
ModularCheck modular_invariance_check(const Lattice& lattice, double beta, const VertexField& a,
                                      const VertexField& f, int K = 8, double h = 1e-4);

}  // namespace gffmod
