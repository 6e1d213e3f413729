#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "gffmod/lattice.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/theta.hpp"

using namespace gffmod;

namespace {

constexpr double kPi = std::numbers::pi;

// E[Z | Z mod 1 = a] for Z ~ N(0, 1/beta) and the wrapped density, by brute force.
void oracle_unit(double beta, double a, double& density, double& cmean) {
  double w0 = 0.0, w1 = 0.0;
  for (int k = -200; k <= 200; ++k) {
    const double x = k + a;
    const double w = std::exp(-0.5 * beta * x * x);
    w0 += w;
    w1 += w * x;
  }
  density = w0 * std::sqrt(beta / (2.0 * kPi));
  cmean = w1 / w0;
}

double sigma_oracle(double T, int nodes) {
  const double beta = 4.0 * kPi * kPi / (T * T);
  double s = 0.0;
  for (int i = 0; i < nodes; ++i) {
    double p, m;
    oracle_unit(beta, (i + 0.5) / nodes, p, m);
    s += p * beta * m * m;
  }
  return s / nodes;
}

}  // namespace

TEST_CASE("conditional mean: primal and dual agree on random points") {
  Rng rng = make_rng(1);
  std::uniform_real_distribution<double> A(-kPi, kPi), B(-3.0, 2.5);
  int thrown = 0;
  for (int i = 0; i < 300; ++i) {
    const double beta = std::pow(10.0, B(rng)), a = A(rng);
    double dual = 0.0;
    try {
      dual = cond_mean_dual(beta, a);
    } catch (const Error&) {
      ++thrown;
      CHECK(beta * a * a / 2.0 > 100.0);
      continue;
    }
    CHECK(std::abs(cond_mean_primal(beta, a) - dual) < 1e-10);
  }
  CHECK(thrown < 300);
}

TEST_CASE("conditional mean: dual escalates precision instead of returning garbage") {
  CHECK(cond_mean_dual(30.0, -3.0) == doctest::Approx(cond_mean_primal(30.0, -3.0)).epsilon(1e-12));
  CHECK(cond_mean_dual(60.0, 2.5) == doctest::Approx(cond_mean_primal(60.0, 2.5)).epsilon(1e-12));
  CHECK_THROWS_AS(cond_mean_dual(316.0, 3.0), Error);
}

TEST_CASE("conditional mean symmetries") {
  CHECK(cond_mean_primal(0.7, 0.0) == doctest::Approx(0.0));
  CHECK(cond_mean_dual(0.7, 0.0) == 0.0);
  for (double a : {0.3, 1.1, 2.9}) {
    CHECK(cond_mean_dual(0.4, -a) == doctest::Approx(-cond_mean_dual(0.4, a)));
    CHECK(cond_mean_primal(0.4, -a) == doctest::Approx(-cond_mean_primal(0.4, a)));
  }
  // large beta: the fibre point closest to zero dominates
  CHECK(cond_mean_primal(50.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // small beta: the dual sum stays well behaved
  CHECK(std::isfinite(cond_mean_dual(0.05, 2.0)));
}

TEST_CASE("Jacobi theta basics") {
  const Complex tau(0.0, 1.3);
  const Complex z(0.21, 0.1);
  CHECK(std::abs(jacobi_theta(z + 1.0, tau).value - jacobi_theta(z, tau).value) < 1e-12);
  // quasi-periodicity in tau
  const Complex lhs = jacobi_theta(z + tau, tau).value;
  const Complex rhs = std::exp(-Complex(0.0, kPi) * tau - Complex(0.0, 2.0 * kPi) * z) * jacobi_theta(z, tau).value;
  CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
  CHECK_THROWS_AS(jacobi_theta(z, Complex(0.0, -1.0)), Error);
}

TEST_CASE("Riemann theta of a diagonal matrix factorises") {
  Eigen::MatrixXcd Om = Eigen::MatrixXcd::Zero(2, 2);
  Om(0, 0) = Complex(0.1, 1.2);
  Om(1, 1) = Complex(-0.2, 0.8);
  Eigen::VectorXcd z(2);
  z << Complex(0.3, 0.05), Complex(-0.1, 0.2);
  const Complex prod = jacobi_theta(z[0], Om(0, 0)).value * jacobi_theta(z[1], Om(1, 1)).value;
  CHECK(std::abs(riemann_theta(z, Om).value - prod) < 1e-13 * std::abs(prod));
}

TEST_CASE("sigma(T) against a brute-force midpoint oracle") {
  for (double T : {0.5, 1.0, 2.0, 3.0}) {
    const double a = sigma_oracle(T, 400), b = sigma_oracle(T, 800);
    CHECK(std::abs(a - b) < 1e-10 * b);
    CHECK(sigma_T(T) == doctest::Approx(b).epsilon(1e-9));
    CHECK(sigma_T(T) > 0.0);
  }
  for (double T : {1.0, 2.0, 2.5, 3.0}) CHECK(sigma_T_primal(T) == doctest::Approx(sigma_T_dual(T)).epsilon(1e-12));
  // nothing is lost at small T
  CHECK(sigma_T(0.3) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(sigma_T(0.0), Error);
}

TEST_CASE("edge conditional mean is a contraction in mean square") {
  Rng rng = make_rng(2);
  std::normal_distribution<double> N;
  double s = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) s += std::pow(edge_conditional_mean(3.0, N(rng)), 2);
  CHECK(s / n == doctest::Approx(sigma_T(3.0)).epsilon(0.1));
  CHECK(edge_conditional_mean(0.1, 0.7) == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("information bound") {
  const Lattice L = Lattice::square(4);
  const auto zero = information_bound_check(L, 3.0, VertexField(L.num_vertices()), 10, 1);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  VertexField f(L.num_vertices());
  f[L.center()] = 1.0;
  const auto r = information_bound_check(L, 3.0, f, 2000, 2);
  CHECK(r.lhs <= r.second_moment);
  CHECK(r.ratio > 0.5);
  CHECK(r.ratio < 2.0);
}

TEST_CASE("modular invariance on one interior vertex and at a = 0") {
  const Lattice L = Lattice::rectangle(3, 3);
  VertexField f(L.num_vertices()), a(L.num_vertices());
  f[4] = 1.0;
  a[4] = 0.37;
  CHECK(modular_invariance_check(L, 0.5, a, f).gap < 1e-8);
  const Lattice L4 = Lattice::rectangle(4, 4);
  VertexField f4(L4.num_vertices());
  f4[L4.interior_vertex(1)] = 1.0;
  const auto z = modular_invariance_check(L4, 0.5, VertexField(L4.num_vertices()), f4);
  CHECK(z.lhs == doctest::Approx(0.0));
  CHECK(z.rhs == doctest::Approx(0.0));
  CHECK_THROWS_AS(modular_invariance_check(Lattice::square(2), 0.5, VertexField(25), VertexField(25)), Error);
}
