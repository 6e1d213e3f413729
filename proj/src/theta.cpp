#include "gffmod/theta.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gffmod/iv_gff.hpp"
#include "gffmod/rng.hpp"
#include "gffmod/stats.hpp"

namespace gffmod {

namespace mp = boost::multiprecision;
using Real50 = mp::cpp_bin_float_50;
using Complex50 = mp::cpp_complex_50;
using Complex150 = mp::cpp_complex<150>;
using Real150 = mp::number<mp::cpp_bin_float<150>>;

namespace {

constexpr double kPi = std::numbers::pi;

template <class C>
C make_complex(double re, double im) {
  return C(re, im);
}

double to_double(double x) { return x; }
double to_double(const Real50& x) { return x.convert_to<double>(); }
double to_double(const Real150& x) { return x.convert_to<double>(); }
template <class C>
Complex to_complex(const C& z) {
  return {z.real().template convert_to<double>(), z.imag().template convert_to<double>()};
}

template <class R>
R pi_of() {
  return boost::math::constants::pi<R>();
}

// Adds terms outward from the largest until they fall below log_eps relative
// to it. log_mag(n) is the log-magnitude of term n in double precision.
template <class C, class Term, class LogMag>
C sum_outward(long centre, Term term, LogMag log_mag, double log_eps, double& abs_sum, double& tail, int& count) {
  const double top = log_mag(centre);
  C s = term(centre);
  abs_sum = std::exp(log_mag(centre) - top);
  count = 1;
  tail = 0.0;
  for (int dir : {1, -1}) {
    for (long n = centre + dir;; n += dir) {
      const double lm = log_mag(n) - top;
      if (lm < log_eps) {
        tail = std::max(tail, 2.0 * std::exp(lm + top));
        break;
      }
      s += term(n);
      abs_sum += std::exp(lm);
      ++count;
    }
  }
  abs_sum *= std::exp(top);
  return s;
}

template <class C>
C jacobi_terms(Complex z, Complex tau, double log_eps, double& abs_sum, double& tail, int& count) {
  using R = typename C::value_type;
  const R pi = pi_of<R>();
  const C zz = make_complex<C>(z.real(), z.imag());
  const C tt = make_complex<C>(tau.real(), tau.imag());
  const C i = make_complex<C>(0.0, 1.0);
  auto term = [&](long n) {
    using std::exp;
    const R rn = R(static_cast<double>(n));
    return C(exp(i * pi * rn * rn * tt + R(2) * i * pi * rn * zz));
  };
  auto log_mag = [&](long n) {
    const double d = static_cast<double>(n);
    return -kPi * d * d * tau.imag() - 2.0 * kPi * d * z.imag();
  };
  const long centre = std::lround(-z.imag() / tau.imag());
  return sum_outward<C>(centre, term, log_mag, log_eps, abs_sum, tail, count);
}

template <class C>
C riemann_terms(const Eigen::VectorXcd& z, const Eigen::MatrixXcd& Omega, double log_eps, double& abs_sum,
                double& tail, int& count) {
  using R = typename C::value_type;
  const int g = static_cast<int>(z.size());
  const Eigen::MatrixXd Y = Omega.imag();
  const Eigen::VectorXd y = z.imag();
  const Eigen::VectorXd centre = -Y.ldlt().solve(y);
  const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Y).eigenvalues().minCoeff();
  const double budget = -log_eps + 5.0;
  const int radius = static_cast<int>(std::ceil(std::sqrt(budget / (kPi * lam)))) + 1;
  std::vector<std::vector<C>> om(g, std::vector<C>(g));
  std::vector<C> zz(g);
  for (int r = 0; r < g; ++r) {
    zz[r] = make_complex<C>(z[r].real(), z[r].imag());
    for (int c = 0; c < g; ++c) om[r][c] = make_complex<C>(Omega(r, c).real(), Omega(r, c).imag());
  }
  const R pi = pi_of<R>();
  const C i = make_complex<C>(0.0, 1.0);
  auto log_mag = [&](const Eigen::VectorXd& m) { return -kPi * m.dot(Y * m) - 2.0 * kPi * m.dot(y); };
  std::vector<long> lo(g);
  Eigen::VectorXd rc(g);
  for (int r = 0; r < g; ++r) {
    rc[r] = std::round(centre[r]);
    lo[r] = static_cast<long>(rc[r]) - radius;
  }
  const double top = log_mag(rc);
  C s = make_complex<C>(0.0, 0.0);
  abs_sum = 0.0;
  tail = 0.0;
  count = 0;
  using std::exp;
  auto term_at = [&](const Eigen::VectorXd& md) {
    C quad = make_complex<C>(0.0, 0.0);
    C lin = make_complex<C>(0.0, 0.0);
    for (int r = 0; r < g; ++r) {
      const R mr = R(md[r]);
      lin += mr * zz[r];
      for (int c = 0; c < g; ++c) quad += mr * R(md[c]) * om[r][c];
    }
    return C(exp(i * pi * quad + R(2) * i * pi * lin));
  };
  // Extended precision walks each row in m[0] with the ratio
  // t(m + e0) / t(m) = exp(i pi (2 (Omega m)_0 + Omega_00) + 2 i pi z_0).
  constexpr bool recur = !std::is_same_v<C, Complex>;
  const C step = C(exp(R(2) * i * pi * om[0][0]));
  std::vector<long> m(lo);
  Eigen::VectorXd md(g);
  for (;;) {
    for (int r = 0; r < g; ++r) md[r] = static_cast<double>(m[r]);
    C t = make_complex<C>(0.0, 0.0), ratio = t;
    if (recur) {
      t = term_at(md);
      C row = om[0][0];
      for (int c = 0; c < g; ++c) row += R(2) * R(md[c]) * om[0][c];
      ratio = C(exp(i * pi * row + R(2) * i * pi * zz[0]));
    }
    for (long k = 0; k <= 2 * radius; ++k) {
      md[0] = static_cast<double>(lo[0] + k);
      const double lm = log_mag(md) - top;
      if (lm >= log_eps) {
        s += recur ? t : term_at(md);
        abs_sum += std::exp(lm + top);
        ++count;
      } else {
        tail = std::max(tail, std::exp(lm + top));
      }
      if (recur) {
        t *= ratio;
        ratio *= step;
      }
    }
    int r = 1;
    while (r < g && ++m[r] > lo[r] + 2 * radius) {
      m[r] = lo[r];
      ++r;
    }
    if (r >= g) break;
  }
  tail *= 2.0;
  return s;
}

template <class R>
void dual_sums(double beta, double a, double log_eps, R& num, R& den, double& abs_num, double& abs_den) {
  using std::cos;
  using std::exp;
  using std::sin;
  const double qmax = std::sqrt(-2.0 * beta * log_eps) + 1.0;
  const R rb = R(beta), ra = R(a);
  num = R(0);
  den = R(0);
  abs_num = abs_den = 0.0;
  for (long q = -static_cast<long>(qmax); q <= static_cast<long>(qmax); ++q) {
    const R rq = R(static_cast<double>(q));
    const R w = exp(-rq * rq / (R(2) * rb));
    const R tn = w * rq * sin(rq * ra);
    const R td = w * cos(rq * ra);
    num += tn;
    den += td;
    abs_num += std::abs(to_double(tn));
    abs_den += std::abs(to_double(td));
  }
}

// Wrapped-Gaussian density of Z mod 1 and the conditional mean E[Z | a] for
// Z ~ N(0, 1/beta), by direct sums over k + a.
void primal_unit(double beta, double a, double& density, double& cmean) {
  const int span = static_cast<int>(std::ceil(std::sqrt(80.0 / beta))) + 2;
  double w0 = 0.0, w1 = 0.0;
  for (int k = -span; k <= span; ++k) {
    const double x = k + a;
    const double w = std::exp(-0.5 * beta * x * x);
    w0 += w;
    w1 += w * x;
  }
  density = std::sqrt(beta / (2.0 * kPi)) * w0;
  cmean = w0 > 0.0 ? w1 / w0 : 0.0;
}

}  // namespace

ThetaValue jacobi_theta(Complex z, Complex tau) {
  if (!(tau.imag() > 0.0)) throw Error("theta needs Im(tau) > 0");
  ThetaValue out;
  double abs_sum = 0.0;
  out.value = jacobi_terms<Complex>(z, tau, std::log(1e-17), abs_sum, out.tail_bound, out.terms);
  if (std::abs(out.value) < 1e-2 * abs_sum) {
    out.value = to_complex(jacobi_terms<Complex50>(z, tau, std::log(1e-45), abs_sum, out.tail_bound, out.terms));
    out.extended_precision = true;
  }
  if (std::abs(out.value) < 1e-28 * abs_sum)
    out.value = to_complex(jacobi_terms<Complex150>(z, tau, std::log(1e-140), abs_sum, out.tail_bound, out.terms));
  return out;
}

ThetaValue riemann_theta(const Eigen::VectorXcd& z, const Eigen::MatrixXcd& Omega) {
  const int g = static_cast<int>(z.size());
  if (g < 1 || Omega.rows() != g || Omega.cols() != g) throw Error("Riemann theta dimension mismatch");
  if ((Omega - Omega.transpose()).norm() > 1e-12 * Omega.norm()) throw Error("Riemann theta needs symmetric Omega");
  Eigen::LLT<Eigen::MatrixXd> llt(Omega.imag());
  if (llt.info() != Eigen::Success) throw Error("Riemann theta needs Im(Omega) positive definite");
  ThetaValue out;
  double abs_sum = 0.0;
  out.value = riemann_terms<Complex>(z, Omega, std::log(1e-17), abs_sum, out.tail_bound, out.terms);
  if (std::abs(out.value) < 1e-2 * abs_sum) {
    out.value = to_complex(riemann_terms<Complex50>(z, Omega, std::log(1e-45), abs_sum, out.tail_bound, out.terms));
    out.extended_precision = true;
  }
  if (std::abs(out.value) < 1e-28 * abs_sum)
    out.value = to_complex(riemann_terms<Complex150>(z, Omega, std::log(1e-140), abs_sum, out.tail_bound, out.terms));
  return out;
}

double cond_mean_primal(double beta, double a) {
  if (!(beta > 0.0)) throw Error("inverse temperature must be positive");
  const int span = static_cast<int>(std::ceil((std::sqrt(2.0 * 40.0 / beta) + kPi) / (2.0 * kPi))) + 1;
  double w0 = 0.0, w1 = 0.0;
  for (int n = -span; n <= span; ++n) {
    const double x = 2.0 * kPi * n + a;
    const double w = std::exp(-0.5 * beta * (x * x - a * a));
    w0 += w;
    w1 += w * x;
  }
  return w1 / w0;
}

// Evaluates at the given precision; false when either sum cancels below
// what that precision resolves.
template <class R>
bool dual_ratio(double beta, double a, double digits, double& out) {
  R num, den;
  double abs_num = 0.0, abs_den = 0.0;
  dual_sums<R>(beta, a, std::log(std::pow(10.0, 2.0 - digits)), num, den, abs_num, abs_den);
  const double floor = std::pow(10.0, 15.0 - digits);
  const double n = std::abs(to_double(num)), d = std::abs(to_double(den));
  if (d < floor * abs_den || (n < floor * abs_num && n > 0.0)) return false;
  out = to_double(num / (den * R(beta)));
  return true;
}

double cond_mean_dual(double beta, double a) {
  if (!(beta > 0.0)) throw Error("inverse temperature must be positive");
  double out = 0.0;
  if (dual_ratio<double>(beta, a, 17.0, out)) return out;
  if (dual_ratio<Real50>(beta, a, 50.0, out)) return out;
  if (dual_ratio<Real150>(beta, a, 150.0, out)) return out;
  throw Error("dual series cancels beyond 150 digits; use cond_mean_primal");
}

double sigma_T_asymptote(double T) { return 2.0 * T * T * std::exp(-T * T); }

double sigma_T_primal(double T) {
  const double beta = 4.0 * kPi * kPi / (T * T);
  auto f = [&](double a) {
    double p = 0.0, m = 0.0;
    primal_unit(beta, a, p, m);
    return p * beta * m * m;
  };
  return boost::math::quadrature::trapezoidal(f, 0.0, 1.0, 1e-13, 24u);
}

namespace {

double dual_excess(double T) {
  const double t2 = T * T;
  const int qmax = static_cast<int>(std::ceil(std::sqrt(2.0 * 80.0 / t2 + 1.0))) + 1;
  auto f = [&](double a) {
    const double s1 = std::sin(2.0 * kPi * a);
    double hi = 0.0, cm1 = 0.0;  // sum_{q>=2} of s-tilde, and C - 1
    for (int q = 1; q <= qmax; ++q) {
      cm1 += 2.0 * std::exp(-0.5 * q * q * t2) * std::cos(2.0 * kPi * q * a);
      if (q >= 2) hi += q * std::exp(-0.5 * (q * q - 1.0) * t2) * std::sin(2.0 * kPi * q * a);
    }
    const double c = 1.0 + cm1;
    return 2.0 * (hi * (hi + 2.0 * s1) - s1 * s1 * cm1) / c;
  };
  return boost::math::quadrature::trapezoidal(f, 0.0, 1.0, 1e-13, 24u);
}

}  // namespace

double sigma_T_dual(double T) { return sigma_T_asymptote(T) * (1.0 + dual_excess(T)); }

double sigma_T(double T) {
  if (!(T > 0.0)) throw Error("temperature must be positive");
  return T < 2.0 ? sigma_T_primal(T) : sigma_T_dual(T);
}

double sigma_T_excess(double T) {
  if (!(T > 0.0)) throw Error("temperature must be positive");
  return T < 2.0 ? sigma_T_primal(T) / sigma_T_asymptote(T) - 1.0 : dual_excess(T);
}

double edge_conditional_mean(double T, double w) {
  const double x = T * w;
  double a = std::remainder(x, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return cond_mean_primal(1.0 / (T * T), a) / T;
}

InformationBound information_bound_check(const Lattice& lattice, double T, const VertexField& f, int samples,
                                         std::uint64_t seed) {
  if (samples < 2) throw Error("information bound needs at least two samples");
  const VertexField u = solve_poisson(lattice, f);
  const EdgeField g = gradient(lattice, u);
  InformationBound out;
  out.rhs = sigma_T(T) * dot(f, u);
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> lhs(samples), second(samples), terms(g.size()), raw(g.size());
  for (int s = 0; s < samples; ++s) {
    for (std::size_t e = 0; e < g.size(); ++e) {
      const double w = normal(rng);
      raw[e] = g[e] * w;
      terms[e] = g[e] == 0.0 ? 0.0 : g[e] * edge_conditional_mean(T, w);
    }
    const double c = pairwise_sum(terms);
    const double p = pairwise_sum(raw);
    lhs[s] = c * c;
    second[s] = p * p;
  }
  out.lhs = mean(lhs);
  out.lhs_std_error = std_error(lhs);
  out.second_moment = mean(second);
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

ModularCheck modular_invariance_check(const Lattice& lattice, double beta, const VertexField& a,
                                      const VertexField& f, int K, double h) {
  if (lattice.num_interior() > 4) throw Error("modular invariance check is limited to 4 interior vertices");
  if (K > 8) throw Error("modular invariance check is limited to window 8");
  const int nv = lattice.num_vertices();
  const double beta_iv = 4.0 * kPi * kPi * beta;
  VertexField sigma = solve_poisson(lattice, f);
  for (double& s : sigma) s /= beta;

  ModularCheck out;
  const auto table = enumerate_exact(lattice, a, beta_iv, K);
  out.lhs = 2.0 * kPi * table.expectation([&](const IntegerField& m) {
    double s = 0.0;
    for (int v = 0; v < nv; ++v) s += (m[v] + a[v]) * f[v];
    return s;
  });
  // log Z as a function of t for fibres 2 pi Z + 2 pi a + t sigma
  auto log_z = [&](double t) {
    VertexField shifted = a;
    for (int v = 0; v < nv; ++v) shifted[v] += t * sigma[v] / (2.0 * kPi);
    return enumerate_exact(lattice, shifted, beta_iv, K).log_partition;
  };
  auto central = [&](double step) { return (log_z(step) - log_z(-step)) / (2.0 * step); };
  const double d = (4.0 * central(h) - central(2.0 * h)) / 3.0;
  out.rhs = -d;
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace gffmod
