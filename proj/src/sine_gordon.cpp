#include "gffmod/sine_gordon.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "gffmod/gff.hpp"
#include "gffmod/iv_gff.hpp"
#include "gffmod/parallel.hpp"
#include "gffmod/stats.hpp"

namespace gffmod {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double sg_log_density(const Lattice& lattice, const VertexField& phi, const VertexField& a, double beta, double z) {
  double s = -0.5 * beta * dirichlet_energy(lattice, phi);
  for (int v : lattice.interior_vertices()) s += z * std::cos(phi[v] - a[v]);
  return s;
}

double sg_site_log_ratio(const Lattice& lattice, const VertexField& phi, const VertexField& a, double beta,
                         double z, int v, double y) {
  const double x = phi[v];
  double d = 0.0;
  for (int u : lattice.neighbors(v)) d += (y - phi[u]) * (y - phi[u]) - (x - phi[u]) * (x - phi[u]);
  return -0.5 * beta * d + z * (std::cos(y - a[v]) - std::cos(x - a[v]));
}

SgChain::SgChain(Lattice lattice, VertexField a, const SgConfig& config, VertexField init, Rng rng)
    : lattice_(std::move(lattice)), a_(std::move(a)), cfg_(config), phi_(std::move(init)), rng_(std::move(rng)) {
  if (cfg_.pinned()) throw Error("Metropolis chain needs finite activity; use the integer sampler for z = infinity");
  if (!(cfg_.beta > 0.0) || cfg_.z < 0.0) throw Error("Sine-Gordon needs beta > 0 and z >= 0");
  const int nv = lattice_.num_vertices();
  if (static_cast<int>(a_.size()) != nv || static_cast<int>(phi_.size()) != nv)
    throw Error("Sine-Gordon fields do not match lattice");
  scale_.assign(nv, 0.0);
  for (int v : lattice_.interior_vertices()) scale_[v] = 1.0 / std::sqrt(cfg_.beta * lattice_.degree(v));
  accepted_.assign(nv, 0);
  proposed_.assign(nv, 0);
}

void SgChain::sweep(bool adapt) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int v : lattice_.interior_vertices()) {
    const double y = phi_[v] + scale_[v] * normal(rng_);
    const double r = sg_site_log_ratio(lattice_, phi_, a_, cfg_.beta, cfg_.z, v, y);
    ++proposed_[v];
    ++total_proposed_;
    if (r >= 0.0 || std::log(unif(rng_)) < r) {
      phi_[v] = y;
      ++accepted_[v];
      ++total_accepted_;
    }
  }
  if (adapt && ++since_adapt_ >= cfg_.adapt_interval) {
    since_adapt_ = 0;
    for (int v : lattice_.interior_vertices()) {
      const double rate = static_cast<double>(accepted_[v]) / std::max(proposed_[v], 1);
      if (rate < 0.3) scale_[v] *= 0.8;
      if (rate > 0.5) scale_[v] *= 1.25;
      accepted_[v] = proposed_[v] = 0;
    }
  }
}

double SgChain::acceptance_rate() const {
  return total_proposed_ > 0 ? static_cast<double>(total_accepted_) / total_proposed_ : 0.0;
}

VertexField draw_disorder(const Lattice& lattice, const SgConfig& config, Rng& rng) {
  VertexField a(lattice.num_vertices());
  if (config.disorder == DisorderKind::Uniform) {
    std::uniform_real_distribution<double> unif(0.0, kTwoPi);
    for (int v : lattice.interior_vertices()) a[v] = unif(rng);
  } else {
    const VertexField phi = GffSampler(lattice).sample(rng);
    for (int v : lattice.interior_vertices()) {
      double r = std::fmod(config.T * phi[v], kTwoPi);
      if (r < 0.0) r += kTwoPi;
      if (r >= kTwoPi) r = 0.0;
      a[v] = r;
    }
  }
  return a;
}

std::vector<SgProfileRow> variance_profile(const SgConfig& config, const std::vector<int>& ns, int n_disorder,
                                           std::uint64_t seed, int threads) {
  std::vector<SgProfileRow> rows;
  for (int n : ns) {
    const Lattice L = Lattice::square(n);
    const int c = L.center();
    const GffSampler sampler(L);
    struct Out {
      double m1 = 0.0, m2 = 0.0, acc = 0.0;
    };
    const auto outs = parallel_map(
        static_cast<std::size_t>(n_disorder),
        [&](std::size_t d) {
          Rng rng = make_rng(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d)});
          const VertexField a = draw_disorder(L, config, rng);
          std::vector<double> xs;
          Out o;
          if (config.pinned()) {
            PhaseField pf{L, 1.0, a};
            for (double& v : pf.a) v = wrap_unit(v / kTwoPi);
            IvGibbsChain chain(pf, 4.0 * std::numbers::pi * std::numbers::pi * config.beta, ground_state(pf).m,
                               make_rng(rng()));
            chain.run(config.burn_in);
            for (int s = 0; s < config.samples; ++s) {
              chain.run(config.thin);
              xs.push_back(kTwoPi * (chain.state()[c] + pf.a[c]));
            }
            o.acc = 1.0;
          } else {
            VertexField init = sampler.sample(rng);
            for (double& v : init) v /= std::sqrt(config.beta);
            SgChain chain(L, a, config, std::move(init), make_rng(rng()));
            for (int s = 0; s < config.burn_in; ++s) chain.sweep(true);
            for (int s = 0; s < config.samples; ++s) {
              for (int t = 0; t < config.thin; ++t) chain.sweep(false);
              xs.push_back(chain.state()[c]);
            }
            o.acc = chain.acceptance_rate();
          }
          std::vector<double> sq(xs.size());
          for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = xs[i] * xs[i];
          o.m1 = mean(xs);
          o.m2 = mean(sq);
          return o;
        },
        threads);
    std::vector<double> m1, m2, acc;
    for (const auto& o : outs) {
      m1.push_back(o.m1);
      m2.push_back(o.m2);
      acc.push_back(o.acc);
    }
    const double mu = mean(m1);
    SgProfileRow row;
    row.n = n;
    row.variance = mean(m2) - mu * mu;
    row.std_error = std_error(m2);
    row.gff_reference = green(L, c, c) / config.beta;
    row.n_disorder = n_disorder;
    row.acceptance = mean(acc);
    rows.push_back(row);
  }
  return rows;
}

double pinned_annealed_tv(const Lattice& lattice, double T, int K) {
  if (lattice.num_interior() != 1) throw Error("pinned annealed check needs exactly one interior vertex");
  const int c = lattice.interior_vertex(0);
  const double beta = 1.0 / (T * T);
  const double var = green(lattice, c, c) / beta;  // law of phi(c) and of the disorder field
  const double beta_iv = 4.0 * std::numbers::pi * std::numbers::pi * beta;
  auto gauss = [&](double x) { return std::exp(-0.5 * x * x / var) / std::sqrt(kTwoPi * var); };
  auto disorder_density = [&](double a) {
    double p = 0.0;
    const int span = static_cast<int>(std::ceil(12.0 * std::sqrt(var) / kTwoPi)) + 2;
    for (int j = -span; j <= span; ++j) p += gauss(a + kTwoPi * j);
    return p;
  };
  auto integrand = [&](double a) {
    VertexField shift(lattice.num_vertices());
    shift[c] = a / kTwoPi;
    const auto marg = enumerate_exact(lattice, shift, beta_iv, K).marginal(c);
    const double pa = disorder_density(a);
    double s = 0.0;
    for (int k = -K; k <= K; ++k) s += std::abs(pa * marg[k + K] - gauss(kTwoPi * k + a));
    return s;
  };
  const double inside = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, kTwoPi, 12, 1e-14);
  // mass of the Gaussian outside the enumerated fibres
  const double edge = kTwoPi * K;
  const double outside = std::erfc((edge) / std::sqrt(2.0 * var)) * 0.5 +
                         std::erfc((edge + kTwoPi) / std::sqrt(2.0 * var)) * 0.5;
  return 0.5 * (inside + outside);
}

}  // namespace gffmod
