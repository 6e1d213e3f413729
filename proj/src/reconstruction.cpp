#include "gffmod/reconstruction.hpp"

#include <boost/math/quadrature/trapezoidal.hpp>

#include <cmath>
#include <numbers>

#include "gffmod/gff.hpp"
#include "gffmod/parallel.hpp"
#include "gffmod/stats.hpp"

namespace gffmod {

namespace {

VertexField recentred(const Lattice& lattice, VertexField f) {
  if (static_cast<int>(f.size()) != lattice.num_vertices()) throw Error("test function does not match lattice");
  if (!lattice.is_free()) return f;
  const double avg = mean(f.values());
  for (double& v : f) v -= avg;
  return f;
}

struct PairStats {
  std::vector<double> mean;  // per-statistic average over the recorded states
  double rhat = 1.0;
  bool converged = true;
};

struct DisorderStats {
  std::vector<double> value;  // average over converged pairs
  bool usable = false;
  int flagged = 0;
  int pairs = 0;
  double rhat_max = 1.0;
};

// Runs the disorder loop; stat(m1, m2, a, out) adds one recorded pair's
// statistics into out.
template <class Stat>
std::vector<DisorderStats> run_disorders(const Lattice& lattice, double T, const DisorderConfig& config,
                                         std::size_t n_stats, const VertexField* f, Stat stat) {
  const GffSampler sampler(lattice);
  const double beta = beta_of(T);
  return parallel_map(
      static_cast<std::size_t>(config.n_disorder),
      [&](std::size_t d) {
        Rng rng = make_rng(config.seed, {static_cast<std::uint64_t>(d)});
        const VertexField phi = sampler.sample(rng);
        const PhaseField a = observe(lattice, phi, T);
        const IntegerField truth = true_heights(a, phi);
        DisorderStats out;
        out.value.assign(n_stats, 0.0);
        std::vector<std::vector<double>> kept;
        for (int p = 0; p < config.pairs_per_disorder; ++p) {
          std::vector<double> acc(n_stats, 0.0);
          int recorded = 0;
          auto observer = [&](const IntegerField& m1, const IntegerField& m2) {
            stat(m1, m2, a, acc);
            ++recorded;
          };
          const PairResult r = sample_pair(a, beta, config.chain, rng, &truth, observer, f);
          ++out.pairs;
          out.rhat_max = std::max(out.rhat_max, r.rhat);
          if (!r.converged) {
            ++out.flagged;
            continue;
          }
          for (double& v : acc) v /= std::max(recorded, 1);
          kept.push_back(std::move(acc));
        }
        if (!kept.empty()) {
          out.usable = true;
          for (std::size_t k = 0; k < n_stats; ++k) {
            std::vector<double> col;
            for (const auto& row : kept) col.push_back(row[k]);
            out.value[k] = mean(col);
          }
        }
        return out;
      },
      config.threads);
}

VarianceEstimate summarise(const std::vector<DisorderStats>& rows, std::size_t k) {
  VarianceEstimate est;
  std::vector<double> vals;
  for (const auto& r : rows) {
    est.n_chain_pairs += r.pairs;
    est.n_flagged += r.flagged;
    est.rhat_max = std::max(est.rhat_max, r.rhat_max);
    if (r.usable) vals.push_back(r.value[k]);
  }
  est.n_disorder = static_cast<int>(vals.size());
  est.value = mean(vals);
  est.std_error = std_error(vals);
  return est;
}

}  // namespace

ReconResult reconstruct(const PhaseField& a, const ReconConfig& config, std::uint64_t seed) {
  const Lattice& L = a.lattice;
  const double beta = a.beta();
  const int nv = L.num_vertices();
  struct ChainOut {
    std::vector<double> sum, sum2, trace;
  };
  const auto chains = parallel_map(static_cast<std::size_t>(config.n_chains), [&](std::size_t c) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(c)});
    IntegerField init = c == 0 ? ground_state(a).m : ground_state(a, unwrap_lift(a, &rng)).m;
    IvGibbsChain chain(a, beta, std::move(init), make_rng(rng()));
    chain.run(config.chain.burn_in);
    ChainOut out{std::vector<double>(nv, 0.0), std::vector<double>(nv, 0.0), {}};
    for (int s = 0; s < config.chain.samples; ++s) {
      chain.run(config.chain.thin);
      const VertexField phi = lift(chain.state(), a);
      for (int v = 0; v < nv; ++v) {
        out.sum[v] += phi[v];
        out.sum2[v] += phi[v] * phi[v];
      }
      out.trace.push_back(phi[L.center()]);
    }
    return out;
  });
  ReconResult res;
  res.T = a.T;
  res.mean_field = VertexField(nv);
  res.per_site_var = VertexField(nv);
  res.n_samples = config.n_chains * config.chain.samples;
  if (res.n_samples == 0) throw Error("reconstruction needs at least one recorded sample");
  for (int v = 0; v < nv; ++v) {
    std::vector<double> s1, s2;
    for (const auto& c : chains) {
      s1.push_back(c.sum[v]);
      s2.push_back(c.sum2[v]);
    }
    const double m1 = pairwise_sum(s1) / res.n_samples;
    const double m2 = pairwise_sum(s2) / res.n_samples;
    res.mean_field[v] = m1;
    res.per_site_var[v] = std::max(0.0, m2 - m1 * m1);
  }
  if (config.chain.samples >= 4) {
    std::vector<std::vector<double>> traces;
    for (const auto& c : chains) traces.push_back(c.trace);
    res.rhat = split_rhat(traces);
    res.converged = res.rhat <= config.chain.rhat_threshold;
  }
  return res;
}

VarianceEstimate conditional_variance(const Lattice& lattice, const VertexField& f_in, double T,
                                      const DisorderConfig& config) {
  const VertexField f = recentred(lattice, f_in);
  const double scale = 2.0 * std::numbers::pi / T;
  bool zero = true;
  for (double v : f) zero = zero && v == 0.0;
  if (zero) {
    VarianceEstimate est;
    est.n_disorder = config.n_disorder;
    return est;
  }
  const int nv = lattice.num_vertices();
  auto rows = run_disorders(lattice, T, config, 1, &f,
                            [&](const IntegerField& m1, const IntegerField& m2, const PhaseField&,
                                std::vector<double>& acc) {
                              double s = 0.0;
                              for (int v = 0; v < nv; ++v) s += (m1[v] - m2[v]) * f[v];
                              s *= scale;
                              acc[0] += 0.5 * s * s;
                            });
  return summarise(rows, 0);
}

double conditional_variance_exact(const Lattice& lattice, const VertexField& f_in, double T, int K) {
  if (lattice.num_interior() != 1) throw Error("exact conditional variance needs exactly one interior vertex");
  const VertexField f = recentred(lattice, f_in);
  const int c = lattice.interior_vertex(0);
  const double s2 = green(lattice, c, c) * T * T / (4.0 * std::numbers::pi * std::numbers::pi);
  const double beta = beta_of(T);
  const double scale = 2.0 * std::numbers::pi / T;
  auto density = [&](double a) {
    double p = 0.0;
    const int span = static_cast<int>(std::ceil(12.0 * std::sqrt(s2))) + 2;
    for (int k = -span; k <= span; ++k) p += std::exp(-0.5 * (k + a) * (k + a) / s2);
    return p / std::sqrt(2.0 * std::numbers::pi * s2);
  };
  auto integrand = [&](double a) {
    VertexField shift(lattice.num_vertices());
    shift[c] = a;
    const auto table = enumerate_exact(lattice, shift, beta, K);
    const double m1 = table.expectation([&](const IntegerField& m) { return (m[c] + a) * f[c]; });
    const double m2 = table.expectation([&](const IntegerField& m) {
      const double x = (m[c] + a) * f[c];
      return x * x;
    });
    return density(a) * scale * scale * (m2 - m1 * m1);
  };
  return boost::math::quadrature::trapezoidal(integrand, 0.0, 1.0, 1e-12, 18u);
}

OnePointStats one_point_stats(const Lattice& lattice, double T, int x, const DisorderConfig& config) {
  if (lattice.is_boundary(x)) throw Error("one-point statistics need an interior vertex");
  std::vector<int> ray;
  Site s = lattice.site(x);
  for (int col = s.col; col < lattice.width(); ++col) {
    const int y = lattice.index(col, s.row);
    if (lattice.is_boundary(y)) break;
    ray.push_back(y);
  }
  const double scale = 2.0 * std::numbers::pi / T;
  auto rows = run_disorders(lattice, T, config, ray.size(), nullptr,
                            [&](const IntegerField& m1, const IntegerField& m2, const PhaseField&,
                                std::vector<double>& acc) {
                              const double dx = scale * (m1[x] - m2[x]);
                              for (std::size_t k = 0; k < ray.size(); ++k)
                                acc[k] += dx * scale * (m1[ray[k]] - m2[ray[k]]);
                            });
  OnePointStats out;
  out.var_diff = summarise(rows, 0);
  for (std::size_t k = 0; k < ray.size(); ++k) {
    const auto e = summarise(rows, k);
    out.two_point.push_back({static_cast<int>(k), e.value, e.std_error});
  }
  return out;
}

std::vector<SweepRow> transition_sweep(const std::vector<double>& Ts, const std::vector<int>& ns,
                                       const DisorderConfig& config, BoundaryCondition bc) {
  if (Ts.empty() || ns.empty()) throw Error("transition sweep needs nonempty temperature and size grids");
  std::vector<SweepRow> rows;
  for (double T : Ts) {
    for (int n : ns) {
      const Lattice L = Lattice::square(n, bc);
      VertexField f(L.num_vertices());
      f[L.center()] = 1.0;
      DisorderConfig cfg = config;
      cfg.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(std::llround(T * 1e6)),
                                           static_cast<std::uint64_t>(n)});
      const auto est = conditional_variance(L, f, T, cfg);
      const VertexField fr = recentred(L, f);
      const double g = dot(fr, solve_poisson(L, fr));
      rows.push_back({T, n, est.value / g, est.std_error / g, g, est.rhat_max, est.n_flagged});
    }
  }
  return rows;
}

}  // namespace gffmod
