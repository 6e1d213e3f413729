#include "gffmod/iv_gff.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "gffmod/stats.hpp"

namespace gffmod {

namespace {

void check_shapes(const Lattice& lattice, const IntegerField& m, const VertexField& a) {
  if (static_cast<int>(m.size()) != lattice.num_vertices() || static_cast<int>(a.size()) != lattice.num_vertices())
    throw Error("height or shift field does not match lattice");
}

int window_half_width(double beta, int deg) {
  return static_cast<int>(std::ceil(8.0 / std::sqrt(beta * deg))) + 2;
}

// Fills w with unnormalised weights exp(-c (lo + k + a_v - mean)^2) relative
// to the mode and returns lo. q must equal exp(-2c).
int site_weights(double c, double q, double a_v, double nbr_mean, int half, double* w) {
  const double x = nbr_mean - a_v;
  const int k0 = static_cast<int>(std::floor(x + 0.5));
  const double d0 = k0 - x;
  w[half] = 1.0;
  double r = std::exp(-c * (2.0 * d0 + 1.0));
  double s = r > 1e-280 ? q / r : std::exp(-c * (1.0 - 2.0 * d0));
  for (int j = 1; j <= half; ++j) {
    w[half + j] = w[half + j - 1] * r;
    w[half - j] = w[half - j + 1] * s;
    r *= q;
    s *= q;
  }
  return k0 - half;
}

double neighbour_mean(const Lattice& lattice, const int* m, const double* a, int v) {
  double s = 0.0;
  const auto nb = lattice.neighbors(v);
  for (int u : nb) s += m[u] + a[u];
  return s / static_cast<double>(nb.size());
}

}  // namespace

double energy(const Lattice& lattice, const IntegerField& m, const VertexField& a, double beta) {
  check_shapes(lattice, m, a);
  double s = 0.0;
  for (const Edge& e : lattice.edges()) {
    const double d = (m[e.head] + a[e.head]) - (m[e.tail] + a[e.tail]);
    s += d * d;
  }
  return 0.5 * beta * s;
}

double energy(const IntegerField& m, const PhaseField& a, double beta) { return energy(a.lattice, m, a.a, beta); }

SiteConditional heat_bath_conditional(const Lattice& lattice, const IntegerField& m, const VertexField& a,
                                      double beta, int v) {
  check_shapes(lattice, m, a);
  if (lattice.is_boundary(v)) throw Error("heat-bath update requested on a boundary vertex");
  const int deg = lattice.degree(v);
  const double c = 0.5 * beta * deg;
  const int half = window_half_width(beta, deg);
  SiteConditional out;
  out.p.resize(2 * half + 1);
  out.lo = site_weights(c, std::exp(-2.0 * c), a[v], neighbour_mean(lattice, &m[0], &a[0], v), half, out.p.data());
  const double z = pairwise_sum(out.p);
  for (double& p : out.p) p /= z;
  return out;
}

IvGibbsChain::IvGibbsChain(Lattice lattice, VertexField a, double beta, IntegerField init, Rng rng)
    : lattice_(std::move(lattice)), a_(std::move(a)), beta_(beta), m_(std::move(init)), rng_(std::move(rng)) {
  check_shapes(lattice_, m_, a_);
  if (!(beta_ > 0.0)) throw Error("inverse temperature must be positive");
  for (int v = 0; v < lattice_.num_vertices(); ++v)
    if (lattice_.is_boundary(v) && m_[v] != 0) throw Error("initial heights must vanish on the boundary");
}

void IvGibbsChain::sweep() {
  if (nbr_.empty()) {
    for (int v : lattice_.interior_vertices()) {
      const int deg = lattice_.degree(v);
      const auto nb = lattice_.neighbors(v);
      for (int k = 0; k < 4; ++k) nbr_.push_back(k < deg ? nb[k] : -1);
      const double c = 0.5 * beta_ * deg;
      site_c_.push_back(c);
      site_q_.push_back(std::exp(-2.0 * c));
      site_half_.push_back(window_half_width(beta_, deg));
    }
    int widest = 0;
    for (int h : site_half_) widest = std::max(widest, h);
    weights_.assign(2 * widest + 1, 0.0);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int* m = &m_[0];
  const double* a = &a_[0];
  const auto interior = lattice_.interior_vertices();
  double* w = weights_.data();
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const int v = interior[i];
    const int* nb = &nbr_[4 * i];
    double sum = 0.0;
    int deg = 0;
    for (int k = 0; k < 4 && nb[k] >= 0; ++k, ++deg) sum += m[nb[k]] + a[nb[k]];
    const int half = site_half_[i];
    const int lo = site_weights(site_c_[i], site_q_[i], a[v], sum / deg, half, w);
    const int len = 2 * half + 1;
    double total = 0.0;
    for (int k = 0; k < len; ++k) total += w[k];
    double u = unif(rng_) * total;
    int k = 0;
    while (k < len - 1 && u >= w[k]) {
      u -= w[k];
      ++k;
    }
    m[v] = lo + k;
  }
  ++sweeps_;
}

IntegerField unwrap_lift(const PhaseField& a, Rng* rng) {
  const Lattice& L = a.lattice;
  const int nv = L.num_vertices();
  IntegerField m(nv);
  std::vector<char> seen(nv, 0);
  std::deque<int> frontier;
  for (int v = 0; v < nv; ++v)
    if (L.is_boundary(v)) {
      seen[v] = 1;
      frontier.push_back(v);
    }
  while (!frontier.empty()) {
    int x;
    if (rng) {
      std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
      const std::size_t i = pick(*rng);
      std::swap(frontier[i], frontier.back());
      x = frontier.back();
      frontier.pop_back();
    } else {
      x = frontier.front();
      frontier.pop_front();
    }
    for (int y : L.neighbors(x)) {
      if (seen[y]) continue;
      seen[y] = 1;
      m[y] = m[x] + static_cast<int>(std::floor(a.a[x] - a.a[y] + 0.5));
      frontier.push_back(y);
    }
  }
  return m;
}

GroundState ground_state(const PhaseField& a, IntegerField init, int max_rounds) {
  const Lattice& L = a.lattice;
  check_shapes(L, init, a.a);
  GroundState out{std::move(init), false, 0};
  auto& m = out.m;
  while (out.rounds < max_rounds) {
    ++out.rounds;
    bool changed = false;
    for (int v : L.interior_vertices()) {
      const double x = neighbour_mean(L, &m[0], &a.a[0], v) - a.a[v];
      const int best = static_cast<int>(std::floor(x + 0.5));
      if (best == m[v]) continue;
      const double cur = (m[v] - x) * (m[v] - x);
      const double nxt = (best - x) * (best - x);
      if (nxt < cur - 1e-12) {
        m[v] = best;
        changed = true;
      }
    }
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  return out;
}

GroundState ground_state(const PhaseField& a, int max_rounds) {
  return ground_state(a, unwrap_lift(a), max_rounds);
}

IntegerField IvDistributionTable::state(std::size_t index) const {
  IntegerField m(lattice.num_vertices());
  const std::size_t radix = 2 * K + 1;
  for (int k = 0; k < lattice.num_interior(); ++k) {
    m[lattice.interior_vertex(k)] = static_cast<int>(index % radix) - K;
    index /= radix;
  }
  return m;
}

std::size_t IvDistributionTable::index_of(const IntegerField& m) const {
  const std::size_t radix = 2 * K + 1;
  std::size_t idx = 0;
  for (int k = lattice.num_interior() - 1; k >= 0; --k) {
    const int d = m[lattice.interior_vertex(k)] + K;
    if (d < 0 || d >= static_cast<int>(radix)) throw Error("heights outside the enumeration window");
    idx = idx * radix + d;
  }
  return idx;
}

std::vector<double> IvDistributionTable::marginal(int v) const {
  const int k = lattice.interior_index(v);
  if (k < 0) throw Error("marginal requested at a boundary vertex");
  std::size_t stride = 1;
  const std::size_t radix = 2 * K + 1;
  for (int j = 0; j < k; ++j) stride *= radix;
  std::vector<double> out(radix, 0.0);
  for (std::size_t i = 0; i < probs.size(); ++i) out[(i / stride) % radix] += probs[i];
  return out;
}

double IvDistributionTable::expectation(const std::function<double(const IntegerField&)>& g) const {
  std::vector<double> terms(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) terms[i] = probs[i] == 0.0 ? 0.0 : probs[i] * g(state(i));
  return pairwise_sum(terms);
}

IvDistributionTable enumerate_exact(const Lattice& lattice, const VertexField& a, double beta, int K) {
  if (static_cast<int>(a.size()) != lattice.num_vertices()) throw Error("shift field does not match lattice");
  if (K < 0) throw Error("enumeration window must be non-negative");
  if (!(beta > 0.0)) throw Error("inverse temperature must be positive");
  const int N = lattice.num_interior();
  const std::size_t radix = 2 * K + 1;
  std::size_t count = 1;
  for (int k = 0; k < N; ++k) {
    if (count > kMaxEnumerationStates / radix)
      throw Error("enumeration instance too large: " + std::to_string(N) + " interior vertices with window " +
                  std::to_string(K));
    count *= radix;
  }
  IvDistributionTable t{lattice, a, beta, K, {}, 0.0, 0.0};
  std::vector<double> e(count);
  std::vector<int> digits(N, 0);
  IntegerField m(lattice.num_vertices());
  for (int k = 0; k < N; ++k) m[lattice.interior_vertex(k)] = -K;
  double emin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    e[i] = energy(lattice, m, a, beta);
    emin = std::min(emin, e[i]);
    for (int k = 0; k < N; ++k) {
      const int v = lattice.interior_vertex(k);
      if (++digits[k] < static_cast<int>(radix)) {
        ++m[v];
        break;
      }
      digits[k] = 0;
      m[v] = -K;
    }
  }
  t.probs.resize(count);
  for (std::size_t i = 0; i < count; ++i) t.probs[i] = std::exp(-(e[i] - emin));
  const double z = pairwise_sum(t.probs);
  for (double& p : t.probs) p /= z;
  t.log_partition = std::log(z) - emin;
  if (K > 0) {
    std::vector<double> edge_mass;
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t idx = i;
      bool outer = false;
      for (int k = 0; k < N; ++k) {
        const std::size_t d = idx % radix;
        idx /= radix;
        if (d == 0 || d == radix - 1) outer = true;
      }
      if (outer) edge_mass.push_back(t.probs[i]);
    }
    t.tail_mass = pairwise_sum(edge_mass);
  }
  return t;
}

IvDistributionTable enumerate_exact(const PhaseField& a, double beta, int K) {
  return enumerate_exact(a.lattice, a.a, beta, K);
}

PairResult sample_pair(const PhaseField& a, double beta, const ChainConfig& config, Rng& rng,
                       const IntegerField* init2, const PairObserver& observer, const VertexField* f) {
  const Lattice& L = a.lattice;
  const std::uint64_t seed1 = rng();
  const std::uint64_t seed2 = rng();
  const std::uint64_t seed_unwrap = rng();
  IntegerField start2;
  if (init2) {
    start2 = *init2;
  } else {
    Rng r = make_rng(seed_unwrap);
    start2 = ground_state(a, unwrap_lift(a, &r)).m;
  }
  IvGibbsChain c1(a, beta, ground_state(a).m, make_rng(seed1));
  IvGibbsChain c2(a, beta, std::move(start2), make_rng(seed2));
  c1.run(config.burn_in);
  c2.run(config.burn_in);

  const int centre = L.center();
  std::vector<std::vector<double>> point(2), pairing(2);
  auto record = [&](const IvGibbsChain& c, int k) {
    const auto& m = c.state();
    point[k].push_back(m[centre] + a.a[centre]);
    if (f) {
      double s = 0.0;
      for (int v = 0; v < L.num_vertices(); ++v) s += (m[v] + a.a[v]) * (*f)[v];
      pairing[k].push_back(s);
    }
  };
  for (int s = 0; s < config.samples; ++s) {
    c1.run(config.thin);
    c2.run(config.thin);
    record(c1, 0);
    record(c2, 1);
    if (observer) observer(c1.state(), c2.state());
  }
  PairResult out{c1.state(), c2.state(), 1.0, true};
  if (config.samples >= 4) {
    out.rhat = split_rhat(point);
    if (f) out.rhat = std::max(out.rhat, split_rhat(pairing));
    out.converged = out.rhat <= config.rhat_threshold;
  }
  return out;
}

}  // namespace gffmod
