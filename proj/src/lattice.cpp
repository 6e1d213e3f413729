#include "gffmod/lattice.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace gffmod {

struct Lattice::Data {
  int width = 0;
  int height = 0;
  double n = 1.0;
  BoundaryCondition bc;
  std::vector<char> boundary;
  std::vector<int> interior_of;   // vertex -> interior index or -1
  std::vector<int> interior;      // interior index -> vertex
  std::vector<int> degree;
  std::vector<int> nbr;           // 4 slots per vertex
  std::vector<int> nbr_edge;      // 4 slots per vertex
  std::vector<Edge> edges;
  std::shared_ptr<const PoissonFactor> factor;
};

Lattice Lattice::square(int n, BoundaryCondition bc) {
  if (n < 1) throw Error("lattice mesh parameter n must be >= 1");
  return rectangle(2 * n + 1, 2 * n + 1, bc);
}

Lattice Lattice::rectangle(int width, int height, BoundaryCondition bc) {
  if (width < 1 || height < 1) throw Error("lattice dimensions must be positive");
  if (bc.kind == BoundaryKind::Free &&
      (bc.root.col < 0 || bc.root.col >= width || bc.root.row < 0 || bc.root.row >= height)) {
    throw Error("free-boundary root (" + std::to_string(bc.root.col) + "," + std::to_string(bc.root.row) +
                ") lies outside the grid");
  }
  const double n = std::max(width, height) > 1 ? (std::max(width, height) - 1) / 2.0 : 1.0;
  auto data = build_data(width, height, n, bc);
  Lattice lattice{data};
  if (lattice.num_interior() > 0) data->factor = std::make_shared<PoissonFactor>(lattice);
  return lattice;
}

std::shared_ptr<Lattice::Data> Lattice::build_data(int width, int height, double n, BoundaryCondition bc) {
  auto d = std::make_shared<Lattice::Data>();
  d->width = width;
  d->height = height;
  d->n = n;
  d->bc = bc;
  const int nv = width * height;
  d->boundary.assign(nv, 0);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const int v = r * width + c;
      if (bc.kind == BoundaryKind::Dirichlet) {
        d->boundary[v] = (c == 0 || r == 0 || c == width - 1 || r == height - 1) ? 1 : 0;
      } else {
        d->boundary[v] = (c == bc.root.col && r == bc.root.row) ? 1 : 0;
      }
    }
  }
  d->interior_of.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!d->boundary[v]) {
      d->interior_of[v] = static_cast<int>(d->interior.size());
      d->interior.push_back(v);
    }
  }
  for (int r = 0; r < height; ++r)
    for (int c = 0; c + 1 < width; ++c) d->edges.push_back({r * width + c, r * width + c + 1, true});
  for (int r = 0; r + 1 < height; ++r)
    for (int c = 0; c < width; ++c) d->edges.push_back({r * width + c, (r + 1) * width + c, false});

  d->degree.assign(nv, 0);
  d->nbr.assign(4 * nv, -1);
  d->nbr_edge.assign(4 * nv, -1);
  for (int e = 0; e < static_cast<int>(d->edges.size()); ++e) {
    const auto& ed = d->edges[e];
    for (auto [a, b] : {std::pair{ed.tail, ed.head}, std::pair{ed.head, ed.tail}}) {
      const int k = d->degree[a]++;
      d->nbr[4 * a + k] = b;
      d->nbr_edge[4 * a + k] = e;
    }
  }
  return d;
}

double Lattice::n() const { return d_->n; }
int Lattice::width() const { return d_->width; }
int Lattice::height() const { return d_->height; }
const BoundaryCondition& Lattice::boundary_condition() const { return d_->bc; }
int Lattice::num_vertices() const { return d_->width * d_->height; }
int Lattice::num_edges() const { return static_cast<int>(d_->edges.size()); }
int Lattice::num_interior() const { return static_cast<int>(d_->interior.size()); }

int Lattice::index(int col, int row) const {
  if (!contains(col, row)) throw Error("site outside lattice");
  return row * d_->width + col;
}

Site Lattice::site(int v) const { return {v % d_->width, v / d_->width}; }

bool Lattice::contains(int col, int row) const {
  return col >= 0 && row >= 0 && col < d_->width && row < d_->height;
}

double Lattice::x(int v) const { return (site(v).col - (d_->width - 1) / 2.0) / d_->n; }
double Lattice::y(int v) const { return (site(v).row - (d_->height - 1) / 2.0) / d_->n; }

int Lattice::center() const { return index(d_->width / 2, d_->height / 2); }

int Lattice::root() const {
  if (!is_free()) throw Error("root requested on a Dirichlet lattice");
  return index(d_->bc.root);
}

bool Lattice::is_boundary(int v) const { return d_->boundary[v] != 0; }
int Lattice::interior_index(int v) const { return d_->interior_of[v]; }
int Lattice::interior_vertex(int k) const { return d_->interior[k]; }
std::span<const int> Lattice::interior_vertices() const { return d_->interior; }
int Lattice::degree(int v) const { return d_->degree[v]; }

std::span<const int> Lattice::neighbors(int v) const {
  return std::span<const int>(d_->nbr).subspan(4 * v, d_->degree[v]);
}

std::span<const int> Lattice::incident_edges(int v) const {
  return std::span<const int>(d_->nbr_edge).subspan(4 * v, d_->degree[v]);
}

const Edge& Lattice::edge(int e) const { return d_->edges[e]; }
std::span<const Edge> Lattice::edges() const { return d_->edges; }

int Lattice::edge_between(int u, int v) const {
  const auto nb = neighbors(u);
  for (std::size_t k = 0; k < nb.size(); ++k)
    if (nb[k] == v) return incident_edges(u)[k];
  return -1;
}

const PoissonFactor& Lattice::factor() const {
  if (!d_->factor) throw Error("lattice has no interior vertices; the Poisson system is empty");
  return *d_->factor;
}

// ---------------------------------------------------------------------------

struct PoissonFactor::Impl {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  int size = 0;
};

namespace {

Eigen::SparseMatrix<double> interior_operator(const Lattice& lattice, const std::vector<int>& free_of,
                                              int n_free) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * n_free);
  for (int v = 0; v < lattice.num_vertices(); ++v) {
    const int i = free_of[v];
    if (i < 0) continue;
    trip.emplace_back(i, i, lattice.degree(v));
    for (int u : lattice.neighbors(v)) {
      const int j = free_of[u];
      if (j >= 0) trip.emplace_back(i, j, -1.0);
    }
  }
  Eigen::SparseMatrix<double> a(n_free, n_free);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

}  // namespace

PoissonFactor::PoissonFactor(const Lattice& lattice) : impl_(std::make_unique<Impl>()) {
  std::vector<int> free_of(lattice.num_vertices());
  for (int v = 0; v < lattice.num_vertices(); ++v) free_of[v] = lattice.interior_index(v);
  impl_->size = lattice.num_interior();
  impl_->llt.compute(interior_operator(lattice, free_of, impl_->size));
  // -Delta with a nonempty boundary is positive definite on every connected grid.
  if (impl_->llt.info() != Eigen::Success) throw Error("interior Laplacian is not positive definite");
}

PoissonFactor::~PoissonFactor() = default;

int PoissonFactor::size() const { return impl_->size; }

std::vector<double> PoissonFactor::solve(std::span<const double> rhs) const {
  Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = impl_->llt.solve(b);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> PoissonFactor::correlate(std::span<const double> white) const {
  // P A P^T = L L^T, so P^T L^{-T} z has covariance A^{-1}.
  Eigen::Map<const Eigen::VectorXd> z(white.data(), static_cast<Eigen::Index>(white.size()));
  Eigen::VectorXd y = impl_->llt.matrixU().solve(z);
  Eigen::VectorXd x = impl_->llt.permutationPinv() * y;
  return {x.data(), x.data() + x.size()};
}

// ---------------------------------------------------------------------------

double dot(const VertexField& a, const VertexField& b) {
  if (a.size() != b.size()) throw Error("vertex field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const EdgeField& a, const EdgeField& b) {
  if (a.size() != b.size()) throw Error("edge field size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

EdgeField gradient(const Lattice& lattice, const VertexField& s) {
  if (static_cast<int>(s.size()) != lattice.num_vertices()) throw Error("field does not match lattice");
  EdgeField g(lattice.num_edges());
  const auto edges = lattice.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) g[e] = s[edges[e].head] - s[edges[e].tail];
  return g;
}

VertexField divergence(const Lattice& lattice, const EdgeField& a) {
  if (static_cast<int>(a.size()) != lattice.num_edges()) throw Error("edge field does not match lattice");
  VertexField d(lattice.num_vertices());
  const auto edges = lattice.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    d[edges[e].tail] += a[e];
    d[edges[e].head] -= a[e];
  }
  return d;
}

VertexField laplacian(const Lattice& lattice, const VertexField& s) {
  if (static_cast<int>(s.size()) != lattice.num_vertices()) throw Error("field does not match lattice");
  VertexField out(lattice.num_vertices());
  for (int v = 0; v < lattice.num_vertices(); ++v) {
    double acc = 0.0;
    for (int u : lattice.neighbors(v)) acc += s[u] - s[v];
    out[v] = acc;
  }
  return out;
}

double dirichlet_energy(const Lattice& lattice, const VertexField& s) {
  const auto g = gradient(lattice, s);
  return dot(g, g);
}

VertexField solve_poisson(const Lattice& lattice, const VertexField& rhs) {
  if (static_cast<int>(rhs.size()) != lattice.num_vertices()) throw Error("field does not match lattice");
  VertexField out(lattice.num_vertices());
  if (lattice.num_interior() == 0) return out;
  std::vector<double> b(lattice.num_interior());
  for (int k = 0; k < lattice.num_interior(); ++k) b[k] = rhs[lattice.interior_vertex(k)];
  const auto x = lattice.factor().solve(b);
  for (int k = 0; k < lattice.num_interior(); ++k) out[lattice.interior_vertex(k)] = x[k];
  return out;
}

VertexField green_column(const Lattice& lattice, int x) {
  VertexField delta(lattice.num_vertices());
  if (lattice.is_boundary(x)) return delta;
  delta[x] = 1.0;
  return solve_poisson(lattice, delta);
}

double green(const Lattice& lattice, int x, int y) {
  if (lattice.is_boundary(x) || lattice.is_boundary(y)) return 0.0;
  return green_column(lattice, x)[y];
}

VertexField solve_dirichlet(const Lattice& lattice, const std::vector<char>& fixed, const VertexField& values) {
  const int nv = lattice.num_vertices();
  if (static_cast<int>(fixed.size()) != nv || static_cast<int>(values.size()) != nv)
    throw Error("harmonic extension inputs do not match lattice");
  std::vector<int> free_of(nv, -1);
  int n_free = 0;
  for (int v = 0; v < nv; ++v)
    if (!fixed[v] && !lattice.is_boundary(v)) free_of[v] = n_free++;
  VertexField out(nv);
  for (int v = 0; v < nv; ++v)
    if (free_of[v] < 0) out[v] = values[v];
  if (n_free == 0) return out;

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_free);
  for (int v = 0; v < nv; ++v) {
    if (free_of[v] < 0) continue;
    for (int u : lattice.neighbors(v))
      if (free_of[u] < 0) b[free_of[v]] += values[u];
  }
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(interior_operator(lattice, free_of, n_free));
  if (llt.info() != Eigen::Success) throw Error("harmonic extension system is singular");
  Eigen::VectorXd x = llt.solve(b);
  for (int v = 0; v < nv; ++v)
    if (free_of[v] >= 0) out[v] = x[free_of[v]];
  return out;
}

VertexField zero_on_boundary(const Lattice& lattice, VertexField s) {
  for (int v = 0; v < lattice.num_vertices(); ++v)
    if (lattice.is_boundary(v)) s[v] = 0.0;
  return s;
}

}  // namespace gffmod
