#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace gffmod {

/// Thrown for invalid arguments and violated preconditions across the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values indexed by vertex or by undirected edge. The tag keeps vertex and
/// edge data from being mixed up at compile time.
template <class T, class Tag>
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(std::size_t size, T value = T{}) : data_(size, value) {}
  explicit GridFunction(std::vector<T> values) : data_(std::move(values)) {}

  std::size_t size() const { return data_.size(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  const std::vector<T>& vector() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool operator==(const GridFunction&) const = default;

 private:
  std::vector<T> data_;
};

struct VertexTag {};
struct EdgeTag {};

using VertexField = GridFunction<double, VertexTag>;
/// One value per undirected edge, read along the east/north orientation.
using EdgeField = GridFunction<double, EdgeTag>;
using IntegerField = GridFunction<int, VertexTag>;

/// Grid position: column (x direction) and row (y direction).
struct Site {
  int col = 0;
  int row = 0;
  bool operator==(const Site&) const = default;
};

enum class BoundaryKind { Dirichlet, Free };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Dirichlet;
  Site root{};  // only meaningful for Free

  static BoundaryCondition dirichlet() { return {}; }
  static BoundaryCondition free(Site root) { return {BoundaryKind::Free, root}; }
};

/// Undirected edge stored with its east/north orientation: head is the east
/// or north neighbour of tail.
struct Edge {
  int tail = 0;
  int head = 0;
  bool horizontal = true;
};

class PoissonFactor;

/// Rectangular grid graph with a designated boundary set.
///
/// Vertices are indexed row-major. The square lattice of mesh 1/n covers
/// [-1,1]^2 with (2n+1)^2 vertices; rectangles of other shapes are used for
/// tiny exact-enumeration instances. With Dirichlet conditions the boundary is
/// the outer frame, with free conditions it is the single root vertex.
/// Instances are immutable and cheap to copy; the sparse factorisation of the
/// interior Laplacian is built once at construction and shared.
class Lattice {
 public:
  static Lattice square(int n, BoundaryCondition bc = BoundaryCondition::dirichlet());
  static Lattice rectangle(int width, int height, BoundaryCondition bc = BoundaryCondition::dirichlet());

  /// Mesh parameter of a square lattice; for rectangles (max side - 1) / 2.
  double n() const;
  int width() const;
  int height() const;
  const BoundaryCondition& boundary_condition() const;
  bool is_free() const { return boundary_condition().kind == BoundaryKind::Free; }

  int num_vertices() const;
  int num_edges() const;
  int num_interior() const;

  int index(int col, int row) const;
  int index(Site s) const { return index(s.col, s.row); }
  Site site(int v) const;
  bool contains(int col, int row) const;
  /// Coordinates in the [-1,1]^2 frame (spacing 1/n).
  double x(int v) const;
  double y(int v) const;
  /// Vertex closest to the origin (exact centre for square lattices).
  int center() const;
  int root() const;

  bool is_boundary(int v) const;
  /// Position of v among the interior vertices, or -1 on the boundary.
  int interior_index(int v) const;
  int interior_vertex(int k) const;
  std::span<const int> interior_vertices() const;

  int degree(int v) const;
  std::span<const int> neighbors(int v) const;
  /// Edge ids matching neighbors(v) position by position.
  std::span<const int> incident_edges(int v) const;
  const Edge& edge(int e) const;
  std::span<const Edge> edges() const;
  /// Edge between two adjacent vertices, or -1.
  int edge_between(int u, int v) const;

  const PoissonFactor& factor() const;

 private:
  struct Data;
  static std::shared_ptr<Data> build_data(int width, int height, double n, BoundaryCondition bc);
  explicit Lattice(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// Cached sparse Cholesky factor of the interior operator -Delta.
class PoissonFactor {
 public:
  explicit PoissonFactor(const Lattice& lattice);
  ~PoissonFactor();
  PoissonFactor(const PoissonFactor&) = delete;
  PoissonFactor& operator=(const PoissonFactor&) = delete;

  /// Solves -Delta x = rhs on interior coordinates.
  std::vector<double> solve(std::span<const double> rhs) const;
  /// Maps i.i.d. standard normals to a vector with covariance (-Delta)^{-1}.
  std::vector<double> correlate(std::span<const double> white) const;
  int size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double dot(const VertexField& a, const VertexField& b);
/// Edge inner product: half the sum over directed edges, i.e. the plain sum
/// over undirected edges.
double dot(const EdgeField& a, const EdgeField& b);

EdgeField gradient(const Lattice& lattice, const VertexField& s);
VertexField divergence(const Lattice& lattice, const EdgeField& a);
VertexField laplacian(const Lattice& lattice, const VertexField& s);
/// <grad s, grad s>, unnormalised.
double dirichlet_energy(const Lattice& lattice, const VertexField& s);

/// Returns s with -Delta s = rhs on the interior and s = 0 on the boundary.
/// Boundary entries of rhs are ignored.
VertexField solve_poisson(const Lattice& lattice, const VertexField& rhs);

/// Green's function G(x, .) = (-Delta)^{-1} 1_x; zero when either end is on
/// the boundary.
double green(const Lattice& lattice, int x, int y);
VertexField green_column(const Lattice& lattice, int x);

/// Harmonic extension: vertices with fixed[v] keep values[v], the rest solve
/// Delta s = 0. The lattice boundary is always treated as fixed.
VertexField solve_dirichlet(const Lattice& lattice, const std::vector<char>& fixed, const VertexField& values);

VertexField zero_on_boundary(const Lattice& lattice, VertexField s);

}  // namespace gffmod
