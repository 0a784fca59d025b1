#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace qls {

/// A node location; radial grids store (r, 0, 0).
struct Point {
  double r = 0.0;
  std::array<double, 3> x{0.0, 0.0, 0.0};
};

double distance(const Point& a, const Point& b);

enum class GridKind { Radial, Tensor };

/// Dirichlet-energy coupling c * (v_i - v_j)^2.
struct Edge {
  std::size_t i;
  std::size_t j;
  double c;
};

/// Immutable discretization of a radial line (weight r^{N-1}) or of a small
/// uniform box in dimension 2 or 3. Boundary nodes carry homogeneous Dirichlet
/// values; for radial grids the origin is a symmetry node (Neumann).
///
/// Quadrature weights are control volumes, so sum(weights) is the exact volume
/// of the ball (radial) or box (tensor). The stiffness edges and the weights
/// form a summation-by-parts pair: <-Delta v, v>_w equals the edge energy for
/// any field vanishing on the boundary.
class Grid {
 public:
  /// r = 0, then nodes - 1 geometric nodes from r_first to R (the boundary).
  static std::shared_ptr<const Grid> radial_geometric(int N, double r_first, double R,
                                                      std::size_t nodes);
  static std::shared_ptr<const Grid> radial_uniform(int N, double R, std::size_t nodes);
  /// Radial grid on explicitly given nodes (first must be 0, strictly increasing).
  static std::shared_ptr<const Grid> radial_from_nodes(int N, std::vector<double> r);
  /// Uniform box [-half_width, half_width]^dim with `cells` cells per axis.
  static std::shared_ptr<const Grid> tensor(int dim, double half_width, std::size_t cells);

  GridKind kind() const { return kind_; }
  bool is_radial() const { return kind_ == GridKind::Radial; }
  /// Spatial dimension N of the underlying R^N.
  int dimension() const { return dim_; }
  std::size_t size() const { return nodes_.size(); }

  const Point& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool fixed(std::size_t i) const { return fixed_[i] != 0; }
  /// Largest radius (radial) or box half-width (tensor).
  double extent() const { return extent_; }

  // Tensor-only helpers.
  std::size_t cells() const { return cells_; }
  double spacing() const { return spacing_; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const;

  /// Index of the node nearest to p (ties resolved by lowest index).
  std::size_t nearest_node(const Point& p) const;

  std::string describe() const;

 private:
  Grid() = default;
  void finalize_radial();

  GridKind kind_ = GridKind::Radial;
  int dim_ = 0;
  double extent_ = 0.0;
  std::size_t cells_ = 0;
  double spacing_ = 0.0;
  std::vector<Point> nodes_;
  std::vector<double> weights_;
  std::vector<Edge> edges_;
  std::vector<char> fixed_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Nodal values on a grid. Boundary values are part of the field and are zero
/// for every field produced by the solver.
class GridField {
 public:
  GridField() = default;
  GridField(GridPtr grid, std::vector<double> values);
  explicit GridField(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const GridField& a, const GridField& b);

/// Discrete Laplacian; zero on Dirichlet nodes. Exact for quadratics.
GridField laplacian(const GridField& field);
/// sum over edges c (v_i - v_j)^2, the discrete integral of |grad v|^2.
double dirichlet_energy(const GridField& field);
double norm_d12(const GridField& field);
double norm_l2(const GridField& field);
double norm_lp(const GridField& field, double p);
double norm_linf(const GridField& field);
double integrate(const GridField& field);
/// Weighted inner product sum w_i a_i b_i.
double inner(const GridField& a, const GridField& b);
/// D^{1,2} distance ||grad(a - b)||.
double distance_d12(const GridField& a, const GridField& b);

/// Fritsch-Carlson monotone cubic interpolation of tabulated (x, y).
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

/// Bilinear (2D) / trilinear (3D) interpolation on a tensor grid.
double interpolate_tensor(const GridField& field, const std::array<double, 3>& x);
/// Value of a field at an arbitrary point of its grid domain.
double interpolate(const GridField& field, const Point& p);

/// Resample `source` onto `target`: node y of the target reads the source at
/// to_source(y). Points outside the source domain are an error unless
/// `zero_outside` is set, in which case they read 0.
GridField resample(const GridField& source, GridPtr target,
                   const std::function<Point(const Point&)>& to_source, bool zero_outside);

/// CSV export: radial grids write (r, value), tensor grids (x1, x2[, x3], value).
void write_field_csv(const GridField& field, const std::string& path,
                     const std::string& value_name = "value");

}  // namespace qls
