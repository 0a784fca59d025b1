#include "qls/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "qls/closed_form.hpp"
#include "qls/csv.hpp"
#include "qls/errors.hpp"

namespace qls {

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) s += (a.x[d] - b.x[d]) * (a.x[d] - b.x[d]);
  if (s == 0.0) return std::abs(a.r - b.r);
  return std::sqrt(s);
}

std::shared_ptr<const Grid> Grid::radial_geometric(int N, double r_first, double R,
                                                   std::size_t nodes) {
  if (nodes < 4) throw UsageError("radial grid needs at least 4 nodes");
  if (!(r_first > 0.0) || !(R > r_first)) throw UsageError("radial grid needs 0 < r_first < R");
  std::vector<double> r(nodes);
  r[0] = 0.0;
  const double ratio = std::log(R / r_first) / static_cast<double>(nodes - 2);
  for (std::size_t i = 1; i < nodes; ++i)
    r[i] = r_first * std::exp(ratio * static_cast<double>(i - 1));
  r.back() = R;
  return radial_from_nodes(N, std::move(r));
}

std::shared_ptr<const Grid> Grid::radial_uniform(int N, double R, std::size_t nodes) {
  if (nodes < 4) throw UsageError("radial grid needs at least 4 nodes");
  if (!(R > 0.0)) throw UsageError("radial grid needs R > 0");
  std::vector<double> r(nodes);
  const double h = R / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) r[i] = h * static_cast<double>(i);
  r.back() = R;
  return radial_from_nodes(N, std::move(r));
}

std::shared_ptr<const Grid> Grid::radial_from_nodes(int N, std::vector<double> r) {
  if (N < 2) throw UsageError("radial grid dimension must be >= 2");
  if (r.size() < 4 || r[0] != 0.0) throw UsageError("radial nodes must start at 0");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw UsageError("radial nodes must be strictly increasing");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->kind_ = GridKind::Radial;
  g->dim_ = N;
  g->extent_ = r.back();
  g->nodes_.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    g->nodes_[i].r = r[i];
    g->nodes_[i].x = {r[i], 0.0, 0.0};
  }
  g->finalize_radial();
  return g;
}

void Grid::finalize_radial() {
  const std::size_t n = nodes_.size();
  const double area = sphere_area(dim_);
  const double N = dim_;
  weights_.assign(n, 0.0);
  fixed_.assign(n, 0);
  fixed_[n - 1] = 1;
  edges_.clear();
  double lower = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = nodes_[i].r, b = nodes_[i + 1].r;
    const double face = 0.5 * (a + b);
    edges_.push_back({i, i + 1, area * std::pow(face, N - 1) / (b - a)});
    const double upper = std::pow(face, N);
    weights_[i] = area / N * (upper - lower);
    lower = upper;
  }
  weights_[n - 1] = area / N * (std::pow(nodes_[n - 1].r, N) - lower);
}

std::shared_ptr<const Grid> Grid::tensor(int dim, double half_width, std::size_t cells) {
  if (dim < 2) throw UsageError("tensor grids need dimension 2 or 3");
  if (dim > 3)
    throw UsageError("tensor grids in dimension >= 4 are not supported; use the radial grid");
  if (cells < 4 || cells % 2 != 0) throw UsageError("tensor grid needs an even cell count >= 4");
  if (dim == 3 && cells > 64) throw UsageError("3D tensor grids are capped at 64^3 cells");
  if (!(half_width > 0.0)) throw UsageError("tensor grid half-width must be positive");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->kind_ = GridKind::Tensor;
  g->dim_ = dim;
  g->extent_ = half_width;
  g->cells_ = cells;
  const double h = 2.0 * half_width / static_cast<double>(cells);
  g->spacing_ = h;
  const std::size_t m = cells + 1;
  const std::size_t nk = dim == 3 ? m : 1;
  const std::size_t total = m * m * nk;
  g->nodes_.resize(total);
  g->weights_.assign(total, 0.0);
  g->fixed_.assign(total, 0);
  const double cell_volume = std::pow(h, dim);
  const double coupling = std::pow(h, dim - 2);
  auto coord = [&](std::size_t i) {
    return i == cells / 2 ? 0.0 : -half_width + h * static_cast<double>(i);
  };
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t id = g->index(i, j, k);
        Point& pt = g->nodes_[id];
        pt.x = {coord(i), coord(j), dim == 3 ? coord(k) : 0.0};
        pt.r = std::sqrt(pt.x[0] * pt.x[0] + pt.x[1] * pt.x[1] + pt.x[2] * pt.x[2]);
        double w = cell_volume;
        bool boundary = false;
        const std::size_t idx[3] = {i, j, k};
        for (int d = 0; d < dim; ++d) {
          if (idx[d] == 0 || idx[d] == cells) {
            w *= 0.5;
            boundary = true;
          }
        }
        g->weights_[id] = w;
        g->fixed_[id] = boundary ? 1 : 0;
        if (i + 1 < m) g->edges_.push_back({id, g->index(i + 1, j, k), coupling});
        if (j + 1 < m) g->edges_.push_back({id, g->index(i, j + 1, k), coupling});
        if (dim == 3 && k + 1 < m) g->edges_.push_back({id, g->index(i, j, k + 1), coupling});
      }
  // Edges along the boundary carry no energy for Dirichlet fields; drop them so the
  // stiffness only couples pairs with at least one free node.
  std::erase_if(g->edges_, [&](const Edge& e) { return g->fixed_[e.i] && g->fixed_[e.j]; });
  return g;
}

std::size_t Grid::index(std::size_t i, std::size_t j, std::size_t k) const {
  const std::size_t m = cells_ + 1;
  return i + m * (j + m * k);
}

std::size_t Grid::nearest_node(const Point& p) const {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double d = is_radial() ? std::abs(nodes_[i].r - p.r) : distance(nodes_[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::string Grid::describe() const {
  std::ostringstream os;
  if (is_radial())
    os << "radial N=" << dim_ << " nodes=" << size() << " R=" << extent_;
  else
    os << "tensor dim=" << dim_ << " cells=" << cells_ << " half_width=" << extent_;
  return os.str();
}

GridField::GridField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw UsageError("field without grid");
  if (values_.size() != grid_->size()) throw UsageError("field size does not match grid");
}

GridField::GridField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw UsageError("field without grid");
  values_.assign(grid_->size(), 0.0);
}

void require_same_grid(const GridField& a, const GridField& b) {
  if (!a.grid() || a.grid() != b.grid()) throw UsageError("fields live on different grids");
}

GridField laplacian(const GridField& field) {
  if (!field.grid()) throw UsageError("field without grid");
  const Grid& g = *field.grid();
  std::vector<double> flux(g.size(), 0.0);
  for (const Edge& e : g.edges()) {
    const double f = e.c * (field[e.j] - field[e.i]);
    flux[e.i] += f;
    flux[e.j] -= f;
  }
  GridField out(field.grid());
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = g.fixed(i) ? 0.0 : flux[i] / g.weights()[i];
  return out;
}

double dirichlet_energy(const GridField& field) {
  double s = 0.0;
  for (const Edge& e : field.grid()->edges()) {
    const double d = field[e.i] - field[e.j];
    s += e.c * d * d;
  }
  return s;
}

double norm_d12(const GridField& field) { return std::sqrt(dirichlet_energy(field)); }

double norm_l2(const GridField& field) { return norm_lp(field, 2.0); }

double norm_lp(const GridField& field, double p) {
  if (!(p >= 1.0)) throw DomainError("L^p norm needs p >= 1");
  const auto& w = field.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += w[i] * std::pow(std::abs(field[i]), p);
  return std::pow(s, 1.0 / p);
}

double norm_linf(const GridField& field) {
  double m = 0.0;
  for (double v : field.values()) m = std::max(m, std::abs(v));
  return m;
}

double integrate(const GridField& field) {
  const auto& w = field.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += w[i] * field[i];
  return s;
}

double inner(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  const auto& w = a.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

double distance_d12(const GridField& a, const GridField& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (const Edge& e : a.grid()->edges()) {
    const double d = (a[e.i] - b[e.i]) - (a[e.j] - b[e.j]);
    s += e.c * d * d;
  }
  return std::sqrt(s);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw UsageError("interpolation needs matching tables of size >= 2");
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(x_[i + 1] > x_[i])) throw UsageError("interpolation abscissae must increase");
    delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  }
  d_.assign(n, 0.0);
  d_[0] = delta[0];
  d_[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    // Weighted harmonic mean (Fritsch-Butland form of the Fritsch-Carlson limiter).
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
    d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * d_[i] +
         (-2 * s3 + 3 * s2) * y_[i + 1] + (s3 - s2) * h * d_[i + 1];
}

namespace {

bool inside_tensor(const Grid& g, const std::array<double, 3>& x) {
  const double L = g.extent() * (1.0 + 1e-12);
  for (int d = 0; d < g.dimension(); ++d)
    if (std::abs(x[d]) > L) return false;
  return true;
}

MonotoneCubic radial_interpolant(const GridField& field) {
  std::vector<double> r;
  r.reserve(field.size());
  for (const Point& p : field.grid()->nodes()) r.push_back(p.r);
  return MonotoneCubic(std::move(r), field.values());
}

}  // namespace

double interpolate_tensor(const GridField& field, const std::array<double, 3>& x) {
  const Grid& g = *field.grid();
  if (g.is_radial()) throw UsageError("interpolate_tensor on a radial grid");
  if (!inside_tensor(g, x)) throw DomainError("point outside the tensor grid");
  const double h = g.spacing();
  const std::size_t n = g.cells();
  std::size_t base[3] = {0, 0, 0};
  double frac[3] = {0, 0, 0};
  for (int d = 0; d < g.dimension(); ++d) {
    const double s = std::clamp((x[d] + g.extent()) / h, 0.0, static_cast<double>(n));
    std::size_t b = static_cast<std::size_t>(std::floor(s));
    if (b >= n) b = n - 1;
    base[d] = b;
    frac[d] = s - static_cast<double>(b);
  }
  const int corners = g.dimension() == 3 ? 8 : 4;
  double value = 0.0;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx[3] = {base[0], base[1], base[2]};
    for (int d = 0; d < g.dimension(); ++d) {
      const bool up = (c >> d) & 1;
      w *= up ? frac[d] : 1.0 - frac[d];
      idx[d] += up ? 1 : 0;
    }
    if (w != 0.0) value += w * field[g.index(idx[0], idx[1], idx[2])];
  }
  return value;
}

double interpolate(const GridField& field, const Point& p) {
  const Grid& g = *field.grid();
  if (g.is_radial()) {
    if (p.r > g.extent() * (1.0 + 1e-12)) throw DomainError("radius outside the radial grid");
    return radial_interpolant(field)(p.r);
  }
  return interpolate_tensor(field, p.x);
}

GridField resample(const GridField& source, GridPtr target,
                   const std::function<Point(const Point&)>& to_source, bool zero_outside) {
  const Grid& sg = *source.grid();
  GridField out(target);
  std::optional<MonotoneCubic> radial;
  if (sg.is_radial()) radial.emplace(radial_interpolant(source));
  for (std::size_t i = 0; i < target->size(); ++i) {
    if (target->fixed(i)) continue;
    const Point q = to_source(target->node(i));
    const bool inside = sg.is_radial() ? q.r <= sg.extent() * (1.0 + 1e-12) : inside_tensor(sg, q.x);
    if (!inside) {
      if (zero_outside) continue;
      throw DomainError("resampling point outside the source grid support");
    }
    out[i] = sg.is_radial() ? (*radial)(q.r) : interpolate_tensor(source, q.x);
  }
  return out;
}

void write_field_csv(const GridField& field, const std::string& path,
                     const std::string& value_name) {
  const Grid& g = *field.grid();
  std::vector<std::string> header;
  if (g.is_radial()) {
    header = {"r", value_name};
  } else {
    header = {"x1", "x2"};
    if (g.dimension() == 3) header.push_back("x3");
    header.push_back(value_name);
  }
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point& p = g.node(i);
    if (g.is_radial())
      csv.row({p.r, field[i]});
    else if (g.dimension() == 2)
      csv.row({p.x[0], p.x[1], field[i]});
    else
      csv.row({p.x[0], p.x[1], p.x[2], field[i]});
  }
}

}  // namespace qls
