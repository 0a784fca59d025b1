#include "qls/radial_profile.hpp"

#include <algorithm>
#include <cmath>

#include "qls/closed_form.hpp"
#include "qls/csv.hpp"
#include "qls/errors.hpp"

namespace qls {

RadialProfile::RadialProfile(int N, std::vector<double> r, std::vector<double> v,
                             std::vector<double> dv, Tail tail, double tail_rate)
    : N_(N), r_(std::move(r)), v_(std::move(v)), dv_(std::move(dv)), tail_(tail),
      tail_rate_(tail_rate) {
  if (r_.size() < 3 || v_.size() != r_.size() || dv_.size() != r_.size())
    throw UsageError("profile tables must have equal size >= 3");
  if (r_[0] != 0.0) throw UsageError("profile must start at r = 0");
  for (std::size_t i = 1; i < r_.size(); ++i)
    if (!(r_[i] > r_[i - 1])) throw UsageError("profile radii must increase");
  if (tail_ == Tail::Algebraic && N_ < 3) throw UsageError("algebraic tail needs N >= 3");
  if (tail_ == Tail::Exponential && !(tail_rate_ > 0.0))
    throw UsageError("exponential tail needs a positive rate");
}

double RadialProfile::eval(double r) const {
  r = std::abs(r);
  const double R = r_.back();
  if (r >= R) {
    if (r == R) return v_.back();
    if (tail_ == Tail::Algebraic) return v_.back() * std::pow(R / r, N_ - 2);
    return v_.back() * std::exp(-tail_rate_ * (r - R)) * std::pow(R / r, 0.5 * (N_ - 1));
  }
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - r_.begin()) - 1;
  const double h = r_[i + 1] - r_[i];
  const double s = (r - r_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * v_[i] + (s3 - 2 * s2 + s) * h * dv_[i] +
         (-2 * s3 + 3 * s2) * v_[i + 1] + (s3 - s2) * h * dv_[i + 1];
}

double RadialProfile::derivative(double r) const {
  r = std::abs(r);
  const double R = r_.back();
  if (r >= R) {
    if (r == R) return dv_.back();
    const double v = eval(r);
    if (tail_ == Tail::Algebraic) return -(N_ - 2) * v / r;
    return -(tail_rate_ + 0.5 * (N_ - 1) / r) * v;
  }
  const auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - r_.begin()) - 1;
  const double h = r_[i + 1] - r_[i];
  const double s = (r - r_[i]) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * v_[i] + (3 * s2 - 4 * s + 1) * h * dv_[i] +
          (-6 * s2 + 6 * s) * v_[i + 1] + (3 * s2 - 2 * s) * h * dv_[i + 1]) /
         h;
}

double RadialProfile::tail_constant() const { return std::pow(r_.back(), N_ - 2) * v_.back(); }

double RadialProfile::flux_constant() const {
  return -std::pow(r_.back(), N_ - 1) * dv_.back() / (N_ - 2);
}

GridField RadialProfile::sample(const GridPtr& grid, const Point& center, double t) const {
  if (!(t >= 0.0)) throw DomainError("dilation must be nonnegative");
  GridField out(grid);
  if (t == 0.0) return out;
  if (grid->is_radial() && (center.r != 0.0 || center.x != std::array<double, 3>{0, 0, 0}))
    throw DomainError("radial grids only support profiles centered at the origin");
  if (grid->dimension() != N_ && grid->is_radial())
    throw UsageError("profile and grid dimensions differ");
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (grid->fixed(i)) continue;
    const double rho = grid->is_radial() ? grid->node(i).r : distance(grid->node(i), center);
    out[i] = eval(rho / t);
  }
  return out;
}

void RadialProfile::write_csv(const std::string& path) const {
  CsvWriter csv(path, {"r", "v", "v_prime", "r_pow_N_minus_2_v"});
  for (std::size_t i = 0; i < r_.size(); ++i)
    csv.row({r_[i], v_[i], dv_[i], std::pow(r_[i], N_ - 2) * v_[i]});
}

namespace {

// Composite Simpson over consecutive samples (x_i, f_i) with arbitrary spacing;
// an odd trailing interval uses the three-point formula on its last panel.
double simpson(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
  double s = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
    const double H = h0 + h1;
    s += H / 6.0 *
         ((2.0 - h1 / h0) * f[i] + H * H / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i + 1 < n) {
    // Quadratic through the last three points integrated over the final interval.
    const double x0 = x[n - 3], x1 = x[n - 2], x2 = x[n - 1];
    const double h0 = x1 - x0, h1 = x2 - x1;
    const double a = f[n - 3], b = f[n - 2], c = f[n - 1];
    s += -h1 * h1 * h1 / (6.0 * h0 * (h0 + h1)) * a + (h1 * h1 / (6.0 * h0) + 0.5 * h1) * b +
         h1 * (2.0 * h1 + 3.0 * h0) / (6.0 * (h0 + h1)) * c;
  }
  return s;
}

}  // namespace

ProfileIntegrals integrate_profile(const RadialProfile& profile, const Transform& transform,
                                   double p) {
  const int N = profile.dimension();
  const double area = sphere_area(N);
  const auto& r = profile.r();
  const auto& v = profile.v();
  const auto& dv = profile.dv();
  const std::size_t n = r.size();

  std::vector<double> s(n - 1), fd(n - 1), fp(n - 1), fm(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double rn = std::pow(r[i], N);
    const double u = transform.G_inverse(v[i]);
    s[i - 1] = std::log(r[i]);
    fd[i - 1] = dv[i] * dv[i] * rn;
    fp[i - 1] = std::pow(std::abs(u), p) * rn;
    fm[i - 1] = u * u * rn;
  }
  ProfileIntegrals out;
  out.dirichlet = simpson(s, fd);
  out.source = simpson(s, fp);
  out.mass = simpson(s, fm);

  // Core ball [0, r1]: v is even and smooth, so v' ~ k r and G^{-1}(v) ~ const.
  const double r1 = r[1];
  const double k = dv[1] / r1;
  out.dirichlet += k * k * std::pow(r1, N + 2) / (N + 2);
  const double u0 = transform.G_inverse(v[0]), u1 = transform.G_inverse(v[1]);
  const double core = std::pow(r1, N) / N;
  out.source += 0.5 * (std::pow(std::abs(u0), p) + std::pow(std::abs(u1), p)) * core;
  out.mass += 0.5 * (u0 * u0 + u1 * u1) * core;

  // Tail beyond the last node.
  const double R = r.back();
  const double vR = v.back();
  if (profile.tail() == RadialProfile::Tail::Algebraic) {
    const double c = profile.tail_constant();
    out.dirichlet += (N - 2) * c * c * std::pow(R, 2 - N);
    const double ep = (N - 2) * p - N;
    if (ep > 0)
      out.source += std::pow(c, p) * std::pow(R, -ep) / ep;
    else
      out.source = INFINITY;
    if (N > 4)
      out.mass += c * c * std::pow(R, 4 - N) / (N - 4);
    else
      out.mass = INFINITY;
  } else {
    // Leading-order exponential tail, integrand ~ vR^q e^{-q a (r-R)} R^{N-1}.
    const double a = profile.tail_rate();
    const double rn1 = std::pow(R, N - 1);
    out.dirichlet += vR * vR * a * rn1 / 2.0;
    out.source += std::pow(std::abs(vR), p) * rn1 / (p * a);
    out.mass += vR * vR * rn1 / (2.0 * a);
  }
  out.dirichlet *= area;
  out.source *= area;
  out.mass *= area;
  return out;
}

ProfileEnergy profile_energy(const RadialProfile& profile, const Transform& transform, double p,
                             double m, double mass) {
  ProfileEnergy e;
  e.integrals = integrate_profile(profile, transform, p);
  const auto& I = e.integrals;
  const double N = profile.dimension();
  const double mass_part = mass > 0.0 ? 0.5 * mass * I.mass : 0.0;
  e.energy = 0.5 * I.dirichlet + mass_part - m / p * I.source;
  e.pohozaev_residual =
      I.dirichlet > 0.0 ? ((N - 2) / (2 * N) * I.dirichlet + mass_part - m / p * I.source) /
                              I.dirichlet
                        : 0.0;
  return e;
}

}  // namespace qls
