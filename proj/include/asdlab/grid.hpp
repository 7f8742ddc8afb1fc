#ifndef ASDLAB_GRID_HPP
#define ASDLAB_GRID_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "asdlab/util.hpp"

namespace asdlab {

enum class TimeMode { truncated, periodic };

inline const char* to_string(TimeMode m) { return m == TimeMode::truncated ? "truncated" : "periodic"; }

struct GridSpec {
  double r = 1.0;
  int n_eta = 8, n_xi1 = 8, n_xi2 = 8;
  double L = 4.0;
  int n_t = 64;
  TimeMode mode = TimeMode::truncated;

  bool operator==(const GridSpec&) const = default;
};

// Discretized S^3(r) x [-L,L] in Hopf coordinates.
//   e1 = r deta, e2 = r cos(eta) dxi1, e3 = r sin(eta) dxi2, e4 = dt
// eta is staggered away from the coordinate circles eta = 0, pi/2; the
// xi-directions and (in periodic mode) t are periodic.  Quadrature weights
// use the exact cell integral of the metric determinant, so one-slice sums
// telescope to 2 pi^2 r^3 exactly.
class Grid {
 public:
  explicit Grid(const GridSpec& s) : spec_(s) {
    if (s.r <= 0 || s.L <= 0) throw invalid_argument_error("grid: r and L must be positive");
    if (s.n_eta < 2 || s.n_xi1 < 2 || s.n_xi2 < 2 || s.n_t < 2)
      throw invalid_argument_error("grid: all counts must be >= 2");
    if (s.n_xi1 % 2 || s.n_xi2 % 2)
      throw invalid_argument_error("grid: n_xi1 and n_xi2 must be even (pole ghost maps shift by a half period)");
    d_eta_ = (M_PI / 2.0) / s.n_eta;
    d_xi1_ = 2.0 * M_PI / s.n_xi1;
    d_xi2_ = 2.0 * M_PI / s.n_xi2;
    d_t_ = 2.0 * s.L / s.n_t;
    eta_.resize(s.n_eta);
    cos_eta_.resize(s.n_eta);
    sin_eta_.resize(s.n_eta);
    w_theta_row_.resize(s.n_eta);
    for (int i = 0; i < s.n_eta; ++i) {
      eta_[i] = (i + 0.5) * d_eta_;
      cos_eta_[i] = std::cos(eta_[i]);
      sin_eta_[i] = std::sin(eta_[i]);
      double lo = i * d_eta_, hi = (i + 1) * d_eta_;
      double cell = 0.5 * (std::sin(hi) * std::sin(hi) - std::sin(lo) * std::sin(lo));
      w_theta_row_[i] = s.r * s.r * s.r * cell * d_xi1_ * d_xi2_;
    }
  }

  const GridSpec& spec() const { return spec_; }
  double r() const { return spec_.r; }
  TimeMode mode() const { return spec_.mode; }
  double period() const { return 2.0 * spec_.L; }

  int n_eta() const { return spec_.n_eta; }
  int n_xi1() const { return spec_.n_xi1; }
  int n_xi2() const { return spec_.n_xi2; }
  int n_t() const { return spec_.n_t; }
  std::int64_t n_theta() const { return static_cast<std::int64_t>(spec_.n_eta) * spec_.n_xi1 * spec_.n_xi2; }
  std::int64_t n_sites() const { return n_theta() * spec_.n_t; }

  double d_eta() const { return d_eta_; }
  double d_xi1() const { return d_xi1_; }
  double d_xi2() const { return d_xi2_; }
  double d_t() const { return d_t_; }
  double d_coord(int dir) const {
    switch (dir) {
      case 0: return d_eta_;
      case 1: return d_xi1_;
      case 2: return d_xi2_;
      default: return d_t_;
    }
  }

  // Site layout: theta-major, t fastest.
  std::int64_t site(int ie, int j, int k, int it) const {
    return ((static_cast<std::int64_t>(ie) * spec_.n_xi1 + j) * spec_.n_xi2 + k) * spec_.n_t + it;
  }
  std::int64_t theta_index(int ie, int j, int k) const {
    return (static_cast<std::int64_t>(ie) * spec_.n_xi1 + j) * spec_.n_xi2 + k;
  }
  void decompose(std::int64_t s, int& ie, int& j, int& k, int& it) const {
    it = static_cast<int>(s % spec_.n_t);
    std::int64_t th = s / spec_.n_t;
    k = static_cast<int>(th % spec_.n_xi2);
    th /= spec_.n_xi2;
    j = static_cast<int>(th % spec_.n_xi1);
    ie = static_cast<int>(th / spec_.n_xi1);
  }

  double eta(int ie) const { return eta_[ie]; }
  double cos_eta(int ie) const { return cos_eta_[ie]; }
  double sin_eta(int ie) const { return sin_eta_[ie]; }
  double xi1(int j) const { return (j + 0.5) * d_xi1_; }
  double xi2(int k) const { return (k + 0.5) * d_xi2_; }
  double t_of(int it) const { return -spec_.L + (it + 0.5) * d_t_; }

  // Scale factors of the coframe in coordinate directions (eta,xi1,xi2,t).
  double h(int dir, int ie) const {
    switch (dir) {
      case 0: return spec_.r;
      case 1: return spec_.r * cos_eta_[ie];
      case 2: return spec_.r * sin_eta_[ie];
      default: return 1.0;
    }
  }

  // Quadrature weight (volume of the coordinate cell).
  double weight(int ie) const { return w_theta_row_[ie] * d_t_; }
  double weight_theta(int ie) const { return w_theta_row_[ie]; }
  double weight_site(std::int64_t s) const {
    int ie, j, k, it;
    decompose(s, ie, j, k, it);
    return weight(ie);
  }

  // R^4 embedding of the S^3 part, |u| = r.
  std::array<double, 4> embed(int ie, int j, int k) const {
    double x1 = xi1(j), x2 = xi2(k);
    return {spec_.r * cos_eta_[ie] * std::cos(x1), spec_.r * cos_eta_[ie] * std::sin(x1),
            spec_.r * sin_eta_[ie] * std::cos(x2), spec_.r * sin_eta_[ie] * std::sin(x2)};
  }

  // Analytic unit tangents of the Hopf frame E1..E3 at a site, as R^4 vectors.
  std::array<std::array<double, 4>, 3> frame_tangents(int ie, int j, int k) const {
    double c = cos_eta_[ie], s = sin_eta_[ie];
    double c1 = std::cos(xi1(j)), s1 = std::sin(xi1(j));
    double c2 = std::cos(xi2(k)), s2 = std::sin(xi2(k));
    return {{{-s * c1, -s * s1, c * c2, c * s2},
             {-s1, c1, 0.0, 0.0},
             {0.0, 0.0, -s2, c2}}};
  }

  double sphere_angle(std::int64_t theta_a, std::int64_t theta_b) const {
    int ia, ja, ka, ib, jb, kb;
    decompose_theta(theta_a, ia, ja, ka);
    decompose_theta(theta_b, ib, jb, kb);
    return sphere_angle(ia, ja, ka, ib, jb, kb);
  }
  double sphere_angle(int ia, int ja, int ka, int ib, int jb, int kb) const {
    double dot = cos_eta_[ia] * cos_eta_[ib] * std::cos(xi1(ja) - xi1(jb)) +
                 sin_eta_[ia] * sin_eta_[ib] * std::cos(xi2(ka) - xi2(kb));
    dot = std::max(-1.0, std::min(1.0, dot));
    return std::acos(dot);
  }
  void decompose_theta(std::int64_t th, int& ie, int& j, int& k) const {
    k = static_cast<int>(th % spec_.n_xi2);
    th /= spec_.n_xi2;
    j = static_cast<int>(th % spec_.n_xi1);
    ie = static_cast<int>(th / spec_.n_xi1);
  }

  double dt_separation(int ita, int itb) const {
    double dt = std::abs(t_of(ita) - t_of(itb));
    if (spec_.mode == TimeMode::periodic) dt = std::min(dt, period() - dt);
    return dt;
  }

  double geodesic_distance(std::int64_t sa, std::int64_t sb) const {
    int iea, ja, ka, ita, ieb, jb, kb, itb;
    decompose(sa, iea, ja, ka, ita);
    decompose(sb, ieb, jb, kb, itb);
    double g = sphere_angle(iea, ja, ka, ieb, jb, kb);
    double dt = dt_separation(ita, itb);
    return std::sqrt(spec_.r * spec_.r * g * g + dt * dt);
  }

  double integrate(const std::vector<double>& f) const {
    if (static_cast<std::int64_t>(f.size()) != n_sites())
      throw invalid_argument_error("integrate: field size does not match grid");
    double acc = 0.0;
    std::int64_t s = 0;
    for (int ie = 0; ie < spec_.n_eta; ++ie) {
      double w = weight(ie);
      std::int64_t block = static_cast<std::int64_t>(spec_.n_xi1) * spec_.n_xi2 * spec_.n_t;
      for (std::int64_t q = 0; q < block; ++q, ++s) acc += w * f[s];
    }
    return acc;
  }

  // t-slab volume helper (sum of weights with t in [t0, t1]).
  double slice_volume() const {
    double acc = 0.0;
    for (int ie = 0; ie < spec_.n_eta; ++ie)
      acc += w_theta_row_[ie] * spec_.n_xi1 * spec_.n_xi2;
    return acc;
  }

 private:
  GridSpec spec_;
  double d_eta_, d_xi1_, d_xi2_, d_t_;
  std::vector<double> eta_, cos_eta_, sin_eta_, w_theta_row_;
};

}  // namespace asdlab

#endif
