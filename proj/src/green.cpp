#include "asdlab/green.hpp"

#include <algorithm>
#include <cmath>

#include "asdlab/util.hpp"

namespace asdlab {

namespace {

// integral of 1/(4 pi^2 |z|^2) over the box prod [-h_i/2, h_i/2] in R^4
double box_singular_integral(const double h[4]) {
  // J(b) over [0,b] corner boxes by geometric refinement toward the corner
  double b[4] = {h[0] / 2, h[1] / 2, h[2] / 2, h[3] / 2};
  double total = 0.0;
  static const double gx[2] = {0.2113248654051871, 0.7886751345948129};  // 2-pt Gauss on [0,1]
  for (int level = 0; level < 40; ++level) {
    // the 15 subcells of [0,b]^4 away from the origin corner
    for (int mask = 1; mask < 16; ++mask) {
      double lo[4], hi[4];
      for (int i = 0; i < 4; ++i) {
        if (mask & (1 << i)) {
          lo[i] = b[i] / 2;
          hi[i] = b[i];
        } else {
          lo[i] = 0;
          hi[i] = b[i] / 2;
        }
      }
      double vol = 1.0;
      for (int i = 0; i < 4; ++i) vol *= hi[i] - lo[i];
      double acc = 0.0;
      for (int q0 = 0; q0 < 2; ++q0)
        for (int q1 = 0; q1 < 2; ++q1)
          for (int q2 = 0; q2 < 2; ++q2)
            for (int q3 = 0; q3 < 2; ++q3) {
              double z0 = lo[0] + gx[q0] * (hi[0] - lo[0]);
              double z1 = lo[1] + gx[q1] * (hi[1] - lo[1]);
              double z2 = lo[2] + gx[q2] * (hi[2] - lo[2]);
              double z3 = lo[3] + gx[q3] * (hi[3] - lo[3]);
              acc += 1.0 / (z0 * z0 + z1 * z1 + z2 * z2 + z3 * z3);
            }
      total += vol * acc / 16.0;
    }
    for (int i = 0; i < 4; ++i) b[i] /= 2;
    if (b[0] * b[0] + b[1] * b[1] + b[2] * b[2] + b[3] * b[3] < 1e-24) break;
  }
  return 16.0 * total / (4.0 * M_PI * M_PI);
}

}  // namespace

void GreenOperator::build_near_table() {
  // fine (gamma, dt) table covering the near-field window; used by the
  // adaptive cell quadrature
  const Grid& g = *grid_;
  near_max_ = near_dist_ * 1.3 + 2.0 * std::max(g.d_t(), g.r() * g.d_eta());
  near_ng_ = 1536;
  near_nt_ = 768;
  near_dg_ = near_max_ / (g.r() * (near_ng_ - 1));
  near_ddt_ = near_max_ / (near_nt_ - 1);
  near_table_.assign(static_cast<std::size_t>(near_ng_) * near_nt_, 0.0);
  parallel_for(near_ng_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t ig = lo; ig < hi; ++ig) {
      double gamma = std::max(ig * near_dg_, 1e-9);
      for (int idt = 0; idt < near_nt_; ++idt) near_table_[ig * near_nt_ + idt] = eval_angle(gamma, idt * near_ddt_);
    }
  });
}

double GreenOperator::eval_near(double gamma, double dt) const {
  double xg = gamma / near_dg_, xt = dt / near_ddt_;
  if (xg >= near_ng_ - 1 || xt >= near_nt_ - 1) return eval_table(gamma, dt);
  int ig = static_cast<int>(xg), it = static_cast<int>(xt);
  double fg = xg - ig, ft = xt - it;
  double v00 = near_table_[ig * near_nt_ + it], v01 = near_table_[ig * near_nt_ + it + 1];
  double v10 = near_table_[(ig + 1) * near_nt_ + it], v11 = near_table_[(ig + 1) * near_nt_ + it + 1];
  return (1 - fg) * ((1 - ft) * v00 + ft * v01) + fg * ((1 - ft) * v10 + ft * v11);
}

double GreenOperator::cex_of(int ie) const { return grid_->cos_eta(ie); }
double GreenOperator::sex_of(int ie) const { return grid_->sin_eta(ie); }

GreenOperator::GreenOperator(const Grid& g, double a, int kmax) : grid_(&g), a_(a), kmax_(kmax) {
  if (a <= 0.0) throw invalid_argument_error("green: a must be positive");
  if (kmax < 8) throw invalid_argument_error("green: k_max must be at least 8");
  b_ = a * g.r() * g.r() - 1.0;
  if (g.mode() == TimeMode::periodic) {
    double P = g.period();
    n_images_ = 1 + static_cast<int>(std::ceil(30.0 / (std::sqrt(a) * P)));
  }
  // tail: remaining correction terms fall off like |b| / nu^2
  tail_bound_ = std::abs(b_) / (8.0 * M_PI * M_PI * g.r() * g.r() * (kmax + 1));
  {
    double max_cell = 0.0;
    for (int ie = 0; ie < g.n_eta(); ++ie) {
      double h2 = g.r() * g.cos_eta(ie) * g.d_xi1(), h3 = g.r() * g.sin_eta(ie) * g.d_xi2();
      double dg2 = g.r() * g.d_eta();
      max_cell = std::max(max_cell, std::sqrt(dg2 * dg2 + h2 * h2 + h3 * h3 + g.d_t() * g.d_t()));
    }
    near_dist_ = 1.2 * max_cell;
  }
  build_table();
  build_near_table();
  build_conv();
  std::vector<double> one(g.n_sites(), 1.0);
  auto kq = convolve(one);
  K_quad_ = *std::max_element(kq.begin(), kq.end());
}

double GreenOperator::mu(int k) const {
  double nu = k + 1.0;
  return std::sqrt(nu * nu + b_) / grid_->r();
}

double GreenOperator::eval_angle(double gamma, double dt) const {
  const double r = grid_->r();
  auto once = [&](double sep) {
    double s = std::abs(sep) / r;
    double q = std::exp(-s);
    double cg = std::cos(gamma);
    double g0 = q / (4.0 * M_PI * M_PI * r * r * (1.0 - 2.0 * q * cg + q * q));
    // Chebyshev recurrence for U_{nu-1}(cos gamma) = sin(nu gamma)/sin(gamma);
    // the nu-th t-factor splits as q^nu times exp(-s(sqrt(nu^2+b)-nu)),
    // with the second factor Taylor-expanded once it is close to 1
    double um1 = 0.0, u = 1.0;
    double corr = 0.0;
    double qn = 1.0;
    const double z = 1.0 / (2.0 * M_PI * M_PI * r * r * r);
    const double tiny = 1e-18 * (std::abs(g0) + 1e-6);
    for (int nu = 1; nu <= kmax_ + 1; ++nu) {
      qn *= q;
      if (qn * nu * nu * z * r < tiny) break;  // remaining terms below noise
      double root = std::sqrt(nu * nu + b_);
      double x = s * (root - nu);  // >= 0 for b > 0; small for large nu
      double ex = (std::abs(x) < 1e-3) ? 1.0 - x * (1.0 - 0.5 * x) : std::exp(-x);
      double c = r * qn * (ex / (2.0 * root) - 1.0 / (2.0 * nu));
      corr += (nu * u * z) * c;
      double un = 2.0 * cg * u - um1;
      um1 = u;
      u = un;
    }
    return g0 + corr;
  };
  if (n_images_ == 0) return once(dt);
  double P = grid_->period();
  double acc = 0.0;
  for (int m = -n_images_; m <= n_images_; ++m) acc += once(dt + m * P);
  return acc;
}

void GreenOperator::build_table() {
  const Grid& g = *grid_;
  // dt axis refined below the grid spacing so that Gauss nodes interpolate
  // with error well under the cell-average accuracy
  dt_step_ = g.d_t() / 4.0;
  n_dt_ = 4 * g.n_t() + 2;
  table_.assign(static_cast<std::size_t>(n_gamma_) * n_dt_, 0.0);
  double dg = M_PI / (n_gamma_ - 1);
  parallel_for(n_gamma_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t ig = lo; ig < hi; ++ig) {
      double gamma = ig * dg;
      if (ig == 0) gamma = 1e-9;  // table rows avoid the exact diagonal
      for (int idt = 0; idt < n_dt_; ++idt) {
        double dt = idt * dt_step_;
        if (g.mode() == TimeMode::periodic) dt = std::min(dt, g.period() - dt);
        table_[ig * n_dt_ + idt] = eval_angle(gamma, dt);
      }
    }
  });
}

double GreenOperator::eval_table(double gamma, double dt) const {
  const Grid& g = *grid_;
  if (g.mode() == TimeMode::periodic) {
    dt = std::fmod(std::abs(dt), g.period());
    dt = std::min(dt, g.period() - dt);
  } else {
    dt = std::abs(dt);
  }
  double dg = M_PI / (n_gamma_ - 1);
  double xg = std::min(std::max(gamma, 0.0), M_PI) / dg;
  double xt = std::min(dt / dt_step_, static_cast<double>(n_dt_ - 1));
  int ig = std::min(static_cast<int>(xg), n_gamma_ - 2);
  int it = std::min(static_cast<int>(xt), n_dt_ - 2);
  double fg = xg - ig, ft = xt - it;
  double v00 = table_[ig * n_dt_ + it], v01 = table_[ig * n_dt_ + it + 1];
  double v10 = table_[(ig + 1) * n_dt_ + it], v11 = table_[(ig + 1) * n_dt_ + it + 1];
  return (1 - fg) * ((1 - ft) * v00 + ft * v01) + fg * ((1 - ft) * v10 + ft * v11);
}

double GreenOperator::eval_sites(std::int64_t x, std::int64_t y) const {
  const Grid& g = *grid_;
  int iex, jx, kx, itx, iey, jy, ky, ity;
  g.decompose(x, iex, jx, kx, itx);
  g.decompose(y, iey, jy, ky, ity);
  double gamma = g.sphere_angle(iex, jx, kx, iey, jy, ky);
  double dt = g.dt_separation(itx, ity);
  return eval_table(gamma, dt);
}

namespace {
struct CellBox {
  double lo[4], hi[4];  // offsets: (eta_y, xi1, xi2, dt) relative cell box
};
}

// Recursive adaptive Gauss integration of g(x, .) sqrt(det) over a y-cell.
// Subcells well separated from x are handled by 2-point Gauss; subcells
// hugging the singularity are subdivided (the diagonal cell's singular part
// is handled separately by the caller through the flat box model).
double GreenOperator::near_cell_integral(double eta_x, const CellBoxArg& box, bool subtract_singular,
                                         int depth) const {
  const Grid& g = *grid_;
  const double r = g.r();
  static const double gp2[2] = {-0.5773502691896258, 0.5773502691896258};
  double cex = std::cos(eta_x), sex = std::sin(eta_x);
  // center distance and subcell diagonal
  double cc[4];
  double diag2 = 0.0;
  for (int i = 0; i < 4; ++i) cc[i] = 0.5 * (box.lo[i] + box.hi[i]);
  {
    double e1 = r * (box.hi[0] - box.lo[0]);
    double e2 = r * std::cos(cc[0]) * (box.hi[1] - box.lo[1]);
    double e3 = r * std::sin(std::abs(cc[0])) * (box.hi[2] - box.lo[2]);
    double e4 = box.hi[3] - box.lo[3];
    diag2 = e1 * e1 + e2 * e2 + e3 * e3 + e4 * e4;
  }
  double dotc = cex * std::cos(cc[0]) * std::cos(cc[1]) + sex * std::sin(cc[0]) * std::cos(cc[2]);
  dotc = std::max(-1.0, std::min(1.0, dotc));
  double gc = std::acos(dotc);
  double dtc = cc[3];
  if (g.mode() == TimeMode::periodic) {
    dtc = std::fmod(std::abs(dtc), g.period());
    dtc = std::min(dtc, g.period() - dtc);
  } else {
    dtc = std::abs(dtc);
  }
  double dc2 = r * r * gc * gc + dtc * dtc;
  bool resolved = dc2 > 2.25 * diag2;  // d_center > 1.5 subcell diagonal
  if (!resolved && depth < 4) {
    double acc = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
      CellBoxArg sub;
      for (int i = 0; i < 4; ++i) {
        double mid = 0.5 * (box.lo[i] + box.hi[i]);
        if (mask & (1 << i)) {
          sub.lo[i] = mid;
          sub.hi[i] = box.hi[i];
        } else {
          sub.lo[i] = box.lo[i];
          sub.hi[i] = mid;
        }
      }
      acc += near_cell_integral(eta_x, sub, subtract_singular, depth + 1);
    }
    return acc;
  }
  double acc = 0.0;
  for (int q0 = 0; q0 < 2; ++q0)
    for (int q1 = 0; q1 < 2; ++q1)
      for (int q2 = 0; q2 < 2; ++q2)
        for (int q3 = 0; q3 < 2; ++q3) {
          auto node = [&](int i, int q) {
            return 0.5 * (box.lo[i] + box.hi[i]) + 0.5 * gp2[q] * (box.hi[i] - box.lo[i]);
          };
          double ey = node(0, q0), x1 = node(1, q1), x2 = node(2, q2);
          double dt = node(3, q3);
          if (g.mode() == TimeMode::periodic) {
            dt = std::fmod(std::abs(dt), g.period());
            dt = std::min(dt, g.period() - dt);
          } else {
            dt = std::abs(dt);
          }
          double dd = cex * std::cos(ey) * std::cos(x1) + sex * std::sin(ey) * std::cos(x2);
          dd = std::max(-1.0, std::min(1.0, dd));
          double gm = std::acos(dd);
          double v;
          if (subtract_singular) {
            v = eval_angle(gm, dt);
            double d2 = r * r * gm * gm + dt * dt;
            if (d2 > 0) v -= 1.0 / (4.0 * M_PI * M_PI * d2);
          } else {
            v = eval_near(gm, dt);
          }
          acc += v * r * r * r * std::cos(ey) * std::sin(std::abs(ey)) / 16.0;
        }
  double vol = 1.0;
  for (int i = 0; i < 4; ++i) vol *= box.hi[i] - box.lo[i];
  return acc * vol;
}

double GreenOperator::cell_average(int ie_x, std::int64_t th_x, int ie_y, int dj, int dk, int ddt, bool near) const {
  const Grid& g = *grid_;
  const double r = g.r();
  // far cells: 2-point Gauss of the tabulated kernel over the y-cell
  static const double gp2[2] = {-0.5773502691896258, 0.5773502691896258};
  static const double gw2[2] = {1.0, 1.0};
  double ex = g.eta(ie_x);
  bool diagonal = (ie_x == ie_y && dj == 0 && dk == 0 && ddt == 0);
  if (near) {
    CellBoxArg box;
    box.lo[0] = ie_y * g.d_eta();
    box.hi[0] = (ie_y + 1) * g.d_eta();
    box.lo[1] = (dj - 0.5) * g.d_xi1();
    box.hi[1] = (dj + 0.5) * g.d_xi1();
    box.lo[2] = (dk - 0.5) * g.d_xi2();
    box.hi[2] = (dk + 0.5) * g.d_xi2();
    box.lo[3] = (ddt - 0.5) * g.d_t();
    box.hi[3] = (ddt + 0.5) * g.d_t();
    double out = near_cell_integral(ex, box, diagonal, 0);
    if (diagonal) {
      double h[4] = {r * g.d_eta(), r * cex_of(ie_x) * g.d_xi1(), r * sex_of(ie_x) * g.d_xi2(), g.d_t()};
      out += box_singular_integral(h);
    }
    return out;
  }
  double acc = 0.0;
  const double* gp = gp2;
  const double* gw = gw2;
  const int ng = 2;
  double cex = std::cos(ex), sex = std::sin(ex);
  for (int q0 = 0; q0 < ng; ++q0)
    for (int q1 = 0; q1 < ng; ++q1)
      for (int q2 = 0; q2 < ng; ++q2)
        for (int q3 = 0; q3 < ng; ++q3) {
          double w4 = gw[q0] * gw[q1] * gw[q2] * gw[q3] / 16.0;
          double ey = g.eta(ie_y) + 0.5 * gp[q0] * g.d_eta();
          double x1 = dj * g.d_xi1() + 0.5 * gp[q1] * g.d_xi1();
          double x2 = dk * g.d_xi2() + 0.5 * gp[q2] * g.d_xi2();
          double dt = ddt * g.d_t() + 0.5 * gp[q3] * g.d_t();
          if (g.mode() == TimeMode::periodic) {
            dt = std::fmod(std::abs(dt), g.period());
            dt = std::min(dt, g.period() - dt);
          } else {
            dt = std::abs(dt);
          }
          double dot = cex * std::cos(ey) * std::cos(x1) + sex * std::sin(ey) * std::cos(x2);
          dot = std::max(-1.0, std::min(1.0, dot));
          double gamma = std::acos(dot);
          double val = near ? eval_angle(gamma, dt) : eval_table(gamma, dt);
          if (diagonal) {
            double d2 = r * r * gamma * gamma + dt * dt;
            if (d2 > 0) val -= 1.0 / (4.0 * M_PI * M_PI * d2);
          }
          double sqrtg = r * r * r * std::cos(ey) * std::sin(ey);
          acc += w4 * val * sqrtg;
        }
  double cellvol_coord = g.d_eta() * g.d_xi1() * g.d_xi2() * g.d_t();
  (void)th_x;
  return acc * cellvol_coord;
}

void GreenOperator::build_conv() {
  const Grid& g = *grid_;
  const double r = g.r();
  int ne = g.n_eta(), n1 = g.n_xi1(), n2 = g.n_xi2(), nt = g.n_t();
  conv_.assign(static_cast<std::size_t>(ne) * ne * n1 * n2 * nt, 0.0);
  const double near_dist = near_dist_;
  parallel_for(static_cast<std::int64_t>(ne) * ne, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) {
      int ie_x = static_cast<int>(p / ne), ie_y = static_cast<int>(p % ne);
      for (int dj = 0; dj < n1; ++dj)
        for (int dk = 0; dk < n2; ++dk) {
          double dot = g.cos_eta(ie_x) * g.cos_eta(ie_y) * std::cos(dj * g.d_xi1()) +
                       g.sin_eta(ie_x) * g.sin_eta(ie_y) * std::cos(dk * g.d_xi2());
          dot = std::max(-1.0, std::min(1.0, dot));
          double gamma = std::acos(dot);
          std::size_t base = (((static_cast<std::size_t>(ie_x) * ne + ie_y) * n1 + dj) * n2 + dk) * nt;
          for (int ddt = 0; ddt < nt; ++ddt) {
            double dt = ddt * g.d_t();
            if (g.mode() == TimeMode::periodic) dt = std::min(dt, g.period() - dt);
            double d = std::sqrt(r * r * gamma * gamma + dt * dt);
            conv_[base + ddt] = cell_average(ie_x, 0, ie_y, dj, dk, ddt, d <= near_dist);
          }
        }
    }
  });
}

std::vector<double> GreenOperator::convolve(const std::vector<double>& density) const {
  const Grid& g = *grid_;
  int ne = g.n_eta(), n1 = g.n_xi1(), n2 = g.n_xi2(), nt = g.n_t();
  std::vector<double> out(g.n_sites(), 0.0);
  // per-theta-column nonzero t-range of the source
  std::int64_t nth = g.n_theta();
  std::vector<int> t_lo(nth, nt), t_hi(nth, -1);
  for (std::int64_t th = 0; th < nth; ++th) {
    const double* col = density.data() + th * nt;
    for (int it = 0; it < nt; ++it)
      if (col[it] != 0.0) {
        if (t_lo[th] > it) t_lo[th] = it;
        t_hi[th] = it;
      }
  }
  bool periodic = g.mode() == TimeMode::periodic;
  // frozen-end extension beyond truncated ends, closed in the zonal mode:
  // the source is continued by its boundary-slice values and the kernel by
  // its sphere average exp(-sqrt(a)|dt|)/(2 sqrt a)
  double end_lo = 0.0, end_hi = 0.0;
  if (!periodic) {
    double vol = 2.0 * M_PI * M_PI * std::pow(g.r(), 3);
    for (std::int64_t th = 0; th < nth; ++th) {
      int ie, j, k;
      g.decompose_theta(th, ie, j, k);
      end_lo += g.weight_theta(ie) * density[th * nt + 0];
      end_hi += g.weight_theta(ie) * density[th * nt + nt - 1];
    }
    end_lo /= vol;
    end_hi /= vol;
  }
  parallel_for(nth, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t thx = lo; thx < hi; ++thx) {
      int ie_x, jx, kx;
      g.decompose_theta(thx, ie_x, jx, kx);
      double* ox = out.data() + thx * nt;
      for (int ie_y = 0; ie_y < ne; ++ie_y)
        for (int dj = 0; dj < n1; ++dj)
          for (int dk = 0; dk < n2; ++dk) {
            int jy = (jx + dj) % n1, ky = (kx + dk) % n2;
            std::int64_t thy = g.theta_index(ie_y, jy, ky);
            if (t_hi[thy] < t_lo[thy]) continue;
            const double* row =
                conv_.data() + (((static_cast<std::size_t>(ie_x) * ne + ie_y) * n1 + dj) * n2 + dk) * nt;
            const double* sy = density.data() + thy * nt;
            for (int tx = 0; tx < nt; ++tx) {
              double acc = 0.0;
              for (int ty = t_lo[thy]; ty <= t_hi[thy]; ++ty) {
                int idx = periodic ? ((tx - ty + nt) % nt) : std::abs(tx - ty);
                acc += row[idx] * sy[ty];
              }
              ox[tx] += acc;
            }
          }
    }
  });
  if (!periodic && (end_lo != 0.0 || end_hi != 0.0)) {
    double sa = std::sqrt(a_), L = g.spec().L;
    for (std::int64_t s = 0; s < g.n_sites(); ++s) {
      int ie, j, k, it;
      g.decompose(s, ie, j, k, it);
      double t = g.t_of(it);
      out[s] += end_hi * std::exp(-sa * (L - t)) / (2.0 * a_) +
                end_lo * std::exp(-sa * (L + t)) / (2.0 * a_);
    }
  }
  return out;
}

TaubesReport GreenOperator::taubes_norm(const std::vector<double>& density) const {
  TaubesReport rep;
  rep.pointwise = convolve(density);
  rep.norm_T = rep.pointwise.empty() ? 0.0 : *std::max_element(rep.pointwise.begin(), rep.pointwise.end());
  rep.K = K_quad_;
  return rep;
}

TaubesReport GreenOperator::taubes_norm(const Field& phi) const { return taubes_norm(pointwise_norms(phi)); }

double GreenOperator::sphere_averaged(double dt) const {
  double sa = std::sqrt(a_);
  auto once = [&](double sep) { return std::exp(-sa * std::abs(sep)) / (2.0 * sa); };
  if (n_images_ == 0) return once(dt);
  double acc = 0.0;
  for (int m = -n_images_; m <= n_images_; ++m) acc += once(dt + m * grid_->period());
  return acc;
}

std::vector<double> GreenOperator::delta_profile(double T) const {
  const Grid& g = *grid_;
  if (T < 0 || T + 1.0 > g.spec().L)
    throw invalid_argument_error("delta_profile: collar T<|t|<T+1 not inside the grid");
  std::vector<double> ind(g.n_sites(), 0.0);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    double t = std::abs(g.t_of(it));
    if (t > T && t < T + 1.0) ind[s] = 1.0;
  }
  return convolve(ind);
}

double GreenOperator::delta_profile_analytic(double t, double T) const {
  double sa = std::sqrt(a_);
  auto seg = [&](double lo, double hi) {
    // integral of e^{-sa |t - tau|} / (2 sa) dtau over [lo, hi]
    auto prim = [&](double tau) {
      if (tau <= t) return std::exp(-sa * (t - tau)) / (2.0 * sa * sa);
      return (2.0 - std::exp(-sa * (tau - t))) / (2.0 * sa * sa);
    };
    return prim(hi) - prim(lo);
  };
  return seg(T, T + 1.0) + seg(-T - 1.0, -T);
}

double GreenOperator::delta1_prime_analytic(double delta1) const {
  return (1.0 - std::exp(-std::sqrt(a_) * delta1)) / a_;
}

double GreenOperator::delta1_prime_quadrature(double delta1) const {
  const Grid& g = *grid_;
  std::vector<double> ind(g.n_sites(), 0.0);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    if (std::abs(g.t_of(it)) < delta1) ind[s] = 1.0;
  }
  auto conv = convolve(ind);
  return *std::max_element(conv.begin(), conv.end());
}

Delta1Result GreenOperator::delta1_budget(double d) const {
  if (d < 0) throw invalid_argument_error("delta1_budget: d must be nonnegative");
  const double eps0_over_4 = 1.0 / 4000.0;
  double poly = 5.0 + 7.0 * d + d * d;
  Delta1Result res;
  // continuum solution of (5+7d+d^2)(1 - e^{-sqrt(a) x})/a = eps0/4
  double target = eps0_over_4 * a_ / poly;
  res.analytic_delta1 = (target >= 1.0) ? 1.0 : -std::log(1.0 - target) / std::sqrt(a_);
  res.analytic_delta1 = std::min(res.analytic_delta1, 1.0);
  // largest grid-representable delta1 = m * dt, m >= 1, meeting the budget
  const Grid& g = *grid_;
  int m_max = static_cast<int>(std::floor(std::min(1.0, res.analytic_delta1) / g.d_t()));
  if (m_max < 1) {
    res.feasible = false;
    res.delta1 = 0.0;
    res.delta1_prime = delta1_prime_analytic(g.d_t());
    res.budget = poly * res.delta1_prime;
    return res;
  }
  res.feasible = true;
  res.delta1 = m_max * g.d_t();
  res.delta1_prime = delta1_prime_analytic(res.delta1);
  res.budget = poly * res.delta1_prime;
  return res;
}

}  // namespace asdlab
