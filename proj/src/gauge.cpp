#include "asdlab/gauge.hpp"

#include <cmath>

#include "asdlab/util.hpp"

namespace asdlab {

namespace {

// Centered difference of a quaternion field (scalar ghost behavior).
void diff_quat(const Grid& g, int dir, const std::vector<Quat>& q, std::vector<Quat>& out) {
  const double inv2d = 1.0 / (2.0 * g.d_coord(dir));
  Parity par{+1, +1};
  out.resize(q.size());
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    ops::Leg p = ops::neighbor(g, ie, j, k, it, dir, +1, par);
    ops::Leg m = ops::neighbor(g, ie, j, k, it, dir, -1, par);
    const Quat& a = q[p.site];
    const Quat& b = q[m.site];
    out[s] = Quat((a.w - b.w) * inv2d, (a.x - b.x) * inv2d, (a.y - b.y) * inv2d, (a.z - b.z) * inv2d);
  }
}

}  // namespace

Field gauge_transform(const Field& a_frame, const GaugeField& g) {
  const Grid& gr = *a_frame.grid;
  Field a_c = ops::one_form_to_coord(a_frame);
  Field out_c(gr, FormKind::OneForm);
  std::vector<Quat> dg;
  for (int mu = 0; mu < 4; ++mu) {
    diff_quat(gr, mu, g.q, dg);
    for (std::int64_t s = 0; s < gr.n_sites(); ++s) {
      Su2 rot = adjoint(g.q[s], a_c.get(s, mu));
      Su2 der = dexp_to_su2(dg[s], g.q[s]);
      out_c.set(s, mu, rot - der);
    }
  }
  return ops::one_form_to_frame(out_c);
}

Field gauge_transform_const(const Field& a_frame, const Quat& g) {
  Field out = a_frame;
  for (std::int64_t s = 0; s < a_frame.grid->n_sites(); ++s)
    for (int mu = 0; mu < 4; ++mu) out.set(s, mu, adjoint(g, a_frame.get(s, mu)));
  return out;
}

std::vector<double> chern_weil_density(const Field& f_frame) {
  const Grid& g = *f_frame.grid;
  Field sd = ops::sd_project(f_frame);
  Field asd = ops::asd_project(f_frame);
  std::vector<double> out(g.n_sites());
  const double c = 1.0 / (8.0 * M_PI * M_PI);
  for (std::int64_t s = 0; s < g.n_sites(); ++s)
    out[s] = c * (pointwise_norm2(asd, s) - pointwise_norm2(sd, s));
  return out;
}

double windowed_energy_sup(const std::vector<double>& f2, const Grid& g, double T_window) {
  int m = static_cast<int>(std::lround(T_window / g.d_t()));
  if (m < 1 || (g.mode() == TimeMode::truncated && m > g.n_t()))
    throw invalid_argument_error("rho: window does not fit the grid");
  // per-slice energies
  std::vector<double> slice(g.n_t(), 0.0);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    slice[it] += g.weight(ie) * f2[s];
  }
  double best = 0.0;
  if (g.mode() == TimeMode::periodic) {
    for (int t0 = 0; t0 < g.n_t(); ++t0) {
      double acc = 0.0;
      for (int q = 0; q < m; ++q) acc += slice[(t0 + q) % g.n_t()];
      best = std::max(best, acc);
    }
  } else {
    for (int t0 = 0; t0 + m <= g.n_t(); ++t0) {
      double acc = 0.0;
      for (int q = 0; q < m; ++q) acc += slice[t0 + q];
      best = std::max(best, acc);
    }
  }
  return best;
}

double rho_estimate(const Field& a_frame, double T_window) {
  const Grid& g = *a_frame.grid;
  Field f = ops::curvature(a_frame);
  std::vector<double> f2(g.n_sites());
  for (std::int64_t s = 0; s < g.n_sites(); ++s) f2[s] = pointwise_norm2(f, s);
  int m = static_cast<int>(std::lround(T_window / g.d_t()));
  double T_eff = m * g.d_t();
  return windowed_energy_sup(f2, g, T_window) / (8.0 * M_PI * M_PI * T_eff);
}

CurvatureReport curvature_report(const Field& a_frame, double rho_window) {
  const Grid& g = *a_frame.grid;
  Field f = ops::curvature(a_frame);
  Field fp = ops::sd_project(f);
  CurvatureReport rep;
  std::vector<double> f2(g.n_sites());
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    f2[s] = pointwise_norm2(f, s);
    rep.max_f = std::max(rep.max_f, f2[s]);
    rep.max_f_plus = std::max(rep.max_f_plus, pointwise_norm2(fp, s));
  }
  rep.max_f = std::sqrt(rep.max_f);
  rep.max_f_plus = std::sqrt(rep.max_f_plus);
  rep.energy = g.integrate(f2);
  rep.chern_weil = g.integrate(chern_weil_density(f));
  rep.rho_window = rho_window;
  if (rho_window > 0.0) {
    int m = static_cast<int>(std::lround(rho_window / g.d_t()));
    if (m >= 1 && (g.mode() == TimeMode::periodic || m <= g.n_t()))
      rep.rho = windowed_energy_sup(f2, g, rho_window) / (8.0 * M_PI * M_PI * (m * g.d_t()));
  }
  return rep;
}

Field sample_flat(const Grid& g) { return Field(g, FormKind::OneForm); }

Field sample_bpst_cylinder(const Grid& g, double center, double scale) {
  // anti-self-dual 't Hooft symbols; eta_bar[a][mu][nu]
  static const auto eta_bar = [] {
    std::array<std::array<std::array<double, 4>, 4>, 3> e{};
    for (int a = 0; a < 3; ++a) {
      e[a][(a + 1) % 3][(a + 2) % 3] = 1.0;
      e[a][(a + 2) % 3][(a + 1) % 3] = -1.0;
      e[a][a][3] = -1.0;
      e[a][3][a] = 1.0;
    }
    return e;
  }();

  Field out(g, FormKind::OneForm);
  const double r = g.r();
  const double lam = scale * r * std::exp(center / r);
  for (std::int64_t th = 0; th < g.n_theta(); ++th) {
    int ie, j, k;
    g.decompose_theta(th, ie, j, k);
    auto u = g.embed(ie, j, k);
    auto tang = g.frame_tangents(ie, j, k);
    for (int it = 0; it < g.n_t(); ++it) {
      std::int64_t s = g.site(ie, j, k, it);
      double ef = std::exp(g.t_of(it) / r);
      double x[4] = {ef * u[0], ef * u[1], ef * u[2], ef * u[3]};
      double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
      double f = 2.0 / (x2 + lam * lam);
      // A^a_mu = 2 etabar^a_{mu nu} x_nu / (x^2 + lam^2)
      double A[3][4];
      for (int a = 0; a < 3; ++a)
        for (int mu = 0; mu < 4; ++mu) {
          double acc = 0.0;
          for (int nu = 0; nu < 4; ++nu) acc += eta_bar[a][mu][nu] * x[nu];
          A[a][mu] = f * acc;
        }
      // pushforwards of the frame: dPsi(E_i) = e^{t/r} E_i, dPsi(d_t) = (e^{t/r}/r) u
      for (int dir = 0; dir < 4; ++dir) {
        double V[4];
        if (dir < 3)
          for (int q = 0; q < 4; ++q) V[q] = ef * tang[dir][q];
        else
          for (int q = 0; q < 4; ++q) V[q] = ef * u[q] / r;
        Su2 val;
        for (int a = 0; a < 3; ++a) {
          double acc = 0.0;
          for (int mu = 0; mu < 4; ++mu) acc += A[a][mu] * V[mu];
          val.a[a] = acc;
        }
        out.set(s, dir, val);
      }
    }
  }
  return out;
}

namespace {

// Smooth seeded building blocks: low polynomials of the unit embedding
// times t-harmonics (periodic) or a polynomial profile (truncated).
struct HarmonicSet {
  struct Term {
    int i, j;       // u_i u_j / r^2 factor; i = -1 means the constant 1
    int tmode;      // 0: 1, 1: cos, 2: sin, 3: t/L (truncated only)
    int mfreq;
    double coef;
  };
  std::vector<Term> terms;

  static HarmonicSet random(Rng& rng, bool periodic, int nterms) {
    HarmonicSet h;
    for (int q = 0; q < nterms; ++q) {
      Term t;
      t.i = rng.index(5) - 1;
      t.j = rng.index(4);
      t.tmode = periodic ? rng.index(3) : rng.index(4);
      if (!periodic && t.tmode == 3) t.tmode = 3;
      t.mfreq = 1 + rng.index(2);
      t.coef = rng.uniform(-1.0, 1.0);
      h.terms.push_back(t);
    }
    return h;
  }

  double eval(const std::array<double, 4>& u, double r, double t, double L, bool periodic) const {
    double acc = 0.0;
    for (const auto& tm : terms) {
      double sp = (tm.i < 0) ? 1.0 : (u[tm.i] / r) * (u[tm.j] / r);
      double tp = 1.0;
      double ph = M_PI * tm.mfreq * (t + L) / L;  // period 2L
      switch (tm.tmode) {
        case 1: tp = std::cos(ph); break;
        case 2: tp = std::sin(ph); break;
        case 3: tp = t / L; break;
        default: break;
      }
      (void)periodic;
      acc += tm.coef * sp * tp;
    }
    return acc;
  }
};

Field synthetic_from_sets(const Grid& g, std::uint64_t seed, double amplitude, double t_support,
                          double collar_T = -1.0) {
  Rng rng(seed);
  bool periodic = g.mode() == TimeMode::periodic;
  // coefficient functions c[a][i] for the R^4 1-form sum_i c_i du^i, plus a dt part
  HarmonicSet cset[3][5];
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < 5; ++i) cset[a][i] = HarmonicSet::random(rng, periodic, 3);

  Field out(g, FormKind::OneForm);
  const double r = g.r(), L = g.spec().L;
  for (std::int64_t th = 0; th < g.n_theta(); ++th) {
    int ie, j, k;
    g.decompose_theta(th, ie, j, k);
    auto u = g.embed(ie, j, k);
    auto tang = g.frame_tangents(ie, j, k);
    for (int it = 0; it < g.n_t(); ++it) {
      std::int64_t s = g.site(ie, j, k, it);
      double t = g.t_of(it);
      double env = 1.0;
      if (collar_T >= 0.0) {
        // keep one stencil cell of margin so the discrete curvature support
        // stays strictly inside the collar
        double half = 0.5 - 2.0 * g.d_t();
        if (half < 0.5 * g.d_t()) half = 0.5 * g.d_t();
        double z = (std::abs(t) - (collar_T + 0.5)) / half;
        env = (std::abs(z) < 1.0) ? std::pow(1.0 - z * z, 3) : 0.0;
      } else if (t_support > 0.0) {
        double z = t / t_support;
        env = (std::abs(z) < 1.0) ? std::pow(1.0 - z * z, 3) : 0.0;
      }
      for (int dir = 0; dir < 4; ++dir) {
        Su2 val;
        for (int a = 0; a < 3; ++a) {
          double acc = 0.0;
          if (dir < 3) {
            for (int i = 0; i < 4; ++i) acc += cset[a][i].eval(u, r, t, L, periodic) * tang[dir][i];
          } else {
            acc = cset[a][4].eval(u, r, t, L, periodic);
          }
          val.a[a] = env * acc;
        }
        out.set(s, dir, val);
      }
    }
  }
  double m = sup_norm(out);
  if (m > 0.0) scale(out, amplitude / m);
  return out;
}

}  // namespace

Field sample_synthetic(const Grid& g, std::uint64_t seed, double amplitude) {
  return synthetic_from_sets(g, seed, amplitude, 0.0);
}

Field sample_synthetic_bump(const Grid& g, std::uint64_t seed, double amplitude, double t_support) {
  return synthetic_from_sets(g, seed, amplitude, t_support);
}

Field sample_collar_bump(const Grid& g, std::uint64_t seed, double amplitude, double T) {
  return synthetic_from_sets(g, seed, amplitude, 0.0, T);
}

GaugeField sample_gauge(const Grid& g, std::uint64_t seed, double amplitude) {
  Rng rng(seed);
  bool periodic = g.mode() == TimeMode::periodic;
  HarmonicSet w[3];
  for (int a = 0; a < 3; ++a) w[a] = HarmonicSet::random(rng, periodic, 3);
  GaugeField out(g);
  const double r = g.r(), L = g.spec().L;
  double maxn = 0.0;
  std::vector<Su2> logs(g.n_sites());
  for (std::int64_t th = 0; th < g.n_theta(); ++th) {
    int ie, j, k;
    g.decompose_theta(th, ie, j, k);
    auto u = g.embed(ie, j, k);
    for (int it = 0; it < g.n_t(); ++it) {
      std::int64_t s = g.site(ie, j, k, it);
      double t = g.t_of(it);
      Su2 v(w[0].eval(u, r, t, L, periodic), w[1].eval(u, r, t, L, periodic), w[2].eval(u, r, t, L, periodic));
      logs[s] = v;
      maxn = std::max(maxn, norm(v));
    }
  }
  double sc = maxn > 0 ? amplitude / maxn : 0.0;
  for (std::int64_t s = 0; s < g.n_sites(); ++s) out.q[s] = exp_su2(sc * logs[s]);
  return out;
}

GaugeField winding_gauge(const Grid& g, int n) {
  GaugeField out(g);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    auto u = g.embed(ie, j, k);
    Quat q(u[0] / g.r(), u[1] / g.r(), u[2] / g.r(), u[3] / g.r());
    Quat w(1, 0, 0, 0);
    int m = std::abs(n);
    Quat base = n >= 0 ? q : conj(q);
    for (int p = 0; p < m; ++p) w = w * base;
    out.q[s] = w;
  }
  return out;
}

Field winding_flat_connection(const Grid& g, int n) {
  Field out(g, FormKind::OneForm);
  if (n == 0) return out;
  int m = std::abs(n);
  for (std::int64_t th = 0; th < g.n_theta(); ++th) {
    int ie, j, k;
    g.decompose_theta(th, ie, j, k);
    auto u = g.embed(ie, j, k);
    auto tang = g.frame_tangents(ie, j, k);
    Quat q(u[0] / g.r(), u[1] / g.r(), u[2] / g.r(), u[3] / g.r());
    Quat base = n >= 0 ? q : conj(q);
    // powers q^0 .. q^m
    std::vector<Quat> pw(m + 1);
    pw[0] = Quat(1, 0, 0, 0);
    for (int p = 1; p <= m; ++p) pw[p] = pw[p - 1] * base;
    Su2 comp[3];
    for (int dir = 0; dir < 3; ++dir) {
      Quat V(tang[dir][0] / g.r(), tang[dir][1] / g.r(), tang[dir][2] / g.r(), tang[dir][3] / g.r());
      Quat dbase = n >= 0 ? V : conj(V);
      Quat dw(0, 0, 0, 0);
      for (int p = 0; p < m; ++p) dw = dw + pw[p] * dbase * pw[m - 1 - p];
      comp[dir] = -1.0 * dexp_to_su2(dw, pw[m]);
    }
    for (int it = 0; it < g.n_t(); ++it) {
      std::int64_t s = g.site(ie, j, k, it);
      for (int dir = 0; dir < 3; ++dir) out.set(s, dir, comp[dir]);
      out.set(s, 3, Su2());
    }
  }
  return out;
}

Field translate_t(const Field& a, int steps) {
  const Grid& g = *a.grid;
  if (g.mode() != TimeMode::periodic)
    throw invalid_argument_error("translate_t: periodic mode required");
  Field out(g, a.kind);
  int nt = g.n_t();
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    int it2 = ((it - steps) % nt + nt) % nt;
    std::int64_t src = g.site(ie, j, k, it2);
    for (int c = 0; c < a.ncomp(); ++c) out.set(s, c, a.get(src, c));
  }
  return out;
}

}  // namespace asdlab
