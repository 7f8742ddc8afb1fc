#include "asdlab/ops.hpp"

#include <cassert>
#include <cmath>

#include "asdlab/util.hpp"

namespace asdlab {
namespace ops {

void diff(const Grid& g, int dir, const double* in, std::int64_t in_stride, double* out,
          std::int64_t out_stride, int nv, const Parity& par) {
  const double inv2d = 1.0 / (2.0 * g.d_coord(dir));
  parallel_for(g.n_sites(), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t s = lo; s < hi; ++s) {
      int ie, j, k, it;
      g.decompose(s, ie, j, k, it);
      Leg p = neighbor(g, ie, j, k, it, dir, +1, par);
      Leg m = neighbor(g, ie, j, k, it, dir, -1, par);
      const double* vp = in + p.site * in_stride;
      const double* vm = in + m.site * in_stride;
      double* o = out + s * out_stride;
      for (int q = 0; q < nv; ++q) o[q] = (p.sign * vp[q] - m.sign * vm[q]) * inv2d;
    }
  });
}

void diff_transpose(const Grid& g, int dir, const double* in, std::int64_t in_stride, double* out,
                    std::int64_t out_stride, int nv, const Parity& par) {
  const double inv2d = 1.0 / (2.0 * g.d_coord(dir));
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    double* o = out + s * out_stride;
    for (int q = 0; q < nv; ++q) o[q] = 0.0;
  }
  // Scatter: the forward read (Du)(x) += c u(n(x)) contributes c w_x v(x)
  // to the accumulator at n(x); dividing by w at the end restores the
  // adjoint with respect to the weighted inner product.
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    double w = g.weight(ie);
    Leg p = neighbor(g, ie, j, k, it, dir, +1, par);
    Leg m = neighbor(g, ie, j, k, it, dir, -1, par);
    const double* v = in + s * in_stride;
    double cp = p.sign * inv2d * w;
    double cm = -m.sign * inv2d * w;
    double* op = out + p.site * out_stride;
    double* om = out + m.site * out_stride;
    for (int q = 0; q < nv; ++q) {
      op[q] += cp * v[q];
      om[q] += cm * v[q];
    }
  }
  parallel_for(g.n_sites(), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t s = lo; s < hi; ++s) {
      double invw = 1.0 / g.weight_site(s);
      double* o = out + s * out_stride;
      for (int q = 0; q < nv; ++q) o[q] *= invw;
    }
  });
}

namespace {

// Apply a diagonal scale factor, depending on eta only, to one component.
template <typename Fn>
void scale_comp(const Grid& g, Field& f, int comp, Fn&& factor) {
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    double c = factor(ie);
    double* p = f.at(s, comp);
    p[0] *= c;
    p[1] *= c;
    p[2] *= c;
  }
}

}  // namespace

Field one_form_to_coord(const Field& frame) {
  const Grid& g = *frame.grid;
  Field out = frame;
  for (int mu = 0; mu < 4; ++mu)
    scale_comp(g, out, mu, [&](int ie) { return g.h(mu, ie); });
  return out;
}

Field one_form_to_frame(const Field& coord) {
  const Grid& g = *coord.grid;
  Field out = coord;
  for (int mu = 0; mu < 4; ++mu)
    scale_comp(g, out, mu, [&](int ie) { return 1.0 / g.h(mu, ie); });
  return out;
}

Field two_form_to_frame(const Field& coord) {
  const Grid& g = *coord.grid;
  Field out = coord;
  for (int c = 0; c < 6; ++c)
    scale_comp(g, out, c, [&](int ie) { return 1.0 / (g.h(kPairA[c], ie) * g.h(kPairB[c], ie)); });
  return out;
}

Field two_form_to_coord(const Field& frame) {
  const Grid& g = *frame.grid;
  Field out = frame;
  for (int c = 0; c < 6; ++c)
    scale_comp(g, out, c, [&](int ie) { return g.h(kPairA[c], ie) * g.h(kPairB[c], ie); });
  return out;
}

Field sd_project(const Field& two_form) {
  const Grid& g = *two_form.grid;
  Field out(g, FormKind::SelfDual);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    out.set(s, 0, 0.5 * (two_form.get(s, 0) + two_form.get(s, 5)));
    out.set(s, 1, 0.5 * (two_form.get(s, 1) - two_form.get(s, 4)));
    out.set(s, 2, 0.5 * (two_form.get(s, 2) + two_form.get(s, 3)));
  }
  return out;
}

Field asd_project(const Field& two_form) {
  const Grid& g = *two_form.grid;
  Field out(g, FormKind::SelfDual);  // anti-self-dual components in the mirrored basis
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    out.set(s, 0, 0.5 * (two_form.get(s, 0) - two_form.get(s, 5)));
    out.set(s, 1, 0.5 * (two_form.get(s, 1) + two_form.get(s, 4)));
    out.set(s, 2, 0.5 * (two_form.get(s, 2) - two_form.get(s, 3)));
  }
  return out;
}

Field sd_embed(const Field& sd) {
  const Grid& g = *sd.grid;
  Field out(g, FormKind::TwoForm);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    Su2 p1 = sd.get(s, 0), p2 = sd.get(s, 1), p3 = sd.get(s, 2);
    out.set(s, 0, p1);
    out.set(s, 5, p1);
    out.set(s, 1, p2);
    out.set(s, 4, -1.0 * p2);
    out.set(s, 2, p3);
    out.set(s, 3, p3);
  }
  return out;
}

Field d0(const Field& scalar, const Field& a_coord) {
  const Grid& g = *scalar.grid;
  Field out_c(g, FormKind::OneForm);
  Parity par = coord_parity(FormKind::Scalar, 0);
  for (int mu = 0; mu < 4; ++mu)
    diff(g, mu, scalar.v.data(), 3, out_c.v.data() + 3 * mu, 12, 3, par);
  if (a_coord.grid) {
    for (std::int64_t s = 0; s < g.n_sites(); ++s) {
      Su2 u = scalar.get(s, 0);
      for (int mu = 0; mu < 4; ++mu) out_c.add(s, mu, bracket(a_coord.get(s, mu), u));
    }
  }
  return one_form_to_frame(out_c);
}

Field d0_transpose(const Field& one_form_frame, const Field& a_coord) {
  const Grid& g = *one_form_frame.grid;
  Field v_c = one_form_to_frame(one_form_frame);  // adjoint of to_frame is the same diagonal
  Field out(g, FormKind::Scalar);
  Parity par = coord_parity(FormKind::Scalar, 0);
  Field tmp(g, FormKind::Scalar);
  for (int mu = 0; mu < 4; ++mu) {
    diff_transpose(g, mu, v_c.v.data() + 3 * mu, 12, tmp.v.data(), 3, 3, par);
    for (std::size_t q = 0; q < out.v.size(); ++q) out.v[q] += tmp.v[q];
  }
  if (a_coord.grid) {
    for (std::int64_t s = 0; s < g.n_sites(); ++s)
      for (int mu = 0; mu < 4; ++mu) out.add(s, 0, -1.0 * bracket(a_coord.get(s, mu), v_c.get(s, mu)));
  }
  return out;
}

Field d1(const Field& one_form_frame, const Field& a_coord) {
  const Grid& g = *one_form_frame.grid;
  Field a_c = one_form_to_coord(one_form_frame);
  Field out_c(g, FormKind::TwoForm);
  Field tmp(g, FormKind::Scalar);
  for (int c = 0; c < 6; ++c) {
    int mu = kPairA[c], nu = kPairB[c];
    // D_mu a_nu - D_nu a_mu
    diff(g, mu, a_c.v.data() + 3 * nu, 12, out_c.v.data() + 3 * c, 18, 3, coord_parity(FormKind::OneForm, nu));
    diff(g, nu, a_c.v.data() + 3 * mu, 12, tmp.v.data(), 3, 3, coord_parity(FormKind::OneForm, mu));
    for (std::int64_t s = 0; s < g.n_sites(); ++s) {
      double* o = out_c.at(s, c);
      const double* t = tmp.at(s, 0);
      o[0] -= t[0];
      o[1] -= t[1];
      o[2] -= t[2];
    }
  }
  if (a_coord.grid) {
    for (std::int64_t s = 0; s < g.n_sites(); ++s)
      for (int c = 0; c < 6; ++c) {
        int mu = kPairA[c], nu = kPairB[c];
        out_c.add(s, c, bracket(a_coord.get(s, mu), a_c.get(s, nu)) - bracket(a_coord.get(s, nu), a_c.get(s, mu)));
      }
  }
  return two_form_to_frame(out_c);
}

Field d1_transpose(const Field& two_form_frame, const Field& a_coord) {
  const Grid& g = *two_form_frame.grid;
  Field G_c = two_form_to_frame(two_form_frame);  // (C2^{-1})^T: divide by h_mu h_nu
  Field out_c(g, FormKind::OneForm);
  Field tmp(g, FormKind::Scalar);
  for (int c = 0; c < 6; ++c) {
    int mu = kPairA[c], nu = kPairB[c];
    // slot nu gets +D_mu^T G_c, slot mu gets -D_nu^T G_c
    diff_transpose(g, mu, G_c.v.data() + 3 * c, 18, tmp.v.data(), 3, 3, coord_parity(FormKind::OneForm, nu));
    for (std::int64_t s = 0; s < g.n_sites(); ++s) out_c.add(s, nu, tmp.get(s, 0));
    diff_transpose(g, nu, G_c.v.data() + 3 * c, 18, tmp.v.data(), 3, 3, coord_parity(FormKind::OneForm, mu));
    for (std::int64_t s = 0; s < g.n_sites(); ++s) out_c.add(s, mu, -1.0 * tmp.get(s, 0));
  }
  if (a_coord.grid) {
    for (std::int64_t s = 0; s < g.n_sites(); ++s)
      for (int c = 0; c < 6; ++c) {
        int mu = kPairA[c], nu = kPairB[c];
        Su2 gc = G_c.get(s, c);
        out_c.add(s, nu, -1.0 * bracket(a_coord.get(s, mu), gc));
        out_c.add(s, mu, bracket(a_coord.get(s, nu), gc));
      }
  }
  // C1^T: multiply by h_mu, coord -> frame slot
  Field out = out_c;
  for (int mu = 0; mu < 4; ++mu)
    scale_comp(g, out, mu, [&](int ie) { return g.h(mu, ie); });
  return out;
}

Field curvature(const Field& a_frame) {
  const Grid& g = *a_frame.grid;
  Field a_c = one_form_to_coord(a_frame);
  Field da = d1(a_frame, Field{});  // plain dA, frame components
  // + [A_mu, A_nu] (single bracket: F = dA + A^A)
  Field f_c = two_form_to_coord(da);
  for (std::int64_t s = 0; s < g.n_sites(); ++s)
    for (int c = 0; c < 6; ++c)
      f_c.add(s, c, bracket(a_c.get(s, kPairA[c]), a_c.get(s, kPairB[c])));
  return two_form_to_frame(f_c);
}

Field wedge_bracket(const Field& a_frame, const Field& b_frame) {
  const Grid& g = *a_frame.grid;
  Field out(g, FormKind::TwoForm);
  for (std::int64_t s = 0; s < g.n_sites(); ++s)
    for (int c = 0; c < 6; ++c) {
      int mu = kPairA[c], nu = kPairB[c];
      out.set(s, c, bracket(a_frame.get(s, mu), b_frame.get(s, nu)) - bracket(a_frame.get(s, nu), b_frame.get(s, mu)));
    }
  return out;
}

void grad_sd(const Field& phi, const Field& a_frame, GradSD& out) {
  const Grid& g = *phi.grid;
  const double r = g.r();
  for (int dir = 0; dir < 4; ++dir)
    for (int i = 0; i < 3; ++i)
      diff(g, dir, phi.v.data() + 3 * i, 9, out.v.data() + (dir * 3 + i) * 3, 36, 3,
           frame_parity(FormKind::SelfDual, i));
  parallel_for(g.n_sites(), [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t s = lo; s < hi; ++s) {
      int ie, j, k, it;
      g.decompose(s, ie, j, k, it);
      double tn = g.sin_eta(ie) / (g.cos_eta(ie) * r);  // tan(eta)/r
      double ct = g.cos_eta(ie) / (g.sin_eta(ie) * r);  // cot(eta)/r
      Su2 p[3] = {phi.get(s, 0), phi.get(s, 1), phi.get(s, 2)};
      for (int dir = 0; dir < 4; ++dir) {
        double invh = 1.0 / g.h(dir, ie);
        for (int i = 0; i < 3; ++i) {
          double* o = out.at(s, dir, i);
          o[0] *= invh;
          o[1] *= invh;
          o[2] *= invh;
        }
        if (dir == 1) {
          // nabla_{E2}: w2 -> -t w3, w3 -> +t w2   (t = tan(eta)/r)
          Su2 c1 = tn * p[2];
          Su2 c2 = -tn * p[1];
          for (int q = 0; q < 3; ++q) {
            out.at(s, 1, 1)[q] += c1.a[q];
            out.at(s, 1, 2)[q] += c2.a[q];
          }
        } else if (dir == 2) {
          // nabla_{E3}: w1 -> -c w3, w3 -> +c w1   (c = cot(eta)/r)
          Su2 c0 = ct * p[2];
          Su2 c2 = -ct * p[0];
          for (int q = 0; q < 3; ++q) {
            out.at(s, 2, 0)[q] += c0.a[q];
            out.at(s, 2, 2)[q] += c2.a[q];
          }
        }
        if (a_frame.grid) {
          Su2 amu = a_frame.get(s, dir);
          for (int i = 0; i < 3; ++i) {
            Su2 b = bracket(amu, p[i]);
            double* o = out.at(s, dir, i);
            o[0] += b.a[0];
            o[1] += b.a[1];
            o[2] += b.a[2];
          }
        }
      }
    }
  });
}

void grad_sd_transpose(const GradSD& in, const Field& a_frame, Field& out) {
  const Grid& g = *in.grid;
  const double r = g.r();
  out.zero();
  // pointwise adjoints of the 1/h scaling, gamma terms, and brackets
  GradSD v(g);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    for (int dir = 0; dir < 4; ++dir) {
      double invh = 1.0 / g.h(dir, ie);
      for (int i = 0; i < 3; ++i) {
        const double* p = in.at(s, dir, i);
        double* q = v.at(s, dir, i);
        q[0] = p[0] * invh;
        q[1] = p[1] * invh;
        q[2] = p[2] * invh;
      }
    }
  }
  Field tmp(g, FormKind::Scalar);
  for (int dir = 0; dir < 4; ++dir)
    for (int i = 0; i < 3; ++i) {
      diff_transpose(g, dir, v.v.data() + (dir * 3 + i) * 3, 36, tmp.v.data(), 3, 3,
                     frame_parity(FormKind::SelfDual, i));
      for (std::int64_t s = 0; s < g.n_sites(); ++s) out.add(s, i, tmp.get(s, 0));
    }
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    double tn = g.sin_eta(ie) / (g.cos_eta(ie) * r);
    double ct = g.cos_eta(ie) / (g.sin_eta(ie) * r);
    // gamma^T: forward added (+tn phi3, -tn phi2) into dirs/comps (1,1),(1,2)
    // and (+ct phi3, -ct phi1) into (2,0),(2,2)
    Su2 v11 = Su2(in.at(s, 1, 1)[0], in.at(s, 1, 1)[1], in.at(s, 1, 1)[2]);
    Su2 v12 = Su2(in.at(s, 1, 2)[0], in.at(s, 1, 2)[1], in.at(s, 1, 2)[2]);
    Su2 v20 = Su2(in.at(s, 2, 0)[0], in.at(s, 2, 0)[1], in.at(s, 2, 0)[2]);
    Su2 v22 = Su2(in.at(s, 2, 2)[0], in.at(s, 2, 2)[1], in.at(s, 2, 2)[2]);
    out.add(s, 2, tn * v11);
    out.add(s, 1, -tn * v12);
    out.add(s, 2, ct * v20);
    out.add(s, 0, -ct * v22);
    if (a_frame.grid) {
      for (int dir = 0; dir < 4; ++dir) {
        Su2 amu = a_frame.get(s, dir);
        for (int i = 0; i < 3; ++i) {
          const double* p = in.at(s, dir, i);
          out.add(s, i, -1.0 * bracket(amu, Su2(p[0], p[1], p[2])));
        }
      }
    }
  }
}

std::vector<double> grad_sd_pointwise_norm(const GradSD& gphi) {
  const Grid& g = *gphi.grid;
  std::vector<double> out(g.n_sites());
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    double acc = 0.0;
    const double* p = gphi.v.data() + s * 36;
    for (int q = 0; q < 36; ++q) acc += p[q] * p[q];
    out[s] = std::sqrt(acc);  // factor 2 (SD basis) x 1/2 (su2 inner) cancels
  }
  return out;
}

std::vector<double> scalar_laplacian(const Grid& g, const std::vector<double>& f) {
  std::vector<double> out(g.n_sites(), 0.0), df(g.n_sites()), tmp(g.n_sites());
  Parity par{+1, +1};
  for (int dir = 0; dir < 4; ++dir) {
    diff(g, dir, f.data(), 1, df.data(), 1, 1, par);
    for (std::int64_t s = 0; s < g.n_sites(); ++s) {
      int ie, j, k, it;
      g.decompose(s, ie, j, k, it);
      df[s] /= g.h(dir, ie) * g.h(dir, ie);
    }
    diff_transpose(g, dir, df.data(), 1, tmp.data(), 1, 1, par);
    for (std::int64_t s = 0; s < g.n_sites(); ++s) out[s] += tmp[s];
  }
  return out;
}

Field sd_curvature_action(const Field& f_sd, const Field& phi_sd) {
  const Grid& g = *f_sd.grid;
  Field out(g, FormKind::SelfDual);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    Su2 f1 = f_sd.get(s, 0), f2 = f_sd.get(s, 1), f3 = f_sd.get(s, 2);
    Su2 p1 = phi_sd.get(s, 0), p2 = phi_sd.get(s, 1), p3 = phi_sd.get(s, 2);
    out.set(s, 0, bracket(f2, p3) - bracket(f3, p2));
    out.set(s, 1, bracket(f3, p1) - bracket(f1, p3));
    out.set(s, 2, bracket(f1, p2) - bracket(f2, p1));
  }
  return out;
}

}  // namespace ops
}  // namespace asdlab
