#include "asdlab/weitz.hpp"

#include <cmath>

#include "asdlab/util.hpp"

namespace asdlab {

WeitzOp::WeitzOp(const Grid& g, const Field& a_frame)
    : grid_(&g), a_frame_(a_frame), f_(g, FormKind::TwoForm), f_sd_(g, FormKind::SelfDual) {
  a_coord_ = ops::one_form_to_coord(a_frame_);
  f_ = ops::curvature(a_frame_);
  f_sd_ = ops::sd_project(f_);
  s3_ = 2.0 / (g.r() * g.r());  // S/3 with S = 6/r^2

  // Jacobi-style diagonal estimate of grad^T grad + S/3 (metric terms only).
  precond_.assign(g.n_sites(), 0.0);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    double diag = s3_;
    for (int dir = 0; dir < 4; ++dir) {
      Parity par{+1, +1};
      ops::Leg p = ops::neighbor(g, ie, j, k, it, dir, +1, par);
      ops::Leg m = ops::neighbor(g, ie, j, k, it, dir, -1, par);
      int iep, jt, kt, itt, iem;
      g.decompose(p.site, iep, jt, kt, itt);
      g.decompose(m.site, iem, jt, kt, itt);
      double inv2d = 1.0 / (2.0 * g.d_coord(dir));
      double cp = inv2d / g.h(dir, iep), cm = inv2d / g.h(dir, iem);
      diag += (g.weight(iep) * cp * cp + g.weight(iem) * cm * cm) / g.weight(ie);
    }
    double tn = g.sin_eta(ie) / (g.cos_eta(ie) * g.r());
    double ct = g.cos_eta(ie) / (g.sin_eta(ie) * g.r());
    diag += tn * tn + ct * ct;
    precond_[s] = 1.0 / diag;
  }
}

Field WeitzOp::d_star(const Field& phi_sd) const {
  return ops::d1_transpose(ops::sd_embed(phi_sd), a_coord_);
}

Field WeitzOp::d_plus(const Field& one_form) const { return ops::sd_project(ops::d1(one_form, a_coord_)); }

Field WeitzOp::apply(const Field& phi_sd) const {
  Field dd = d_plus(d_star(phi_sd));
  Field fp = ops::sd_curvature_action(f_sd_, phi_sd);
  Field out = dd;
  axpy(-1.0, fp, out);
  scale(out, 2.0);
  return out;
}

Field WeitzOp::apply_rough(const Field& phi_sd) const {
  ops::GradSD gp(*grid_);
  ops::grad_sd(phi_sd, a_frame_, gp);
  Field out(*grid_, FormKind::SelfDual);
  ops::grad_sd_transpose(gp, a_frame_, out);
  axpy(s3_, phi_sd, out);
  return out;
}

namespace {

void apply_precond(const WeitzOp& op, const Field& r, Field& z) {
  const auto& d = op.precond();
  const Grid& g = op.grid();
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    const double* pr = r.v.data() + s * 9;
    double* pz = z.v.data() + s * 9;
    for (int q = 0; q < 9; ++q) pz[q] = d[s] * pr[q];
  }
}

// Chebyshev semi-iteration on the SPD rough route, used as a fixed linear
// preconditioner.  k and the eigenvalue bounds are frozen per operator, so
// the map r -> z is one and the same SPD matrix at every MINRES step.
void chebyshev_precond(const WeitzOp& op, const Field& r, Field& z, int k, double lo, double hi) {
  const Grid& g = op.grid();
  double d = 0.5 * (hi + lo), c = 0.5 * (hi - lo);
  z = Field(g, FormKind::SelfDual);
  Field rr = r, p(g, FormKind::SelfDual), t(g, FormKind::SelfDual);
  double alpha = 0.0, beta = 0.0;
  for (int i = 1; i <= k; ++i) {
    apply_precond(op, rr, t);
    if (i == 1) {
      p = t;
      alpha = 1.0 / d;
    } else {
      beta = (i == 2) ? 0.5 * (c * alpha) * (c * alpha) : (0.5 * c * alpha) * (0.5 * c * alpha);
      alpha = 1.0 / (d - beta / alpha);
      scale(p, beta);
      axpy(1.0, t, p);
    }
    axpy(alpha, p, z);
    if (i < k) {
      rr = r;
      axpy(-1.0, op.apply_rough(z), rr);
    }
  }
}

}  // namespace

double WeitzOp::lambda_max() const {
  if (lambda_max_ > 0.0) return lambda_max_;
  Rng rng(1234);
  Field v(*grid_, FormKind::SelfDual), t(*grid_, FormKind::SelfDual);
  for (auto& q : v.v) q = rng.uniform(-1, 1);
  double lam = 1.0;
  for (int it = 0; it < 25; ++it) {
    apply_precond(*this, this->apply_rough(v), t);
    lam = l2_norm(t) / l2_norm(v);
    v = t;
    scale(v, 1.0 / l2_norm(v));
  }
  lambda_max_ = lam * 1.05;
  return lambda_max_;
}

// Preconditioned CG on the SPD rough route.
SolveResult solve_weitzenboeck(const WeitzOp& op, const Field& eta, double tol, int max_cg) {
  const Grid& g = op.grid();
  SolveResult res;
  res.phi = Field(g, FormKind::SelfDual);
  double etan = l2_norm(eta);
  if (etan == 0.0) {
    res.converged = true;
    return res;
  }
  Field x(g, FormKind::SelfDual);
  Field r = eta;
  Field z(g, FormKind::SelfDual);
  apply_precond(op, r, z);
  Field p = z;
  double rz = l2_inner(r, z);
  for (int it = 0; it < max_cg; ++it) {
    Field ap = op.apply_rough(p);
    double pap = l2_inner(p, ap);
    if (pap <= 0.0) throw numerical_error("solve: rough operator lost positivity");
    double alpha = rz / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    res.cg_iters_total = it + 1;
    double rn = l2_norm(r) / etan;
    res.rel_residual = rn;
    if (rn <= tol) {
      res.converged = true;
      break;
    }
    apply_precond(op, r, z);
    double rz_new = l2_inner(r, z);
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t q = 0; q < p.v.size(); ++q) p.v[q] = z.v[q] + beta * p.v[q];
  }
  res.phi = x;
  res.history.push_back(res.rel_residual);
  return res;
}

// MINRES on the algebraic route (symmetric, possibly indefinite at the pole
// rows), warm-started.  Chebyshev on the rough route is the fixed SPD
// preconditioner.
SolveResult minres_algebraic(const WeitzOp& op, const Field& eta, const Field& phi0, double tol,
                             int max_iter) {
  const Grid& g = op.grid();
  SolveResult res;
  res.phi = phi0;
  double etan = l2_norm(eta);
  if (etan == 0.0) {
    res.converged = true;
    res.phi = Field(g, FormKind::SelfDual);
    return res;
  }
  const int cheb_k = 10;
  const double lam_hi = op.lambda_max();
  double pre_min = 1e300;
  for (double pv : op.precond()) pre_min = std::min(pre_min, pv);
  const double lam_lo = std::max(1e-6, 0.5 * op.s_over_3() * pre_min);
  auto M = [&](const Field& rin, Field& zout) { chebyshev_precond(op, rin, zout, cheb_k, lam_lo, lam_hi); };

  Field b = eta;
  axpy(-1.0, op.apply(phi0), b);  // residual system B dx = b
  double bn = l2_norm(b);
  if (bn <= tol * etan) {
    res.converged = true;
    res.rel_residual = bn / etan;
    return res;
  }

  Field x(g, FormKind::SelfDual);
  Field r1 = b, r2 = b;
  Field y(g, FormKind::SelfDual);
  M(r1, y);
  double beta1 = l2_inner(r1, y);
  if (beta1 <= 0.0) throw numerical_error("minres: preconditioner lost positivity");
  beta1 = std::sqrt(beta1);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
  double phibar = beta1, cs = -1.0, sn = 0.0, oldeps = 0.0;
  Field w(g, FormKind::SelfDual), w2(g, FormKind::SelfDual), v(g, FormKind::SelfDual);

  for (int it = 1; it <= max_iter; ++it) {
    double s = 1.0 / beta;
    v = y;
    scale(v, s);
    y = op.apply(v);
    if (it >= 2) axpy(-beta / oldb, r1, y);
    double alfa = l2_inner(v, y);
    axpy(-alfa / beta, r2, y);
    r1 = r2;
    r2 = y;
    M(r2, y);
    oldb = beta;
    double bb = l2_inner(r2, y);
    if (bb < 0.0) break;  // preconditioner exhausted; keep the best x so far
    beta = std::sqrt(bb);
    oldeps = epsln;
    double delta = cs * dbar + sn * alfa;
    double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::max(std::sqrt(gbar * gbar + beta * beta), 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    double phi = cs * phibar;
    phibar = sn * phibar;
    Field w1 = w2;
    w2 = w;
    w = v;
    axpy(-oldeps, w1, w);
    axpy(-delta, w2, w);
    scale(w, 1.0 / gamma);
    axpy(phi, w, x);
    res.cg_iters_total = it;
    if (phibar <= 0.02 * tol * beta1) break;
  }
  axpy(1.0, x, res.phi);
  Field r = eta;
  axpy(-1.0, op.apply(res.phi), r);
  res.rel_residual = l2_norm(r) / etan;
  res.history.push_back(res.rel_residual);
  res.converged = res.rel_residual <= tol;
  return res;
}

}  // namespace asdlab
