#include "asdlab/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "asdlab/gauge.hpp"
#include "asdlab/ops.hpp"
#include "asdlab/util.hpp"

namespace asdlab {

namespace {

double taubes_of(const GreenOperator& green, const Field& f) { return green.taubes_norm(f).norm_T; }

double max_grad(const WeitzOp& op, const Field& phi) {
  ops::GradSD gp(op.grid());
  ops::grad_sd(phi, op.connection(), gp);
  auto n = ops::grad_sd_pointwise_norm(gp);
  return *std::max_element(n.begin(), n.end());
}

}  // namespace

PhiEval phi_map(const WeitzOp& op, const GreenOperator& green, const Field& eta, const PerturbOptions& opt) {
  (void)green;
  PhiEval out;
  auto solved = solve_weitzenboeck(op, eta, opt.solve_tol, opt.solve_max_iter);
  out.phi = solved.phi;
  out.solve_residual = solved.rel_residual;
  // Phi(eta) = -2 F+ . phi - beta(eta, eta) - 2 F+
  Field dphi = op.d_star(out.phi);
  Field beta = ops::sd_project(ops::wedge_bracket(dphi, dphi));
  Field fp_phi = ops::sd_curvature_action(op.curvature_sd(), out.phi);
  out.eta_out = Field(op.grid(), FormKind::SelfDual);
  axpy(-2.0, fp_phi, out.eta_out);
  axpy(-1.0, beta, out.eta_out);
  axpy(-2.0, op.curvature_sd(), out.eta_out);
  return out;
}

SolveCheck solve_with_pointwise_check(const WeitzOp& op, const GreenOperator& green, const Field& eta,
                                      const PerturbOptions& opt) {
  SolveCheck out;
  auto solved = solve_weitzenboeck(op, eta, opt.solve_tol, opt.solve_max_iter);
  out.phi = solved.phi;
  auto eta_T = green.taubes_norm(eta);
  const Grid& g = op.grid();
  std::int64_t ok = 0;
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    double lhs = pointwise_norm(out.phi, s);
    double rhs = eta_T.pointwise[s];
    if (lhs <= rhs * (1.0 + 1e-12) + 1e-15)
      ++ok;
    else if (rhs > 0)
      out.worst_excess = std::max(out.worst_excess, lhs / rhs - 1.0);
  }
  out.frac_ok = static_cast<double>(ok) / g.n_sites();
  return out;
}

FixedPointResult fixed_point(const WeitzOp& op, const GreenOperator& green, const PerturbOptions& opt) {
  const Grid& g = op.grid();
  FixedPointResult res;
  res.phi = Field(g, FormKind::SelfDual);
  res.eta = Field(g, FormKind::SelfDual);
  res.a_perturb = Field(g, FormKind::OneForm);

  const Field& fplus = op.curvature_sd();
  auto fplus_T = green.taubes_norm(fplus);
  res.trace.fplus_in_T = fplus_T.norm_T;
  res.trace.fplus_in_inf = sup_norm(fplus);

  if (opt.enforce_admissible && res.trace.fplus_in_T > kEps0)
    throw precondition_error("fixed_point: ||F+||_T exceeds eps0 = 1/1000", res.trace.fplus_in_T);

  if (opt.collar_T > 0.0) {
    // support of F+ must lie in the declared collar; F must vanish beyond it
    const Field& f = op.curvature();
    double worst_fp = 0.0, worst_f = 0.0;
    for (std::int64_t s = 0; s < g.n_sites(); ++s) {
      int ie, j, k, it;
      g.decompose(s, ie, j, k, it);
      double at = std::abs(g.t_of(it));
      if (at <= opt.collar_T) worst_fp = std::max(worst_fp, pointwise_norm(fplus, s));
      if (at >= opt.collar_T + 1.0) worst_f = std::max(worst_f, pointwise_norm(f, s));
    }
    if (worst_fp > opt.flat_beyond_tol)
      throw precondition_error("fixed_point: F+ not supported in the declared collar", worst_fp);
    if (worst_f > opt.flat_beyond_tol)
      throw precondition_error("fixed_point: F not flat beyond the collar", worst_f);
  }

  Field eta(g, FormKind::SelfDual);
  Field phi(g, FormKind::SelfDual);
  double prev_diff = 0.0;
  for (int n = 0; n < opt.max_iter; ++n) {
    PhiEval ev = phi_map(op, green, eta, opt);
    Field diff = ev.eta_out;
    axpy(-1.0, eta, diff);
    IterationStep st;
    st.n = n;
    st.eta_T = taubes_of(green, ev.eta_out);
    st.diff_T = taubes_of(green, diff);
    st.phi_inf = sup_norm(ev.phi);
    st.grad_inf = max_grad(op, ev.phi);
    st.solve_residual = ev.solve_residual;
    res.trace.steps.push_back(st);
    eta = ev.eta_out;
    phi = ev.phi;
    if (st.diff_T < opt.tol_T) {
      res.trace.converged = true;
      break;
    }
    if (n > 2 && prev_diff > 0.0 && st.diff_T > 2.0 * prev_diff) {
      res.trace.failure = "non-contraction detected";
      break;
    }
    prev_diff = st.diff_T;
  }
  if (!res.trace.converged && res.trace.failure.empty())
    res.trace.failure = "max iterations reached";

  res.eta = eta;
  res.phi = phi;
  if (opt.polish && l2_norm(eta) > 0.0) {
    // warm-started MINRES on the exactly-symmetric algebraic route; at the
    // fixed point the discrete ASD residual equals (B phi - eta)/2, so
    // driving the algebraic residual down drives F+(A + d_A* phi) down
    auto pol = minres_algebraic(op, eta, phi, 1e-10, opt.polish_iters);
    res.phi = pol.phi;
  }
  res.a_perturb = op.d_star(res.phi);

  // measured ASD residual of the perturbed connection
  Field a_new = op.connection();
  axpy(1.0, res.a_perturb, a_new);
  Field f_new = ops::curvature(a_new);
  Field fp_new = ops::sd_project(f_new);
  res.trace.fplus_out_inf = sup_norm(fp_new);
  res.trace.fplus_out_T = taubes_of(green, fp_new);
  res.trace.energy_gap = energy_identity_gap(op.connection(), res.a_perturb);
  return res;
}

double energy_identity_gap(const Field& a_frame, const Field& perturbation) {
  const Grid& g = *a_frame.grid;
  Field f_old = ops::curvature(a_frame);
  Field a_new = a_frame;
  axpy(1.0, perturbation, a_new);
  Field f_new = ops::curvature(a_new);
  std::vector<double> e_new(g.n_sites());
  for (std::int64_t s = 0; s < g.n_sites(); ++s) e_new[s] = pointwise_norm2(f_new, s);
  double lhs = g.integrate(e_new);
  auto cw = chern_weil_density(f_old);
  double rhs = 8.0 * M_PI * M_PI * g.integrate(cw);
  std::vector<double> e_old(g.n_sites());
  for (std::int64_t s = 0; s < g.n_sites(); ++s) e_old[s] = pointwise_norm2(f_old, s);
  double norm = g.integrate(e_old);
  if (norm == 0.0) return std::abs(lhs - rhs);
  return std::abs(lhs - rhs) / norm;
}

std::vector<double> interior_profile(const WeitzOp& op, const Field& phi) {
  const Grid& g = op.grid();
  Field a = op.d_star(phi);
  std::vector<double> prof(g.n_t(), 0.0);
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    prof[it] = std::max(prof[it], pointwise_norm(a, s));
  }
  return prof;
}

std::vector<ContinuityRow> continuity_probe(const Field& a_frame, const GreenOperator& green,
                                            const Field& direction, const std::vector<double>& steps,
                                            const PerturbOptions& opt) {
  std::vector<ContinuityRow> rows;
  WeitzOp base_op(*a_frame.grid, a_frame);
  auto base = fixed_point(base_op, green, opt);
  for (double s : steps) {
    ContinuityRow row;
    row.step = s;
    if (s == 0.0) {
      rows.push_back(row);
      continue;
    }
    Field a2 = a_frame;
    axpy(s, direction, a2);
    WeitzOp op2(*a_frame.grid, a2);
    auto r2 = fixed_point(op2, green, opt);
    Field d = r2.phi;
    axpy(-1.0, base.phi, d);
    row.dphi_inf = sup_norm(d);
    row.ratio = row.dphi_inf / s;
    row.energy_gap = r2.trace.energy_gap;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace asdlab
