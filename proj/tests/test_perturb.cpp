#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "asdlab/cutgauge.hpp"
#include "asdlab/gauge.hpp"
#include "asdlab/green.hpp"
#include "asdlab/perturb.hpp"
#include "asdlab/util.hpp"
#include "asdlab/weitz.hpp"
#include "helpers.hpp"

using namespace asdlab;

namespace {

struct Lab {
  Grid grid;
  GreenOperator green;
  explicit Lab(GridSpec s) : grid(s), green(grid, 2.0 / (s.r * s.r), 24) {}
};

Lab* make_lab() {
  static std::unique_ptr<Lab> shared = [] {
    GridSpec s;
    s.n_eta = 6;
    s.n_xi1 = 8;
    s.n_xi2 = 8;
    s.L = 4.0;
    s.n_t = 48;
    return std::make_unique<Lab>(s);
  }();
  return shared.get();
}

}  // namespace

TEST_CASE("phi_map: flat input has Phi(0) = 0 and fixed point phi = 0") {
  auto lab = make_lab();
  WeitzOp op(lab->grid, sample_flat(lab->grid));
  PerturbOptions opt;
  Field zero(lab->grid, FormKind::SelfDual);
  auto ev = phi_map(op, lab->green, zero, opt);
  CHECK(sup_norm(ev.eta_out) == 0.0);
  CHECK(sup_norm(ev.phi) == 0.0);

  auto res = fixed_point(op, lab->green, opt);
  CHECK(res.trace.converged);
  CHECK(sup_norm(res.phi) == 0.0);
  CHECK(res.trace.fplus_out_inf == 0.0);
}

TEST_CASE("phi_map: first step is -2F+ so ||Phi(0)||_T = 2||F+||_T") {
  auto lab = make_lab();
  Field a = sample_collar_bump(lab->grid, 7, 0.003, 2.0);
  WeitzOp op(lab->grid, a);
  PerturbOptions opt;
  Field zero(lab->grid, FormKind::SelfDual);
  auto ev = phi_map(op, lab->green, zero, opt);
  double phi0_T = lab->green.taubes_norm(ev.eta_out).norm_T;
  double fplus_T = lab->green.taubes_norm(op.curvature_sd()).norm_T;
  CHECK(phi0_T == doctest::Approx(2.0 * fplus_T).epsilon(1e-9));
  CHECK(phi0_T <= 2.0 * kEps0);
}

TEST_CASE("phi_map: Lipschitz bound of Lemma-4.3 type holds with slack") {
  auto lab = make_lab();
  Field a = sample_collar_bump(lab->grid, 8, 0.004, 2.0);
  WeitzOp op(lab->grid, a);
  PerturbOptions opt;
  double fplus_T = lab->green.taubes_norm(op.curvature_sd()).norm_T;
  // two inputs in the 3 eps0 ball, built from scaled first iterates
  Field zero(lab->grid, FormKind::SelfDual);
  auto base = phi_map(op, lab->green, zero, opt);
  Field eta1 = base.eta_out;
  Field eta2 = base.eta_out;
  scale(eta2, 0.55);
  auto ev1 = phi_map(op, lab->green, eta1, opt);
  auto ev2 = phi_map(op, lab->green, eta2, opt);
  Field dPhi = ev1.eta_out;
  axpy(-1.0, ev2.eta_out, dPhi);
  Field dEta = eta1;
  axpy(-1.0, eta2, dEta);
  Field sEta = eta1;
  axpy(1.0, eta2, sEta);
  double lhs = lab->green.taubes_norm(dPhi).norm_T;
  double rhs = 2.0 * kC0 * (fplus_T + 2.0 * lab->green.taubes_norm(sEta).norm_T) *
               lab->green.taubes_norm(dEta).norm_T;
  CHECK(lhs <= rhs * 1.10);
}

TEST_CASE("fixed_point: refuses inadmissible input with the measured norm") {
  auto lab = make_lab();
  Field a = sample_collar_bump(lab->grid, 9, 0.2, 2.0);  // far above eps0
  WeitzOp op(lab->grid, a);
  PerturbOptions opt;
  bool threw = false;
  try {
    fixed_point(op, lab->green, opt);
  } catch (const precondition_error& e) {
    threw = true;
    CHECK(e.measured > kEps0);
  }
  CHECK(threw);
}

TEST_CASE("fixed_point: admissible collar input contracts and solves the discrete ASD equation") {
  auto lab = make_lab();
  Field a0 = sample_collar_bump(lab->grid, 3, 0.004, 2.0);
  auto cut = cutoff_splice(a0, lab->green, 2.0, 0.8);
  WeitzOp op(lab->grid, cut.a_prime);
  PerturbOptions opt;
  opt.collar_T = 2.0;
  auto res = fixed_point(op, lab->green, opt);
  CHECK(res.trace.converged);
  // Prop 4.4 ball and contraction ratio
  for (const auto& st : res.trace.steps) CHECK(st.eta_T <= 3.0 * kEps0);
  for (std::size_t i = 2; i < res.trace.steps.size(); ++i) {
    double prev = res.trace.steps[i - 1].diff_T;
    if (prev > 1e-14) CHECK(res.trace.steps[i].diff_T / prev <= 26.0 * kC0 * kEps0 * 1.1);
  }
  // pointwise |eta_n|_T <= 3 |F+|_T with 10% slack on >= 99% of sites
  auto eta_T = lab->green.taubes_norm(res.eta);
  auto fp_T = lab->green.taubes_norm(op.curvature_sd());
  std::int64_t ok = 0;
  for (std::int64_t s = 0; s < lab->grid.n_sites(); ++s)
    if (eta_T.pointwise[s] <= 3.0 * fp_T.pointwise[s] * 1.10 + 1e-15) ++ok;
  CHECK(static_cast<double>(ok) / lab->grid.n_sites() >= 0.99);
  // L-infinity a-priori bound, Prop 4.10 (d)
  CHECK(sup_norm(res.phi) <= lab->green.taubes_norm(res.eta).norm_T * 1.05);
  // final ASD residual: reduced at least 100x
  CHECK(res.trace.fplus_out_inf * 100.0 <= res.trace.fplus_in_inf);
  // energy identity
  CHECK(res.trace.energy_gap <= 1e-2);
  // decay: |phi_A(x)| <= 3 delta(x) ||F+||_inf with 10% slack at >= 99% of sites
  auto delta = lab->green.delta_profile(2.0);
  ok = 0;
  for (std::int64_t s = 0; s < lab->grid.n_sites(); ++s) {
    double bound = 3.0 * delta[s] * res.trace.fplus_in_inf;
    if (pointwise_norm(res.phi, s) <= bound * 1.10 + 1e-15) ++ok;
  }
  CHECK(static_cast<double>(ok) / lab->grid.n_sites() >= 0.99);
}

TEST_CASE("solve: pointwise Taubes comparison |phi| <= |eta|_T holds at >= 99% of sites") {
  auto lab = make_lab();
  Field a = sample_synthetic(lab->grid, 21, 0.1);
  WeitzOp op(lab->grid, a);
  PerturbOptions opt;
  Rng rng(40);
  for (int run = 0; run < 3; ++run) {
    Field eta = testing::smooth_sd_field(lab->grid, 500 + run);
    scale(eta, 0.01);
    auto chk = solve_with_pointwise_check(op, lab->green, eta, opt);
    CHECK(chk.frac_ok >= 0.99);
    CHECK(chk.worst_excess <= 0.05);
  }
}

TEST_CASE("magical lemma: || |grad phi|^2 ||_T <= ||eta||_T^2 with 5% slack") {
  auto lab = make_lab();
  Field a = sample_collar_bump(lab->grid, 11, 0.004, 2.0);
  WeitzOp op(lab->grid, a);
  Field eta = testing::smooth_sd_field(lab->grid, 600);
  scale(eta, 1e-3);
  auto solved = solve_weitzenboeck(op, eta, 1e-10);
  ops::GradSD gp(lab->grid);
  ops::grad_sd(solved.phi, a, gp);
  auto gn = ops::grad_sd_pointwise_norm(gp);
  for (auto& v : gn) v = v * v;
  double lhs = lab->green.taubes_norm(gn).norm_T;
  double rhs = lab->green.taubes_norm(eta).norm_T;
  CHECK(lhs <= rhs * rhs * 1.05);
}

TEST_CASE("interior profile: ASD input identically zero; collar input decays inward") {
  auto lab = make_lab();
  Field flat = sample_flat(lab->grid);
  WeitzOp opf(lab->grid, flat);
  Field zero(lab->grid, FormKind::SelfDual);
  auto prof0 = interior_profile(opf, zero);
  for (double v : prof0) CHECK(v == 0.0);

  Field a0 = sample_collar_bump(lab->grid, 3, 0.004, 2.0);
  auto cut = cutoff_splice(a0, lab->green, 2.0, 0.8);
  WeitzOp op(lab->grid, cut.a_prime);
  PerturbOptions opt;
  opt.collar_T = 2.0;
  auto res = fixed_point(op, lab->green, opt);
  auto prof = interior_profile(op, res.phi);
  // max near the collar, decreasing toward t = 0
  int mid = lab->grid.n_t() / 2;
  double interior = prof[mid];
  double collar = 0.0;
  for (int it = 0; it < lab->grid.n_t(); ++it) {
    double t = std::abs(lab->grid.t_of(it));
    if (t > 2.0 && t < 3.0) collar = std::max(collar, prof[it]);
  }
  CHECK(interior < 0.5 * collar);
  // decay rate toward the interior roughly sqrt(S/3) = sqrt(a)
  // measure between t = 1.5 and t = 0.5 (one-sided collar dominance)
  auto at_t = [&](double tt) {
    int best = 0;
    for (int it = 0; it < lab->grid.n_t(); ++it)
      if (std::abs(lab->grid.t_of(it) - tt) < std::abs(lab->grid.t_of(best) - tt)) best = it;
    return prof[best];
  };
  double slope = std::log(at_t(1.75) / at_t(0.75));
  CHECK(slope > 0.5 * std::sqrt(2.0));  // decays at a sqrt(a)-type rate
  CHECK(slope < 2.0 * std::sqrt(2.0));
}

TEST_CASE("interior depth is stable when the collar moves outward") {
  GridSpec s;
  s.n_eta = 5;
  s.n_xi1 = 6;
  s.n_xi2 = 6;
  s.L = 4.5;
  s.n_t = 54;
  Grid grid(s);
  GreenOperator green(grid, 2.0, 32);
  auto depth = [&](double T) {
    Field a0 = sample_collar_bump(grid, 5, 0.004, T);
    auto cut = cutoff_splice(a0, green, T, 0.8);
    WeitzOp op(grid, cut.a_prime);
    PerturbOptions opt;
    opt.collar_T = T;
    auto res = fixed_point(op, green, opt);
    auto prof = interior_profile(op, res.phi);
    double peak = *std::max_element(prof.begin(), prof.end());
    // depth: distance from the collar edge T to where the profile first
    // drops below peak/20, scanning inward on the positive side
    for (int it = grid.n_t() - 1; it >= grid.n_t() / 2; --it) {
      double t = grid.t_of(it);
      if (t < T && prof[it] < peak / 20.0) return T - t;
    }
    return 2.0 * T;
  };
  double d1 = depth(2.0), d2 = depth(3.0);
  CHECK(std::abs(d1 - d2) <= grid.d_t() + 1e-12);
}

TEST_CASE("continuity probe: difference ratios bounded, energy identity kept") {
  auto lab = make_lab();
  Field a0 = sample_collar_bump(lab->grid, 3, 0.002, 2.0);
  auto cut = cutoff_splice(a0, lab->green, 2.0, 0.8);
  Field dir = sample_collar_bump(lab->grid, 77, 0.03, 2.0);
  PerturbOptions opt;
  opt.collar_T = 2.0;
  auto rows = continuity_probe(cut.a_prime, lab->green, dir, {0.0, 1e-2, 1e-3, 1e-4}, opt);
  CHECK(rows[0].dphi_inf == 0.0);
  // Lipschitz: ratio approximately constant over the three steps
  double r1 = rows[1].ratio, r2 = rows[2].ratio, r3 = rows[3].ratio;
  CHECK(r2 > 0.0);
  CHECK(r1 / r2 < 3.0);
  CHECK(r2 / r1 < 3.0);
  CHECK(r2 / r3 < 3.0);
  CHECK(r3 / r2 < 3.0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].energy_gap <= 1e-2);
}

TEST_CASE("gauge equivariance: constant gauge rotations commute with the fixed point") {
  auto lab = make_lab();
  Field a0 = sample_collar_bump(lab->grid, 3, 0.004, 2.0);
  auto cut = cutoff_splice(a0, lab->green, 2.0, 0.8);
  PerturbOptions opt;
  opt.collar_T = 2.0;
  WeitzOp op(lab->grid, cut.a_prime);
  auto res = fixed_point(op, lab->green, opt);

  Quat gq = exp_su2(Su2(0.7, -0.3, 1.1));
  Field a_rot = gauge_transform_const(cut.a_prime, gq);
  WeitzOp op2(lab->grid, a_rot);
  auto res2 = fixed_point(op2, lab->green, opt);
  // phi(g(A)) = g(phi(A)) for constant g: compare pointwise norms and the
  // rotated field itself
  Field expect(lab->grid, FormKind::SelfDual);
  for (std::int64_t s = 0; s < lab->grid.n_sites(); ++s)
    for (int c = 0; c < 3; ++c) expect.set(s, c, adjoint(gq, res.phi.get(s, c)));
  Field d = res2.phi;
  axpy(-1.0, expect, d);
  CHECK(sup_norm(d) <= 1e-7 * std::max(1.0, sup_norm(res.phi)) + 1e-12);
}
