#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asdlab/field.hpp"
#include "asdlab/gauge.hpp"
#include "asdlab/grid.hpp"
#include "asdlab/ops.hpp"
#include "asdlab/util.hpp"

using namespace asdlab;

TEST_CASE("su2 algebra: inner product, bracket bound, exp/log round trip") {
  Rng rng(7);
  for (int q = 0; q < 50; ++q) {
    Su2 x(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    Su2 y(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(norm2(x) >= 0.0);
    CHECK(norm(bracket(x, y)) <= 2.0 * norm(x) * norm(y) + 1e-14);
    Quat g = exp_su2(x);
    CHECK(std::abs(qnorm(g) - 1.0) < 1e-13);
    Su2 back = log_su2(g);
    for (int i = 0; i < 3; ++i) CHECK(back.a[i] == doctest::Approx(x.a[i]).epsilon(1e-10));
    // adjoint preserves the norm
    CHECK(norm(adjoint(g, y)) == doctest::Approx(norm(y)).epsilon(1e-12));
  }
}

TEST_CASE("grid: slice volume is exact, invariants hold") {
  GridSpec s;
  s.r = 1.0;
  s.n_eta = 8;
  s.n_xi1 = 8;
  s.n_xi2 = 8;
  s.L = 4.0;
  s.n_t = 64;
  Grid g(s);
  double vol = g.slice_volume();
  CHECK(vol == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-12));

  GridSpec s2 = s;
  s2.r = 2.0;
  s2.L = 1.0;
  s2.n_t = 16;
  Grid g2(s2);
  CHECK(g2.slice_volume() == doctest::Approx(16.0 * M_PI * M_PI).epsilon(1e-12));

  for (int ie = 0; ie < s.n_eta; ++ie) {
    CHECK(g.eta(ie) > 0.0);
    CHECK(g.eta(ie) < M_PI / 2.0);
  }
}

TEST_CASE("grid: O(h^2) quadrature trend on a smooth integrand") {
  // oracle: integral of e^{x1} over S^3(1) is 4 pi^2 I_1(1), I_1 by power series
  double i1 = 0.0;
  for (int m = 0; m < 25; ++m) {
    double term = std::pow(0.5, 2 * m + 1);
    for (int q = 1; q <= m; ++q) term /= q;
    for (int q = 1; q <= m + 1; ++q) term /= q;
    i1 += term;
  }
  auto err = [&](int n) {
    GridSpec s;
    s.n_eta = n;
    s.n_xi1 = n;
    s.n_xi2 = n;
    s.n_t = 4;
    s.L = 1.0;
    Grid g(s);
    std::vector<double> f(g.n_sites());
    for (std::int64_t x = 0; x < g.n_sites(); ++x) {
      int ie, j, k, it;
      g.decompose(x, ie, j, k, it);
      auto u = g.embed(ie, j, k);
      f[x] = std::exp(u[0]);
    }
    double exact = 4.0 * M_PI * M_PI * i1 * 2.0;  // times t-extent 2L = 2
    return std::abs(g.integrate(f) - exact);
  };
  double e1 = err(8), e2 = err(16);
  CHECK(e1 / e2 > 3.0);  // second order: ratio ~ 4
  CHECK(e1 / e2 < 5.5);
}

TEST_CASE("grid: coframe orthonormality and distances") {
  GridSpec s;
  s.n_eta = 6;
  s.n_xi1 = 6;
  s.n_xi2 = 6;
  s.n_t = 8;
  Grid g(s);
  for (std::int64_t th = 0; th < g.n_theta(); th += 7) {
    int ie, j, k;
    g.decompose_theta(th, ie, j, k);
    auto t = g.frame_tangents(ie, j, k);
    auto u = g.embed(ie, j, k);
    for (int a = 0; a < 3; ++a) {
      double radial = 0.0;
      for (int q = 0; q < 4; ++q) radial += t[a][q] * u[q];
      CHECK(std::abs(radial) < 1e-12);  // tangent to the sphere
      for (int b = 0; b < 3; ++b) {
        double dot = 0.0;
        for (int q = 0; q < 4; ++q) dot += t[a][q] * t[b][q];
        CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
      }
    }
  }
  // distance axioms on sampled triples
  Rng rng(3);
  for (int q = 0; q < 200; ++q) {
    std::int64_t x = rng.index(static_cast<int>(g.n_sites()));
    std::int64_t y = rng.index(static_cast<int>(g.n_sites()));
    std::int64_t z = rng.index(static_cast<int>(g.n_sites()));
    double dxy = g.geodesic_distance(x, y);
    CHECK(dxy == doctest::Approx(g.geodesic_distance(y, x)).epsilon(1e-12));
    CHECK(g.geodesic_distance(x, x) == 0.0);
    CHECK(dxy <= g.geodesic_distance(x, z) + g.geodesic_distance(z, y) + 1e-12);
  }
  // antipodal points at dt = 0: distance pi (r = 1)
  std::int64_t a = g.site(2, 1, 1, 3);
  std::int64_t b = g.site(2, 1 + 3, 1 + 3, 3);  // xi1, xi2 shifted by pi maps u -> -u
  CHECK(g.geodesic_distance(a, b) == doctest::Approx(M_PI).epsilon(1e-12));
  // same theta, dt = 3
  GridSpec st = s;
  st.L = 4.0;
  st.n_t = 32;
  Grid gt(st);
  std::int64_t p1 = gt.site(1, 2, 3, 4), p2 = gt.site(1, 2, 3, 16);
  CHECK(gt.geodesic_distance(p1, p2) == doctest::Approx(gt.dt_separation(4, 16)).epsilon(1e-12));
}

TEST_CASE("ops: discrete adjointness of d1 and grad_sd is exact") {
  GridSpec s;
  s.n_eta = 4;
  s.n_xi1 = 4;
  s.n_xi2 = 4;
  s.n_t = 6;
  s.L = 1.5;
  for (TimeMode mode : {TimeMode::truncated, TimeMode::periodic}) {
    s.mode = mode;
    Grid g(s);
    Field A = sample_synthetic(g, 11, 0.4);
    Field a_coord = ops::one_form_to_coord(A);

    Rng rng(5);
    Field x(g, FormKind::OneForm), y(g, FormKind::TwoForm);
    for (auto& v : x.v) v = rng.uniform(-1, 1);
    for (auto& v : y.v) v = rng.uniform(-1, 1);
    double lhs = l2_inner(ops::d1(x, a_coord), y);
    double rhs = l2_inner(x, ops::d1_transpose(y, a_coord));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * l2_norm(x) * l2_norm(y));

    Field u(g, FormKind::Scalar), w(g, FormKind::OneForm);
    for (auto& v : u.v) v = rng.uniform(-1, 1);
    for (auto& v : w.v) v = rng.uniform(-1, 1);
    double l0 = l2_inner(ops::d0(u, a_coord), w);
    double r0 = l2_inner(u, ops::d0_transpose(w, a_coord));
    CHECK(std::abs(l0 - r0) <= 1e-10 * l2_norm(u) * l2_norm(w));

    Field p(g, FormKind::SelfDual), q(g, FormKind::SelfDual);
    for (auto& v : p.v) v = rng.uniform(-1, 1);
    for (auto& v : q.v) v = rng.uniform(-1, 1);
    ops::GradSD gp(g);
    ops::grad_sd(p, A, gp);
    Field gtq(g, FormKind::SelfDual);
    // <grad p, grad q> = <grad^T grad p, q>
    ops::GradSD gq(g);
    ops::grad_sd(q, A, gq);
    double ip = 0.0;
    for (std::int64_t site = 0; site < g.n_sites(); ++site) {
      double w_ = g.weight_site(site);
      const double* pa = gp.v.data() + site * 36;
      const double* pb = gq.v.data() + site * 36;
      double dot = 0.0;
      for (int t = 0; t < 36; ++t) dot += pa[t] * pb[t];
      ip += w_ * dot;  // SD factor 2 and su2 factor 1/2 cancel
    }
    ops::grad_sd_transpose(gp, A, gtq);
    double ip2 = l2_inner(gtq, q);
    CHECK(ip == doctest::Approx(ip2).epsilon(1e-10));
  }
}

TEST_CASE("ops: self-dual split is orthogonal and idempotent") {
  GridSpec s;
  s.n_eta = 4;
  s.n_xi1 = 4;
  s.n_xi2 = 4;
  s.n_t = 4;
  Grid g(s);
  Rng rng(13);
  Field F(g, FormKind::TwoForm);
  for (auto& v : F.v) v = rng.uniform(-1, 1);
  Field sd = ops::sd_project(F), asd = ops::asd_project(F);
  for (std::int64_t x = 0; x < g.n_sites(); ++x) {
    double f2 = pointwise_norm2(F, x);
    double split = pointwise_norm2(sd, x) + pointwise_norm2(asd, x);
    CHECK(f2 == doctest::Approx(split).epsilon(1e-12));
  }
  // idempotent: project(embed(sd)) == sd; ASD part of embed(sd) == 0
  Field back = ops::sd_project(ops::sd_embed(sd));
  Field zero = ops::asd_project(ops::sd_embed(sd));
  double dmax = 0.0;
  for (std::size_t q = 0; q < back.v.size(); ++q) dmax = std::max(dmax, std::abs(back.v[q] - sd.v[q]));
  CHECK(dmax < 1e-14);
  CHECK(sup_norm(zero) < 1e-14);
}

TEST_CASE("curvature: flat is zero; abelian quadratic-in-t oracle is exact in the interior") {
  GridSpec s;
  s.n_eta = 6;
  s.n_xi1 = 6;
  s.n_xi2 = 6;
  s.n_t = 12;
  s.L = 2.0;
  Grid g(s);
  Field flat = sample_flat(g);
  CHECK(sup_norm(ops::curvature(flat)) == 0.0);

  // A = t^2 (alpha dxi1 + beta dxi2) T3: dA = 2t dt ^ (...), no commutator
  double alpha = 0.3, beta = -0.7;
  Field A(g, FormKind::OneForm);
  for (std::int64_t x = 0; x < g.n_sites(); ++x) {
    int ie, j, k, it;
    g.decompose(x, ie, j, k, it);
    double t = g.t_of(it);
    A.set(x, 1, Su2(0, 0, alpha * t * t / g.h(1, ie)));
    A.set(x, 2, Su2(0, 0, beta * t * t / g.h(2, ie)));
  }
  Field F = ops::curvature(A);
  double max_err = 0.0;
  for (std::int64_t x = 0; x < g.n_sites(); ++x) {
    int ie, j, k, it;
    g.decompose(x, ie, j, k, it);
    if (it == 0 || it == s.n_t - 1) continue;  // frozen-end ghosts
    double t = g.t_of(it);
    // frame components: F(e2,e4) = -2t alpha / h2 ; F(e3,e4) = -2t beta / h3
    Su2 f24 = F.get(x, 4);  // pair (1,3) = (e2,e4)
    Su2 f34 = F.get(x, 5);  // pair (2,3) = (e3,e4)
    max_err = std::max(max_err, std::abs(f24.a[2] + 2.0 * t * alpha / g.h(1, ie)));
    max_err = std::max(max_err, std::abs(f34.a[2] + 2.0 * t * beta / g.h(2, ie)));
    for (int c : {0, 1, 2, 3}) max_err = std::max(max_err, norm(F.get(x, c)));
  }
  CHECK(max_err < 1e-11);
}

TEST_CASE("curvature: BPST pullback is anti-self-dual at O(h^2)") {
  auto ratio = [](int m) {
    GridSpec s;
    s.n_eta = 6 * m;
    s.n_xi1 = 12 * m;   // balanced metric cells: the xi periods are 2 pi
    s.n_xi2 = 12 * m;
    s.n_t = 32 * m;
    s.L = 3.0;
    Grid g(s);
    Field A = sample_bpst_cylinder(g, 0.0, 1.0);
    Field F = ops::curvature(A);
    Field sd = ops::sd_project(F), asd = ops::asd_project(F);
    return sup_norm(sd) / sup_norm(asd);
  };
  double r1 = ratio(1), r2 = ratio(2);
  CHECK(r1 < 0.15);
  CHECK(r1 / r2 > 2.8);  // second order: ratio ~ 4
  CHECK(r1 / r2 < 5.8);
}

TEST_CASE("chern-weil: BPST charge is 1 and energy 8 pi^2 (h^2 pair)") {
  auto rep_at = [](int m) {
    GridSpec s;
    s.n_eta = 4 * m;
    s.n_xi1 = 8 * m;
    s.n_xi2 = 8 * m;
    s.n_t = 16 * m;
    s.L = 3.0;
    Grid g(s);
    Field A = sample_bpst_cylinder(g, 0.0, 1.0);
    return curvature_report(A, 0.0);
  };
  CurvatureReport c = rep_at(2), f = rep_at(3);
  // both quantities converge as const * h^2; eliminate the leading term
  double rr = (3.0 / 2.0) * (3.0 / 2.0);
  double cw = f.chern_weil + (f.chern_weil - c.chern_weil) / (rr - 1.0);
  double en = f.energy + (f.energy - c.energy) / (rr - 1.0);
  CHECK(cw == doctest::Approx(1.0).epsilon(0.015));
  CHECK(en == doctest::Approx(8.0 * M_PI * M_PI).epsilon(0.015));
  CHECK(f.chern_weil > c.chern_weil);  // monotone approach from below
}
