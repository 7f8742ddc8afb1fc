#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asdlab/gauge.hpp"
#include "asdlab/green.hpp"
#include "asdlab/grid.hpp"
#include "asdlab/ops.hpp"
#include "asdlab/util.hpp"
#include "helpers.hpp"

using namespace asdlab;

namespace {

Grid default_grid() {
  GridSpec s;
  s.n_eta = 8;
  s.n_xi1 = 8;
  s.n_xi2 = 8;
  s.L = 4.0;
  s.n_t = 64;
  return Grid(s);
}

}  // namespace

TEST_CASE("green: K = 1/a via quadrature, a = 2 gives 0.5 within 1e-3") {
  Grid g = default_grid();
  GreenOperator green(g, 2.0, 48);
  CHECK(green.K_analytic() == 0.5);
  CHECK(std::abs(green.K_quadrature() - 0.5) < 1e-3 * 0.5);
  // constant field: ||1||_T = K
  std::vector<double> one(g.n_sites(), 1.0);
  auto rep = green.taubes_norm(one);
  CHECK(std::abs(rep.norm_T - 0.5) < 1e-3 * 0.5);
  // zero field
  std::vector<double> zero(g.n_sites(), 0.0);
  CHECK(green.taubes_norm(zero).norm_T == 0.0);
}

TEST_CASE("green: invalid arguments") {
  Grid g = default_grid();
  CHECK_THROWS_AS(GreenOperator(g, -1.0, 48), invalid_argument_error);
  CHECK_THROWS_AS(GreenOperator(g, 2.0, 4), invalid_argument_error);
  GreenOperator green(g, 2.0, 16);
  CHECK_THROWS_AS(green.delta_profile(3.5), invalid_argument_error);  // collar exits the grid
  CHECK_THROWS_AS(green.delta1_budget(-1.0), invalid_argument_error);
}

TEST_CASE("green: log-slope along the t-axis approaches -sqrt(a)") {
  // The subleading mode decays like exp(-(mu_1 - mu_0) t); the gap
  // mu_1 - mu_0 = sqrt(3/r^2 + a) - sqrt(a) controls how soon the fit
  // window t in [2,5] is asymptotic.  At r = 1/2 the gap is large enough
  // for the 2% tolerance; at r = 1 the same fit is preasymptotic and is
  // checked with the measured wider tolerance.
  auto fit_slope = [](const GreenOperator& green) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double t = 2.0; t <= 5.0; t += 0.1) {
      double y = std::log(green.eval_angle(1e-8, t));
      sx += t;
      sy += y;
      sxx += t * t;
      sxy += t * y;
      ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  GridSpec s;
  s.r = 0.5;
  s.n_eta = 4;
  s.n_xi1 = 4;
  s.n_xi2 = 4;
  s.L = 4.0;
  s.n_t = 32;
  Grid g_half(s);
  for (double a : {1.0, 2.0}) {
    GreenOperator green(g_half, a, 48);
    CHECK(std::abs(fit_slope(green) + std::sqrt(a)) < 0.02 * std::sqrt(a));
  }
  GridSpec s1 = s;
  s1.r = 1.0;
  Grid g_one(s1);
  GreenOperator green1(g_one, 2.0, 48);
  CHECK(std::abs(fit_slope(green1) + std::sqrt(2.0)) < 0.12 * std::sqrt(2.0));
}

TEST_CASE("green: symmetry, positivity, and translation invariance on random pairs") {
  Grid g = default_grid();
  GreenOperator green(g, 2.0, 48);
  Rng rng(17);
  double min_g = 1e300;
  for (int q = 0; q < 10000; ++q) {
    std::int64_t x = rng.index(static_cast<int>(g.n_sites()));
    std::int64_t y = rng.index(static_cast<int>(g.n_sites()));
    if (x == y) continue;
    double gxy = green.eval_sites(x, y);
    double gyx = green.eval_sites(y, x);
    CHECK(std::abs(gxy - gyx) <= 1e-10 * std::max(1.0, gxy));
    min_g = std::min(min_g, gxy);
  }
  CHECK(min_g > 0.0);
  // translation invariance: same site pair shifted in t gives the same value
  int ie, j, k;
  ie = 3;
  j = 2;
  k = 5;
  double v1 = green.eval_sites(g.site(ie, j, k, 10), g.site(1, 1, 1, 20));
  double v2 = green.eval_sites(g.site(ie, j, k, 14), g.site(1, 1, 1, 24));
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
}

TEST_CASE("green: two-sided 1/d^2 bound near the diagonal") {
  Grid g = default_grid();
  GreenOperator green(g, 2.0, 48);
  // on pairs with d <= 0.5 fit c1/d^2 <= g <= c2/d^2; the flat-space constant
  // is 1/(4 pi^2)
  double c_flat = 1.0 / (4.0 * M_PI * M_PI);
  double cmin = 1e300, cmax = 0.0;
  for (double d = 0.05; d <= 0.5; d += 0.05) {
    for (double frac : {0.0, 0.3, 0.7, 1.0}) {
      double gamma = d * frac, dt = d * std::sqrt(1.0 - frac * frac);
      double val = green.eval_angle(std::max(gamma, 1e-9), dt) * d * d;
      cmin = std::min(cmin, val);
      cmax = std::max(cmax, val);
    }
  }
  CHECK(cmin > 0.5 * c_flat);
  CHECK(cmax < 2.0 * c_flat);
}

TEST_CASE("green: weak delta property on a smooth compact bump") {
  // integral of g(x,y) (Delta + a) psi(y) recovers psi(x) up to O(h^2)+tail
  auto run = [](int m) {
    GridSpec s;
    s.n_eta = 6 * m;
    s.n_xi1 = 8 * m;
    s.n_xi2 = 8 * m;
    s.n_t = 24 * m;
    s.L = 3.0;
    Grid g(s);
    GreenOperator green(g, 2.0, 48);
    std::vector<double> psi(g.n_sites());
    for (std::int64_t x = 0; x < g.n_sites(); ++x) {
      int ie, j, k, it;
      g.decompose(x, ie, j, k, it);
      auto u = g.embed(ie, j, k);
      double t = g.t_of(it);
      double env = std::exp(-t * t);
      psi[x] = env * (1.0 + 0.5 * u[0] + 0.3 * u[2] * u[3]);
    }
    auto lap = ops::scalar_laplacian(g, psi);
    for (std::int64_t x = 0; x < g.n_sites(); ++x) lap[x] += 2.0 * psi[x];
    auto rec = green.convolve(lap);
    // compare away from the boundary rows
    double err = 0.0;
    for (std::int64_t x = 0; x < g.n_sites(); ++x) {
      int ie, j, k, it;
      g.decompose(x, ie, j, k, it);
      if (ie < 1 || ie >= g.n_eta() - 1) continue;
      if (std::abs(g.t_of(it)) > g.spec().L - 0.5) continue;
      err = std::max(err, std::abs(rec[x] - psi[x]));
    }
    return err;
  };
  double e1 = run(1);
  CHECK(e1 < 0.12);  // psi has sup-norm about 1.5
}

TEST_CASE("green: delta profile matches the closed form and decays") {
  Grid g = default_grid();
  GreenOperator green(g, 2.0, 48);
  double T = 2.0;
  auto prof = green.delta_profile(T);
  // delta(x) <= K everywhere; quadrature vs closed form within a few percent
  double K = green.K_quadrature();
  double peak = *std::max_element(prof.begin(), prof.end());
  double max_rel = 0.0;
  bool bounded = true;
  for (std::int64_t x = 0; x < g.n_sites(); ++x) {
    bounded = bounded && prof[x] <= K * 1.001;
    int ie, j, k, it;
    g.decompose(x, ie, j, k, it);
    double exact = green.delta_profile_analytic(g.t_of(it), T);
    if (exact > 0.02 * peak) max_rel = std::max(max_rel, std::abs(prof[x] - exact) / exact);
  }
  CHECK(bounded);
  CHECK(max_rel < 0.05);
  // the profile decays exponentially with distance from the collar; the
  // slope between two points on the near-side-dominated stretch is sqrt(a)
  double y1 = std::log(green.delta_profile_analytic(-1.0, T));
  double y2 = std::log(green.delta_profile_analytic(-1.75, T));
  CHECK(std::abs((y2 - y1) / 0.75 - std::sqrt(2.0)) < 0.15 * std::sqrt(2.0));
  // monotone decrease toward the interior
  CHECK(green.delta_profile_analytic(0.0, T) < green.delta_profile_analytic(-1.0, T));
  CHECK(green.delta_profile_analytic(-1.0, T) < green.delta_profile_analytic(-1.9, T));
}

TEST_CASE("green: delta1 budget bisection and monotonicity") {
  Grid g = default_grid();
  GreenOperator green(g, 2.0, 48);
  // monotone in delta1
  double p1 = green.delta1_prime_analytic(0.05);
  double p2 = green.delta1_prime_analytic(0.10);
  double p3 = green.delta1_prime_analytic(0.20);
  CHECK(p1 < p2);
  CHECK(p2 < p3);
  // delta1' <= C sqrt(delta1) with a fitted constant
  double C = 0.0;
  for (double d1 = 0.01; d1 <= 1.0; d1 += 0.01) C = std::max(C, green.delta1_prime_analytic(d1) / std::sqrt(d1));
  for (double d1 = 0.01; d1 <= 1.0; d1 += 0.007)
    CHECK(green.delta1_prime_analytic(d1) <= C * std::sqrt(d1) * (1.0 + 1e-12));
  // quadrature agrees with the closed form at a grid-representable width
  double dq = green.delta1_prime_quadrature(0.5);
  CHECK(dq == doctest::Approx(green.delta1_prime_analytic(0.5)).epsilon(0.02));
  // the paper budget (5+7d+d^2) delta1' <= 1/4000 is infeasible at this
  // resolution: d = 0 requires delta1' <= 5e-5, i.e. delta1 ~ 7e-5 << dt
  auto res = green.delta1_budget(0.0);
  CHECK_FALSE(res.feasible);
  CHECK(res.analytic_delta1 < g.d_t());
  CHECK(res.analytic_delta1 == doctest::Approx(7.07e-5).epsilon(0.05));
}

TEST_CASE("green: taubes norm of a collar indicator peaks at the collar") {
  Grid g = default_grid();
  GreenOperator green(g, 2.0, 32);
  double T = 2.0;
  std::vector<double> ind(g.n_sites(), 0.0);
  for (std::int64_t x = 0; x < g.n_sites(); ++x) {
    int ie, j, k, it;
    g.decompose(x, ie, j, k, it);
    double at = std::abs(g.t_of(it));
    if (at > T && at < T + 1.0) ind[x] = 1.0;
  }
  auto conv = green.convolve(ind);
  auto prof = green.delta_profile(T);
  for (std::int64_t x = 0; x < g.n_sites(); ++x) CHECK(conv[x] == doctest::Approx(prof[x]).epsilon(1e-12));
  // max at collar center, minimum at t = 0 side interior
  std::int64_t in_collar = g.site(3, 3, 3, 6);  // t about -3.1... find collar site
  double best = 0.0;
  std::int64_t argbest = 0;
  for (std::int64_t x = 0; x < g.n_sites(); ++x)
    if (conv[x] > best) {
      best = conv[x];
      argbest = x;
    }
  int ie, j, k, it;
  g.decompose(argbest, ie, j, k, it);
  double tb = std::abs(g.t_of(it));
  CHECK(tb > T);
  CHECK(tb < T + 1.0);
  (void)in_collar;
}

TEST_CASE("green: periodic mode folds images and keeps K = 1/a") {
  GridSpec s;
  s.n_eta = 6;
  s.n_xi1 = 6;
  s.n_xi2 = 6;
  s.L = 3.0;
  s.n_t = 48;
  s.mode = TimeMode::periodic;
  Grid g(s);
  GreenOperator green(g, 2.0, 32);
  CHECK(std::abs(green.K_quadrature() - 0.5) < 1e-3 * 0.5);
}
