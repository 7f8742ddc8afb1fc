#ifndef ASDLAB_CUTGAUGE_HPP
#define ASDLAB_CUTGAUGE_HPP

#include <optional>
#include <string>
#include <vector>

#include "asdlab/field.hpp"
#include "asdlab/gauge.hpp"
#include "asdlab/green.hpp"

namespace asdlab {

// su(2) data on one S^3 slice.
struct SliceField {
  const Grid* grid = nullptr;
  int ncomp = 0;
  std::vector<double> v;  // [theta][comp][3]
  SliceField() = default;
  SliceField(const Grid& g, int nc) : grid(&g), ncomp(nc), v(g.n_theta() * nc * 3, 0.0) {}
  Su2 get(std::int64_t th, int c) const {
    const double* p = v.data() + (th * ncomp + c) * 3;
    return Su2(p[0], p[1], p[2]);
  }
  void set(std::int64_t th, int c, const Su2& u) {
    double* p = v.data() + (th * ncomp + c) * 3;
    p[0] = u.a[0];
    p[1] = u.a[1];
    p[2] = u.a[2];
  }
  void add(std::int64_t th, int c, const Su2& u) {
    double* p = v.data() + (th * ncomp + c) * 3;
    p[0] += u.a[0];
    p[1] += u.a[1];
    p[2] += u.a[2];
  }
};

SliceField slice_of(const Field& a_frame, int it);        // 3 spatial frame comps
double slice_sup(const SliceField& a);
double slice_l2(const Grid& g, const SliceField& a);

// d_A and its transpose on one slice (flat reference passes empty a_ref).
SliceField slice_d0(const Grid& g, const SliceField& u, const SliceField& a_coord3);
SliceField slice_d0_transpose(const Grid& g, const SliceField& a, const SliceField& a_coord3);
SliceField slice_gauge_transform(const Grid& g, const SliceField& a_frame, const std::vector<Quat>& q);

// Temporal gauge: integrate dg/dt = g A_t from the slice it0; the returned
// connection has exactly zero dt-component and the ODE defect is reported.
struct TemporalGaugeResult {
  GaugeField gauge;
  Field a_temporal;
  double ode_residual = 0.0;  // max |A'_t| implied by the integrator
};
TemporalGaugeResult temporal_gauge(const Field& a_frame, int it0);

// Coulomb gauge fixing on a slice: find g = exp(u) with
// d_ref^*( g(B) - ref ) = 0; flat references pin g(theta_0) = 1.
struct SliceCoulombResult {
  bool ok = false;
  std::vector<Quat> g;       // per theta site
  SliceField a;              // g(B) - ref
  double residual = 0.0;     // final |d_ref^*(gB - ref)| (L2)
  double a_sup = 0.0;
  std::vector<double> history;
};
SliceCoulombResult coulomb_fix_slice(const Grid& g, const SliceField& B, const SliceField& ref,
                                     bool flat_ref, double tol, int max_iter = 40);

struct CutoffReport {
  double T = 0.0, delta1 = 0.0;
  double support_lo = 0.0, support_hi = 0.0;  // |t| range where F+ lives
  double max_fplus_collar = 0.0;
  double fplus_taubes = 0.0;
  double chern_weil = 0.0;
  double d_bound = 0.0;  // max |F(A)| on |t| <= T
  bool budget_pass = false;
  int winding_pos = 0, winding_neg = 0;
  double coulomb_a_sup = 0.0;  // max over the two ends
  std::string note;
};

struct CutoffResult {
  Field a_prime;
  CutoffReport report;
};

// Sections 7.2/7.4-7.5 style splice: temporal gauge, slice Coulomb fixing
// against the reference family (flat plus winding representatives), smooth
// interpolation with a quintic ramp (|rho'| <= 4/delta1), and extension by
// the reference beyond the collar.
CutoffResult cutoff_splice(const Field& a_frame, const GreenOperator& green, double T, double delta1);

// Full-cylinder Coulomb representative machinery for the uniqueness test.
Field coulomb_project(const Field& a_frame, const Field& direction, double tol);  // to ker d_A^*
struct UniquenessTrial {
  double a_recovery = 0.0;  // ||a' - a||_inf
  double g_sign_gap = 0.0;  // min(||gg'-1||, ||gg'+1||)
  bool ok = false;
};
std::vector<UniquenessTrial> coulomb_uniqueness_trials(const Field& a_frame, int trials, double amplitude,
                                                       double tol, std::uint64_t seed);

}  // namespace asdlab

#endif
