#ifndef ASDLAB_GAUGE_HPP
#define ASDLAB_GAUGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "asdlab/field.hpp"
#include "asdlab/ops.hpp"

namespace asdlab {

struct CurvatureReport {
  double energy = 0.0;        // integral of |F|^2
  double chern_weil = 0.0;    // (1/8pi^2) integral of tr(F^2)
  double max_f = 0.0;
  double max_f_plus = 0.0;
  double rho = 0.0;
  double rho_window = 0.0;
};

// A gauge transformation is a unit-quaternion field on the grid.
struct GaugeField {
  const Grid* grid = nullptr;
  std::vector<Quat> q;
  GaugeField() = default;
  explicit GaugeField(const Grid& g) : grid(&g), q(g.n_sites()) {}
};

// g(A) = g A g^{-1} - (dg) g^{-1}, evaluated with centered differences of g.
Field gauge_transform(const Field& a_frame, const GaugeField& g);

// Constant gauge rotation (exactly covariant on the grid).
Field gauge_transform_const(const Field& a_frame, const Quat& g);

// Chern-Weil density (1/8pi^2) tr(F^2) / dvol = (|F^-|^2 - |F^+|^2)/8pi^2.
std::vector<double> chern_weil_density(const Field& f_frame);

CurvatureReport curvature_report(const Field& a_frame, double rho_window);

// (1/(8 pi^2 T)) max over window placements of the energy in S^3 x [t, t+T].
double rho_estimate(const Field& a_frame, double T_window);
double windowed_energy_sup(const std::vector<double>& f2_density, const Grid& g, double T_window);

// Sample connections -----------------------------------------------------

Field sample_flat(const Grid& g);

// Charge-1 instanton pulled back from R^4 \ {0} by the conformal map
// (theta, t) -> e^{t/r} theta; `center` is the cylinder time of the energy
// bump and `scale` multiplies the instanton width.
Field sample_bpst_cylinder(const Grid& g, double center, double scale);


// Smooth random 1-form built from low harmonics of the embedding
// coordinates; exactly periodic in t (periodic grids) and scaled to the
// requested amplitude max_mu |A_mu|.
Field sample_synthetic(const Grid& g, std::uint64_t seed, double amplitude);

// Same construction times a smooth bump supported in |t| < t_support.
Field sample_synthetic_bump(const Grid& g, std::uint64_t seed, double amplitude, double t_support);

// Smooth random 1-form supported in the collar T < |t| < T+1; the curvature
// then satisfies the admissibility support conditions by construction.
Field sample_collar_bump(const Grid& g, std::uint64_t seed, double amplitude, double T);

// Smooth gauge field from seeded low harmonics, |log g| <= amplitude.
GaugeField sample_gauge(const Grid& g, std::uint64_t seed, double amplitude);

// Degree-n gauge transformation theta -> (theta/r)^n and the exact frame
// components of the flat connection it generates, -(dw) w^{-1}.
GaugeField winding_gauge(const Grid& g, int n);
Field winding_flat_connection(const Grid& g, int n);

// t-translation by an integer number of grid steps (periodic mode).
Field translate_t(const Field& a, int steps);

}  // namespace asdlab

#endif
