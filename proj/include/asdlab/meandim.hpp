#ifndef ASDLAB_MEANDIM_HPP
#define ASDLAB_MEANDIM_HPP

#include <optional>
#include <string>
#include <vector>

#include "asdlab/field.hpp"

namespace asdlab {

// Finite metric space with a group of translate maps (permutations of the
// sample) and declared amenable windows.  Structured spaces additionally
// carry product coordinates that cover constructions exploit.
struct DynMetricSpace {
  int n = 0;
  std::vector<double> dist;  // n*n, symmetric, zero diagonal
  std::vector<std::vector<int>> translates;  // group elements as permutations
  std::vector<double> translate_measure;     // measure weight per element (counting or Lebesgue step)

  // optional product structure: coords[p*dim + i]
  int dim = 0;
  std::vector<double> coords;
  bool sup_metric = false;          // plain sup metric on coords
  // weighted shift metric: d(x,y) = max over declared window of
  // sum_m w_m |x_{m+s} - y_{m+s}| with w_m = 2^{-|m|}, |m| <= metric_window
  bool shift_metric = false;
  int metric_window = 0;
  int period = 0;                   // coords are cyclic with this period
  std::vector<int> shift_of;        // shift amount per translate (coordinate spaces)
  std::vector<int> omega_shifts;    // applied window for lazy coordinate metrics

  double d(int x, int y) const { return dist[static_cast<std::size_t>(x) * n + y]; }
};

struct CoverPiece {
  std::vector<int> members;
  std::vector<double> lo, hi;  // brick bounds when structured (per active dim)
};

struct WidimCertificate {
  double eps = 0.0;
  int lower = 0;
  int upper = 0;
  // lower-bound witness: indices isometric to a grid of a ball of radius r
  std::vector<int> ball_witness;
  double ball_radius = 0.0;
  int ball_dim = 0;
  // upper-bound witness
  std::vector<CoverPiece> cover;
  int multiplicity = 0;
  std::string method;  // "ostrand", "shift-bricks", "greedy"
  bool validated = false;
};

// metric axioms; throws invalid_argument_error on violation
void validate_space(const DynMetricSpace& space);

// d_Omega: entrywise max over the listed translates (indices into
// space.translates; identity is the empty list element -1)
DynMetricSpace dist_omega(const DynMetricSpace& space, const std::vector<int>& omega);

WidimCertificate widim_bounds(const DynMetricSpace& space, double eps);

// re-validate an emitted certificate against the sample
bool revalidate(const DynMetricSpace& space, const WidimCertificate& cert);

struct MeanDimRow {
  int n_window = 0;
  double measure = 0.0;
  int lower = 0, upper = 0;
  double lower_norm = 0.0, upper_norm = 0.0;
  // Fekete increments (h_n - h_{n-1}); the Ornstein-Weiss limit of a
  // subadditive window sequence is approached by these much faster than by
  // h_n / n
  double lower_inc = 0.0, upper_inc = 0.0;
};

std::vector<MeanDimRow> mean_dim_estimate(const DynMetricSpace& space,
                                          const std::vector<std::vector<int>>& windows,
                                          const std::vector<double>& measures, double eps);

// filter to the Gamma-ball around p (sup over all declared translates)
DynMetricSpace gamma_ball(const DynMetricSpace& space, int p, double radius);

// Shift system over the alphabet {-1,-1+pitch,...,1} of `letters` values,
// periodic sequences of the given period, N independent tracks.
DynMetricSpace make_shift_system(int letters, int period, int tracks, int metric_window);

// sampled R-action comparison: windows in T Z (counting measure) vs the
// full integer sampling (Lebesgue measure = step per sample)
struct FlowShiftRow {
  int n = 0;
  double est_TZ = 0.0;   // increment estimate per window step, normalized by counting measure
  double est_R = 0.0;    // increment estimate normalized by Lebesgue measure
};
std::vector<FlowShiftRow> flow_shift_compare(const DynMetricSpace& space, int T, int n_max, double eps);

// moduli sample space over a list of connections: the weighted-window
// distance with a slice-Coulomb alignment heuristic
DynMetricSpace moduli_sample_space(const std::vector<const Field*>& connections, int n_max_window,
                                   bool align);

}  // namespace asdlab

#endif
