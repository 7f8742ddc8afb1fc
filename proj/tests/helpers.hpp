#ifndef ASDLAB_TEST_HELPERS_HPP
#define ASDLAB_TEST_HELPERS_HPP

#include <cmath>

#include "asdlab/field.hpp"
#include "asdlab/gauge.hpp"
#include "asdlab/grid.hpp"
#include "asdlab/ops.hpp"

namespace asdlab::testing {

// Weighted L2 norm over the fixed subdomain 0.45 < eta < pi/2 - 0.45 (and
// |t| < L - 0.5 on truncated grids).  The discrete transposes trade
// pointwise consistency at the two eta-boundary rows and the frozen t-ends
// for exact adjointness; this norm measures operator agreement where both
// discretizations are pointwise consistent.
inline double interior_l2(const Field& f) {
  const Grid& g = *f.grid;
  bool trunc = g.mode() == TimeMode::truncated;
  const double m_eta = 0.45, m_t = 0.5;
  double acc = 0.0;
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    double e = g.eta(ie);
    if (e < m_eta || e > M_PI / 2 - m_eta) continue;
    if (trunc && std::abs(g.t_of(it)) > g.spec().L - m_t) continue;
    acc += g.weight(ie) * pointwise_norm2(f, s);
  }
  return std::sqrt(acc);
}

inline double interior_sup(const Field& f, int margin_rows = 2) {
  const Grid& g = *f.grid;
  double m = 0.0;
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    int ie, j, k, it;
    g.decompose(s, ie, j, k, it);
    if (ie < margin_rows || ie >= g.n_eta() - margin_rows) continue;
    m = std::max(m, pointwise_norm2(f, s));
  }
  return std::sqrt(m);
}

inline Field smooth_sd_field(const Grid& g, std::uint64_t seed) {
  Field a = sample_synthetic(g, seed, 1.0);
  Field phi = ops::sd_project(ops::d1(a, Field{}));
  scale(phi, 1.0 / sup_norm(phi));
  return phi;
}

}  // namespace asdlab::testing

#endif
