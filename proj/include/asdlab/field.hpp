#ifndef ASDLAB_FIELD_HPP
#define ASDLAB_FIELD_HPP

#include <cmath>
#include <vector>

#include "asdlab/grid.hpp"
#include "asdlab/su2.hpp"

namespace asdlab {

// su(2)-valued k-form sampled on the grid.
//   Scalar   : 1 component
//   OneForm  : 4 components, orthonormal-coframe basis e1..e4
//   TwoForm  : 6 components, pairs (12),(13),(14),(23),(24),(34)
//   SelfDual : 3 components, basis e1^e2+e3^e4, e1^e3-e2^e4, e1^e4+e2^e3
enum class FormKind { Scalar, OneForm, TwoForm, SelfDual };

inline int ncomp_of(FormKind k) {
  switch (k) {
    case FormKind::Scalar: return 1;
    case FormKind::OneForm: return 4;
    case FormKind::TwoForm: return 6;
    default: return 3;
  }
}

inline constexpr int kPairA[6] = {0, 0, 0, 1, 1, 2};
inline constexpr int kPairB[6] = {1, 2, 3, 2, 3, 3};

// Mirror charts across the eta = 0 and eta = pi/2 coordinate circles map a
// site to a half-period-shifted partner; smooth tensor fields pick up these
// signs on their components.  Frame legs transform by s_lo = (-,+,-,+) and
// s_hi = (-,-,+,+); coordinate components are odd exactly in the eta index.
struct Parity {
  int lo, hi;
};

inline Parity frame_parity(FormKind k, int c) {
  static constexpr int s_lo[4] = {-1, +1, -1, +1};
  static constexpr int s_hi[4] = {-1, -1, +1, +1};
  switch (k) {
    case FormKind::Scalar: return {+1, +1};
    case FormKind::OneForm: return {s_lo[c], s_hi[c]};
    case FormKind::TwoForm: return {s_lo[kPairA[c]] * s_lo[kPairB[c]], s_hi[kPairA[c]] * s_hi[kPairB[c]]};
    default: {
      static constexpr int sd_lo[3] = {-1, +1, -1};
      static constexpr int sd_hi[3] = {+1, -1, -1};
      return {sd_lo[c], sd_hi[c]};
    }
  }
}

inline Parity coord_parity(FormKind k, int c) {
  switch (k) {
    case FormKind::Scalar: return {+1, +1};
    case FormKind::OneForm: return {c == 0 ? -1 : +1, c == 0 ? -1 : +1};
    case FormKind::TwoForm: {
      int p = (kPairA[c] == 0) ? -1 : +1;
      return {p, p};
    }
    default: return {+1, +1};  // self-dual fields are stored in frame components only
  }
}

struct Field {
  const Grid* grid = nullptr;
  FormKind kind = FormKind::Scalar;
  std::vector<double> v;  // [site][comp][3]

  Field() = default;
  Field(const Grid& g, FormKind k) : grid(&g), kind(k), v(g.n_sites() * ncomp_of(k) * 3, 0.0) {}

  int ncomp() const { return ncomp_of(kind); }
  double* at(std::int64_t site, int comp) { return v.data() + (site * ncomp() + comp) * 3; }
  const double* at(std::int64_t site, int comp) const { return v.data() + (site * ncomp() + comp) * 3; }

  Su2 get(std::int64_t site, int comp) const {
    const double* p = at(site, comp);
    return Su2(p[0], p[1], p[2]);
  }
  void set(std::int64_t site, int comp, const Su2& u) {
    double* p = at(site, comp);
    p[0] = u.a[0];
    p[1] = u.a[1];
    p[2] = u.a[2];
  }
  void add(std::int64_t site, int comp, const Su2& u) {
    double* p = at(site, comp);
    p[0] += u.a[0];
    p[1] += u.a[1];
    p[2] += u.a[2];
  }
  void zero() { std::fill(v.begin(), v.end(), 0.0); }
};

inline Field& axpy(double alpha, const Field& x, Field& y) {
  for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += alpha * x.v[i];
  return y;
}
inline Field& scale(Field& x, double alpha) {
  for (double& d : x.v) d *= alpha;
  return x;
}

// Pointwise norm |phi(x)| in the paper's metric conventions.  The factor
// 1/2 of the su(2) inner product and the factor 2 of the self-dual frame
// basis cancel for SelfDual fields.
inline double comp_factor(FormKind k) { return k == FormKind::SelfDual ? 2.0 : 1.0; }

inline double pointwise_norm2(const Field& f, std::int64_t site) {
  double cf = comp_factor(f.kind);
  double acc = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) acc += norm2(f.get(site, c));
  return cf * acc;
}
inline double pointwise_norm(const Field& f, std::int64_t site) { return std::sqrt(pointwise_norm2(f, site)); }

inline std::vector<double> pointwise_norms(const Field& f) {
  std::vector<double> out(f.grid->n_sites());
  for (std::int64_t s = 0; s < f.grid->n_sites(); ++s) out[s] = pointwise_norm(f, s);
  return out;
}

inline double sup_norm(const Field& f) {
  double m = 0.0;
  for (std::int64_t s = 0; s < f.grid->n_sites(); ++s) m = std::max(m, pointwise_norm2(f, s));
  return std::sqrt(m);
}

inline double l2_inner(const Field& a, const Field& b) {
  double cf = comp_factor(a.kind);
  double acc = 0.0;
  const Grid& g = *a.grid;
  for (std::int64_t s = 0; s < g.n_sites(); ++s) {
    double w = g.weight_site(s);
    double dot = 0.0;
    const double* pa = a.v.data() + s * a.ncomp() * 3;
    const double* pb = b.v.data() + s * b.ncomp() * 3;
    for (int q = 0; q < a.ncomp() * 3; ++q) dot += pa[q] * pb[q];
    acc += w * cf * 0.5 * dot;
  }
  return acc;
}
inline double l2_norm(const Field& a) { return std::sqrt(l2_inner(a, a)); }

// Connection: su(2) 1-form in the coframe basis plus the grid time mode.
struct Connection {
  Field a;  // OneForm
  explicit Connection(const Grid& g) : a(g, FormKind::OneForm) {}
  const Grid& grid() const { return *a.grid; }
};

}  // namespace asdlab

#endif
