#ifndef ASDLAB_OPS_HPP
#define ASDLAB_OPS_HPP

#include <cstdint>
#include <vector>

#include "asdlab/field.hpp"
#include "asdlab/grid.hpp"

namespace asdlab {
namespace ops {

// One leg of a centered-difference stencil after ghost resolution.
struct Leg {
  std::int64_t site;
  double sign;
};

// Resolve the +/- coordinate neighbor of a site, applying the mirror maps
// at the eta boundaries (parity sign and half-period xi shift) and the
// wrap/clamp rule in t.  Ghost reads beyond a truncated-t end clamp to the
// boundary slice (frozen-end extension).
inline Leg neighbor(const Grid& g, int ie, int j, int k, int it, int dir, int step, const Parity& par) {
  double sign = 1.0;
  switch (dir) {
    case 0: {
      int ie2 = ie + step;
      if (ie2 < 0) {
        ie2 = -ie2 - 1;
        k = (k + g.n_xi2() / 2) % g.n_xi2();
        sign = par.lo;
      } else if (ie2 >= g.n_eta()) {
        ie2 = 2 * g.n_eta() - 1 - ie2;
        j = (j + g.n_xi1() / 2) % g.n_xi1();
        sign = par.hi;
      }
      return {g.site(ie2, j, k, it), sign};
    }
    case 1: {
      int j2 = (j + step + g.n_xi1()) % g.n_xi1();
      return {g.site(ie, j2, k, it), 1.0};
    }
    case 2: {
      int k2 = (k + step + g.n_xi2()) % g.n_xi2();
      return {g.site(ie, j, k2, it), 1.0};
    }
    default: {
      int it2 = it + step;
      if (g.mode() == TimeMode::periodic)
        it2 = (it2 + g.n_t()) % g.n_t();
      else if (it2 < 0 || it2 >= g.n_t())
        it2 = it;  // frozen end
      return {g.site(ie, j, k, it2), 1.0};
    }
  }
}

// Centered difference of one component (nv doubles per site, given stride).
void diff(const Grid& g, int dir, const double* in, std::int64_t in_stride, double* out,
          std::int64_t out_stride, int nv, const Parity& par);

// Exact transpose of diff with respect to the quadrature inner product.
void diff_transpose(const Grid& g, int dir, const double* in, std::int64_t in_stride, double* out,
                    std::int64_t out_stride, int nv, const Parity& par);

// ---- su(2) exterior calculus ------------------------------------------

// Frame <-> coordinate component conversions (diagonal scale factors).
Field one_form_to_coord(const Field& frame);
Field one_form_to_frame(const Field& coord);
Field two_form_to_frame(const Field& coord);
Field two_form_to_coord(const Field& frame);

// Self-dual projection / embedding / anti-self-dual part (frame 2-forms).
Field sd_project(const Field& two_form);
Field asd_project(const Field& two_form);
Field sd_embed(const Field& sd);

// d_A on 0-forms and 1-forms (inputs and outputs in frame components).
Field d0(const Field& scalar, const Field& a_coord);
Field d0_transpose(const Field& one_form_frame, const Field& a_coord);
Field d1(const Field& one_form_frame, const Field& a_coord);
Field d1_transpose(const Field& two_form_frame, const Field& a_coord);

// Curvature F = dA + A ^ A of a frame connection, as a frame 2-form.
Field curvature(const Field& a_frame);

// wedge-bracket of two su(2) 1-forms: [a, b]_{mu nu} = [a_mu, b_nu] - [a_nu, b_mu]
Field wedge_bracket(const Field& a_frame, const Field& b_frame);

// Covariant derivative on self-dual fields in the Hopf frame and its
// transpose; output/input layout is 4 x 3 su(2) components per site.
struct GradSD {
  const Grid* grid;
  std::vector<double> v;  // [site][dir*3+i][3]
  explicit GradSD(const Grid& g) : grid(&g), v(g.n_sites() * 36, 0.0) {}
  double* at(std::int64_t s, int dir, int i) { return v.data() + (s * 12 + dir * 3 + i) * 3; }
  const double* at(std::int64_t s, int dir, int i) const { return v.data() + (s * 12 + dir * 3 + i) * 3; }
};

void grad_sd(const Field& phi, const Field& a_frame_opt, GradSD& out);
void grad_sd_transpose(const GradSD& in, const Field& a_frame_opt, Field& out);

// |nabla_A phi|(x) and sup over x; uses the frame covariant derivative.
std::vector<double> grad_sd_pointwise_norm(const GradSD& gphi);

// Covariant derivative on 1-forms (for the deformation probe).
struct GradOne {
  const Grid* grid;
  std::vector<double> v;  // [site][dir*4+mu][3]
  explicit GradOne(const Grid& g) : grid(&g), v(g.n_sites() * 48, 0.0) {}
  double* at(std::int64_t s, int dir, int mu) { return v.data() + (s * 16 + dir * 4 + mu) * 3; }
  const double* at(std::int64_t s, int dir, int mu) const { return v.data() + (s * 16 + dir * 4 + mu) * 3; }
};

// Scalar (non-su2) Laplacian  Delta = D^T D on plain real fields;
// used by test oracles and the Green-kernel delta check.
std::vector<double> scalar_laplacian(const Grid& g, const std::vector<double>& f);

// Pointwise action of a self-dual curvature on a self-dual field:
// (F . phi)_i = eps_{ijk} [f_j, phi_k].
Field sd_curvature_action(const Field& f_sd, const Field& phi_sd);

}  // namespace ops
}  // namespace asdlab

#endif
