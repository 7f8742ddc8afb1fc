#ifndef ASDLAB_WEITZ_HPP
#define ASDLAB_WEITZ_HPP

#include <vector>

#include "asdlab/field.hpp"
#include "asdlab/ops.hpp"

namespace asdlab {

// The operator (nabla_A^* nabla_A + S/3) on self-dual fields, S = 6/r^2.
// apply() evaluates the algebraic route 2(d_A^+ d_A^* phi - F_A^+ . phi),
// which is exact against the discrete ASD equation; apply_rough() is the
// independent rough-Laplacian discretization used for cross-checks and as
// the SPD inner operator of the solver.
class WeitzOp {
 public:
  WeitzOp(const Grid& g, const Field& a_frame);

  const Grid& grid() const { return *grid_; }
  const Field& connection() const { return a_frame_; }
  const Field& curvature_sd() const { return f_sd_; }
  const Field& curvature() const { return f_; }
  double s_over_3() const { return s3_; }

  Field apply(const Field& phi_sd) const;        // 2(d+ d* - F+ .)
  Field apply_rough(const Field& phi_sd) const;  // grad^T grad + S/3

  Field d_star(const Field& phi_sd) const;   // 1-form, exact transpose route
  Field d_plus(const Field& one_form) const; // self-dual part of d_A

  const std::vector<double>& precond() const { return precond_; }
  double lambda_max() const;  // estimate for the diagonally preconditioned rough operator

 private:
  const Grid* grid_;
  Field a_frame_, a_coord_;
  Field f_, f_sd_;
  double s3_;
  std::vector<double> precond_;
  mutable double lambda_max_ = 0.0;
};

struct SolveResult {
  Field phi;
  bool converged = false;
  int outer_iters = 0;
  long cg_iters_total = 0;
  double rel_residual = 0.0;
  std::vector<double> history;
};

// Solve (nabla^* nabla + S/3) phi = eta to relative L2 residual <= tol by
// preconditioned CG on the SPD rough Laplacian.
SolveResult solve_weitzenboeck(const WeitzOp& op, const Field& eta, double tol, int max_cg = 4000);

// MINRES pass on the exactly-symmetric algebraic route, warm-started from
// an initial guess; reduces the discrete ASD defect of a fixed point.
SolveResult minres_algebraic(const WeitzOp& op, const Field& eta, const Field& phi0, double tol,
                             int max_iter);

}  // namespace asdlab

#endif
