#ifndef ASDLAB_PERTURB_HPP
#define ASDLAB_PERTURB_HPP

#include <optional>
#include <string>
#include <vector>

#include "asdlab/field.hpp"
#include "asdlab/green.hpp"
#include "asdlab/weitz.hpp"

namespace asdlab {

inline constexpr double kEps0 = 1.0 / 1000.0;  // contraction budget
inline constexpr double kC0 = 10.0;            // pointwise algebra constant

struct IterationStep {
  int n = 0;
  double eta_T = 0.0;        // ||eta_n||_T
  double diff_T = 0.0;       // ||eta_{n+1} - eta_n||_T
  double phi_inf = 0.0;      // ||phi_n||_inf
  double grad_inf = 0.0;     // max |nabla_A phi_n|
  double solve_residual = 0.0;
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  double fplus_in_T = 0.0;    // ||F+_A||_T of the input
  double fplus_in_inf = 0.0;
  double fplus_out_inf = 0.0; // ||F+(A + d*phi_A)||_inf
  double fplus_out_T = 0.0;
  double energy_gap = 0.0;    // relative energy identity gap
  bool converged = false;
  std::string failure;
};

struct FixedPointResult {
  Field phi;       // phi_A
  Field eta;       // eta_A
  Field a_perturb; // d_A* phi_A
  IterationTrace trace;
};

struct PerturbOptions {
  double tol_T = 1e-9;     // Taubes-norm stopping tolerance
  int max_iter = 60;
  double solve_tol = 1e-8;
  int solve_max_iter = 3000;
  bool enforce_admissible = true;  // refuse when ||F+||_T > eps0
  double collar_T = 0.0;           // declared collar (0 = skip support checks)
  double flat_beyond_tol = 1e-6;   // |F| allowed beyond |t| = collar_T + 1
  bool polish = true;              // MINRES pass on the algebraic route
  int polish_iters = 200;
};

// One evaluation of the paper's map Phi(eta) = -2F+.phi - beta(eta,eta) - 2F+
// with phi = (nabla*nabla + S/3)^{-1} eta.
struct PhiEval {
  Field eta_out;
  Field phi;
  double solve_residual = 0.0;
};
PhiEval phi_map(const WeitzOp& op, const GreenOperator& green, const Field& eta, const PerturbOptions& opt);

// Solve the linear problem and report the pointwise Taubes comparison
// |phi(x)| <= |eta|_T(x) of Eq.-(4.9) type.
struct SolveCheck {
  Field phi;
  double frac_ok = 0.0;     // fraction of sites satisfying the bound
  double worst_excess = 0.0; // max over sites of |phi|/|eta|_T - 1 (violations only)
};
SolveCheck solve_with_pointwise_check(const WeitzOp& op, const GreenOperator& green, const Field& eta,
                                      const PerturbOptions& opt);

FixedPointResult fixed_point(const WeitzOp& op, const GreenOperator& green, const PerturbOptions& opt);

// |integral |F(A+a)|^2 - integral tr(F_A^2)| / integral |F_A|^2
double energy_identity_gap(const Field& a_frame, const Field& perturbation);

// t -> max over the slice of |d_A* phi(., t)|
std::vector<double> interior_profile(const WeitzOp& op, const Field& phi);

struct ContinuityRow {
  double step = 0.0;
  double dphi_inf = 0.0;
  double ratio = 0.0;       // dphi_inf / step
  double energy_gap = 0.0;
};
std::vector<ContinuityRow> continuity_probe(const Field& a_frame, const GreenOperator& green,
                                            const Field& direction, const std::vector<double>& steps,
                                            const PerturbOptions& opt);

}  // namespace asdlab

#endif
