#ifndef ASDLAB_GREEN_HPP
#define ASDLAB_GREEN_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "asdlab/field.hpp"
#include "asdlab/grid.hpp"

namespace asdlab {

struct TaubesReport {
  std::vector<double> pointwise;  // |phi|_T(x)
  double norm_T = 0.0;            // sup_x
  double K = 0.0;                 // quadrature integral of g (max over x)
};

struct Delta1Result {
  bool feasible = false;
  double delta1 = 0.0;        // largest grid-representable multiple of dt meeting the budget
  double delta1_prime = 0.0;  // at the returned delta1
  double analytic_delta1 = 0.0;  // continuum solution of the budget equation
  double budget = 0.0;           // (5+7d+d^2) delta1'
};

// Green kernel of (Delta + a) on S^3(r) x R by separation of variables:
//   g = sum_k Z_k(gamma) e^{-mu_k |dt|} / (2 mu_k),   mu_k^2 = k(k+2)/r^2 + a.
// The nu = k+1 ladder with a = 1/r^2 sums in closed form and carries the
// exact 1/(4 pi^2 d^2) singularity; the remainder converges absolutely and
// is truncated at k_max with a reported tail bound.
class GreenOperator {
 public:
  GreenOperator(const Grid& g, double a, int kmax);

  const Grid& grid() const { return *grid_; }
  double a() const { return a_; }
  int kmax() const { return kmax_; }
  double tail_bound() const { return tail_bound_; }
  double K_analytic() const { return 1.0 / a_; }
  double K_quadrature() const { return K_quad_; }
  double mu(int k) const;  // decay rate of mode k

  // Exact series evaluation at sphere angle gamma and t-separation dt >= 0.
  double eval_angle(double gamma, double dt) const;
  // Bilinear interpolation in the cached (gamma, dt) table.
  double eval_table(double gamma, double dt) const;
  double eval_sites(std::int64_t x, std::int64_t y) const;

  // Pointwise Taubes convolution of a nonnegative density.
  std::vector<double> convolve(const std::vector<double>& density) const;
  TaubesReport taubes_norm(const std::vector<double>& density) const;
  TaubesReport taubes_norm(const Field& phi) const;

  // S^3-averaged kernel at t-separation dt: e^{-sqrt(a)|dt|} / (2 sqrt a).
  double sphere_averaged(double dt) const;

  // delta(x) = integral of g(x,y) over the collar T < |t_y| < T+1.
  std::vector<double> delta_profile(double T) const;
  double delta_profile_analytic(double t, double T) const;

  // delta_1' (delta_1) = sup_x integral of g over S^3 x (-delta1, delta1).
  double delta1_prime_analytic(double delta1) const;
  double delta1_prime_quadrature(double delta1) const;
  Delta1Result delta1_budget(double d) const;

  // raw convolution matrix access for diagnostics
  const std::vector<double>& conv_table() const { return conv_; }

 private:
  struct CellBoxArg {
    double lo[4], hi[4];
  };
  void build_table();
  void build_near_table();
  void build_conv();
  double eval_near(double gamma, double dt) const;
  double cell_average(int ie_x, std::int64_t th_x, int ie_y, int dj, int dk, int ddt, bool near) const;
  double near_cell_integral(double eta_x, const CellBoxArg& box, bool subtract_singular, int depth) const;
  double cex_of(int ie) const;
  double sex_of(int ie) const;

  const Grid* grid_;
  double a_, b_;  // b = a r^2 - 1
  int kmax_;
  double tail_bound_ = 0.0;
  double K_quad_ = 0.0;
  int n_images_ = 0;  // periodic images on each side

  int n_gamma_ = 2049;
  int n_dt_ = 0;
  double dt_step_ = 0.0;
  double near_dist_ = 0.0;
  double near_max_ = 0.0, near_dg_ = 0.0, near_ddt_ = 0.0;
  int near_ng_ = 0, near_nt_ = 0;
  std::vector<double> near_table_;
  std::vector<double> table_;  // [igamma][idt]
  std::vector<double> conv_;   // [((ie_x*neta+ie_y)*nxi1+dj)*nxi2+dk][ddt]
};

}  // namespace asdlab

#endif
