#ifndef ASDLAB_SPECTRAL_HPP
#define ASDLAB_SPECTRAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "asdlab/field.hpp"

namespace asdlab {

struct SpectralProbe {
  std::string op;                  // "laplacian_omega0" or "deformation"
  std::vector<double> eigenvalues; // ascending
  double threshold = 0.0;
  int count_below = 0;
};

// Smallest eigenvalues of a symmetric positive semidefinite operator by
// blocked LOBPCG with Rayleigh-Ritz on [X W P].
std::vector<double> lobpcg_smallest(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
    const std::vector<double>& weight, int n_dof, int n_want, int max_iter, double tol);

// Delta_A on 0-forms: kernel = covariantly constant sections (3 for flat).
SpectralProbe probe_laplacian_omega0(const Grid& g, const Field& a_frame, int count);

// Normal operator of (d_A^* (+) d_A^+) on 1-forms; periodic grids.
SpectralProbe probe_deformation(const Grid& g, const Field& a_frame, int count);

// Jacobi eigenvalues of a small dense symmetric matrix (row-major n x n).
void jacobi_eigen(std::vector<double>& m, int n, std::vector<double>& evals, std::vector<double>& evecs);

}  // namespace asdlab

#endif
