#pragma once

#include <string>
#include <vector>

#include "nhanyon/dynamics.hpp"
#include "nhanyon/spectra.hpp"

namespace nhanyon {

/// Outcome of one machine-checked symmetry identity.
struct SymmetryReport {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  static SymmetryReport make(std::string name, double residual,
                             double tolerance) {
    return {std::move(name), residual, tolerance, residual < tolerance};
  }
};

/// Residual of K H K† = H† with K = R_z · I · T: R_z the diagonal phase
/// exp(-i theta n_j(n_j-1)/2) per site, I the site-inversion permutation and
/// T complex conjugation (applied to the operand, not as a matrix).
SymmetryReport pseudo_hermiticity_residual(const ModelParams& params,
                                           const FockBasis& basis,
                                           double tolerance = 1e-12);

/// Checks that the eigenvalue multiset equals its complex conjugate.
SymmetryReport conjugate_pair_check(const Spectrum& spectrum,
                                    double tolerance = 1e-8);

/// Max density deviation between the (+theta, +U) and (-theta, -U) runs for
/// a real Fock-product initial state, over all sites and sampled times.
SymmetryReport dynamical_symmetry_residual(const ModelParams& params,
                                           const Vec& psi0, double t_max,
                                           double dt,
                                           double tolerance = 1e-10);

/// max |Im lambda| of the OBC spectrum (real up to solver accuracy as long
/// as the gauge-similarity conditioning bound holds).
SymmetryReport obc_reality_residual(const ModelParams& params,
                                    double tolerance = 1e-6);

/// Site-inversion permutation matrix occ -> reversed(occ) on the sector.
OperatorMatrix inversion_matrix(const FockBasis& basis);

/// Diagonal rotation exp(-i theta sum_j n_j(n_j-1)/2).
OperatorMatrix statistics_rotation_matrix(const FockBasis& basis,
                                          double theta);

}  // namespace nhanyon
