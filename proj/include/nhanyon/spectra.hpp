#pragma once

#include "nhanyon/model.hpp"

namespace nhanyon {

/// Full eigensystem of a (generally non-normal) complex matrix.
///
/// Eigenvalues are sorted by (real, imaginary) part with right eigenvectors
/// permuted alongside; columns of `right` have unit norm. When requested,
/// `left` holds left eigenvectors normalized to biorthogonality
/// <l_i|r_j> = delta_ij (flagged instead near defective clusters).
struct Spectrum {
  Eigen::VectorXcd values;
  Mat right;
  Mat left;  // 0x0 unless requested
  double residual = 0.0;
  double residual_bound = 0.0;
  bool converged = true;
  bool near_defective = false;

  bool has_left() const { return left.size() > 0; }
};

/// Dense non-symmetric eigensolver. `tol_scale` fixes the acceptable
/// residual as tol_scale * ||H||. Throws on solver failure.
Spectrum eigendecompose(const Mat& hamiltonian, bool want_left = false,
                        double tol_scale = 1e-9);
Spectrum eigendecompose(const OperatorMatrix& hamiltonian,
                        bool want_left = false, double tol_scale = 1e-9);

/// Maximum admissible dense dimension for eigendecompose.
inline constexpr Eigen::Index kMaxDenseDim = 20000;

/// Per-eigenstate site-resolved density, rho_i(x) = sum_s |psi_i(s)|^2
/// occ_x(s) / N, plus the average over all eigenstates. Every row sums to 1.
struct DensityProfile {
  Eigen::MatrixXd per_state;  // rows = eigenstates, cols = sites
  Eigen::VectorXd average;
};

DensityProfile density_profiles(const Spectrum& spectrum,
                                const FockBasis& basis);

/// Interaction-separated eigenvalue cluster near E ~ U, located by the
/// largest relative gap in the sorted distances |lambda - U|. The cluster is
/// declared separated only when that gap ratio exceeds `min_gap_ratio`.
struct BoundCluster {
  std::vector<int> indices;  // positions in Spectrum::values
  bool separated = false;
  double gap_ratio = 0.0;
};

BoundCluster bound_state_loop(const Spectrum& spectrum, double onsite_u,
                              double min_gap_ratio = 3.0);

/// L x L one-band Hamiltonian of the two-particle bound states for large U:
/// diagonal U + 4 J_L J_R / U, hop to the left 2 J_L^2 e^{-i theta} / U and
/// to the right 2 J_R^2 e^{+i theta} / U. Requires U != 0.
Mat effective_bound_hamiltonian(const ModelParams& params);

/// Bloch dispersion of the bound band,
/// U + 4 J_L J_R / U + (2 J_L^2/U) e^{i(k-theta)} + (2 J_R^2/U) e^{-i(k-theta)}.
cd effective_dispersion(double k, const ModelParams& params);

}  // namespace nhanyon
