#pragma once

#include "nhanyon/fock.hpp"

namespace nhanyon {

enum class Boundary { open, periodic };

/// Physical and boundary parameters of the chain.
///
/// The hopping amplitudes J_L (leftward) and J_R (rightward) are stored
/// explicitly; `asymmetric` builds the J_L = e^{-alpha}, J_R = e^{+alpha}
/// parameterization. theta is the statistics angle of the density-dependent
/// hopping phase, U the onsite Hubbard interaction. Under periodic boundary
/// conditions the bond closing the ring carries the twist phi.
struct ModelParams {
  int sites = 2;
  int particles = 1;
  double hop_left = 1.0;   // J_L
  double hop_right = 1.0;  // J_R
  double theta = 0.0;
  double onsite_u = 0.0;  // U
  Boundary boundary = Boundary::open;
  double twist = 0.0;  // phi, periodic only
  int cap = 0;         // 0 = softcore (cap resolves to `particles`)

  static ModelParams asymmetric(int sites, int particles, double alpha,
                                double theta, double onsite_u,
                                Boundary boundary = Boundary::open);

  double alpha() const;  // 0.5 * log(J_R / J_L)
  int occupation_cap() const { return cap > 0 ? cap : particles; }
  SectorKey sector() const { return {sites, particles, occupation_cap()}; }

  /// Throws std::invalid_argument on an inconsistent parameter set
  /// (non-positive hoppings, twist under OBC, periodic ring with L < 3, ...).
  void validate() const;

  FockBasis basis() const;
};

/// Sparse Hamiltonian of the boson-mapped chain in the fixed-N sector:
/// hopping -(J_L b†_j e^{-i theta n_j} b_{j+1} + J_R b†_{j+1} e^{i theta n_j} b_j)
/// over nearest-neighbor bonds plus (U/2) sum_j n_j (n_j - 1). Under PBC the
/// ring-closing bond carries J_L e^{+i phi}, J_R e^{-i phi}.
OperatorMatrix build_hamiltonian(const ModelParams& params,
                                 const FockBasis& basis);
OperatorMatrix build_hamiltonian(const ModelParams& params);

/// Diagonal similarity transform S that makes the OBC Hamiltonian Hermitian:
/// entry exp(-alpha_eff * sum_l l * n_l) per Fock state, normalized so the
/// largest entry is 1. alpha_eff = 0.5 log(J_R/J_L) handles general J_L, J_R.
struct GaugeSimilarity {
  Eigen::VectorXd diag;
  double alpha_eff = 0.0;
  double exponent_span = 0.0;  // alpha_eff * (w_max - w_min); e^span = cond(S)
  bool conditioning_warning = false;
};

/// Conditioning threshold: exponent spans beyond this are flagged.
inline constexpr double kGaugeConditioningLimit = 8.0;

GaugeSimilarity gauge_similarity(const ModelParams& params,
                                 const FockBasis& basis);

/// S H S^{-1} for the OBC chain; Hermitian by construction, asserted within
/// tolerance. Entry magnitudes depend only on J_L*J_R, not on theta.
OperatorMatrix hermitized(const ModelParams& params, const FockBasis& basis,
                          GaugeSimilarity* info = nullptr);

}  // namespace nhanyon
