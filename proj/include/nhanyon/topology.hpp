#pragma once

#include <functional>

#include "nhanyon/model.hpp"

namespace nhanyon {

/// Periodic Hamiltonian with the ring-closing bond twisted by phi
/// (J_L e^{+i phi}, J_R e^{-i phi}). Rejects open boundaries.
OperatorMatrix twisted_hamiltonian(const ModelParams& params,
                                   const FockBasis& basis, double phi);

/// log|det A| and principal arg det A accumulated pivot by pivot from a
/// partially pivoted LU factorization, so the magnitude never overflows.
struct LogDet {
  double log_abs = 0.0;
  double arg = 0.0;
  bool near_singular = false;
};

LogDet logdet_phase(const Mat& matrix);

/// Winding of arg det(H(phi) - E_b) as the boundary twist sweeps 2 pi.
struct WindingScan {
  cd reference{};                // E_b
  std::vector<double> phis;      // sampled twists, ascending in [0, 2 pi]
  std::vector<double> phases;    // unwrapped arguments along the path
  int winding = 0;
  double residual = 0.0;  // |total/2pi - winding|
  bool conclusive = false;
};

/// Generic scan over a caller-supplied family phi -> H(phi). The grid is
/// refined wherever consecutive phase jumps approach pi.
WindingScan winding_scan(const std::function<Mat(double)>& family, cd reference,
                         int n_phi = 256);

/// Spectral winding of the boundary-twisted chain at reference energy E_b.
WindingScan winding_number(const ModelParams& params, const FockBasis& basis,
                           cd reference, int n_phi = 256);

}  // namespace nhanyon
