#pragma once

#include <vector>

#include "nhanyon/dynamics.hpp"

namespace nhanyon {

/// Heisenberg picture for non-Hermitian generators. `adjoint` conjugates
/// with e^{+iH†t} on the bra side, matching how densities of normalized
/// evolved states are measured; `similarity` uses the algebraic inverse
/// e^{+iHt} instead.
enum class HeisenbergConvention { adjoint, similarity };

/// O(t) for an operator mapping the `h_in` sector into the `h_out` sector:
/// e^{+iH_out† t} O e^{-iH_in t} (adjoint convention). Square operators pass
/// the same Hamiltonian twice.
Mat heisenberg_operator(const Mat& h_out, const Mat& h_in, const Mat& op,
                        double t,
                        HeisenbergConvention convention =
                            HeisenbergConvention::adjoint);
Mat heisenberg_operator(const Mat& hamiltonian, const Mat& op, double t,
                        HeisenbergConvention convention =
                            HeisenbergConvention::adjoint);

/// Out-of-time-order data for one source site: F_{jk}(t) and the commutator
/// norm C_{jk}(t) for all j at the sampled times. `norm_divisor` records the
/// divisor applied by normalize_grid (1 until then).
struct OtocGrid {
  std::vector<double> times;
  int source = 0;  // k, 1-based
  Mat f;                       // sites x times
  Eigen::MatrixXd commutator;  // sites x times, real
  double norm_divisor = 1.0;
  bool conditioning_warning = false;
};

enum class OtocNormalization {
  global_max,    // divide by max_{j,t} |F|
  per_site_max,  // divide each site row by its own max_t |F|
};

/// Presentation-time rescaling so the largest |F| becomes 1. Rejects an
/// all-zero grid.
OtocGrid normalize_grid(const OtocGrid& grid, OtocNormalization scheme);

/// Thermal-ensemble OTOC over the fixed-N sector: commutator norm
/// C_jk(t) = < |[a_j(t), a_k(0)]_theta|^2 >_beta and its out-of-time-ordered
/// part F_jk(t) = < a†_j(t) a†_k(0) a_j(t) a_k(0) >_beta times the exchange
/// phase of the (j,k) pair, with anyonic operator matrices so the statistics
/// enter exactly and each sector leg evolved by its own Hamiltonian.
OtocGrid thermal_otoc(const ModelParams& params, double beta, int source,
                      const std::vector<double>& times,
                      HeisenbergConvention convention =
                          HeisenbergConvention::adjoint);

/// Same correlators with the thermal average replaced by <psi0| . |psi0>.
OtocGrid state_otoc(const ModelParams& params, const Vec& psi0, int source,
                    const std::vector<double>& times,
                    HeisenbergConvention convention =
                        HeisenbergConvention::adjoint);

}  // namespace nhanyon
