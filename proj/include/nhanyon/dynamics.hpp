#pragma once

#include <memory>
#include <optional>
#include <string>

#include "nhanyon/model.hpp"
#include "nhanyon/spectra.hpp"

namespace nhanyon {

enum class PropagationMethod { dense, krylov };

/// Normalized state after non-unitary evolution. `log_norm` records
/// log ||e^{-iHt} psi0||, accumulated across internal renormalizations so
/// that growth factors beyond double range stay representable.
struct EvolvedState {
  Vec amplitudes;
  double time = 0.0;
  double log_norm = 0.0;
};

/// Applies e^{-iHt} through the spectral decomposition of H, falling back to
/// a scaling-and-squaring matrix exponential when the eigenbasis is too
/// ill-conditioned. Construct once, evolve to many times.
class DensePropagator {
 public:
  explicit DensePropagator(const Mat& hamiltonian);

  /// Raw (unnormalized) action; log_norm_out receives log of the growth.
  Vec apply(const Vec& psi, double t, double* log_norm_out = nullptr) const;
  bool spectral_path() const { return spectral_ok_; }

 private:
  Mat hamiltonian_;
  Spectrum spectrum_;
  Eigen::PartialPivLU<Mat> lu_;
  bool spectral_ok_ = false;
};

/// Arnoldi approximation of e^{-iHt} v for sparse non-normal H. Substeps are
/// chosen adaptively from the subspace residual estimate; the state is
/// renormalized every substep with the growth accumulated in log space.
class KrylovPropagator {
 public:
  explicit KrylovPropagator(SpMat hamiltonian, int subspace = 30,
                            double tol = 1e-10);

  Vec apply(const Vec& psi, double t, double* log_norm_out = nullptr) const;

 private:
  SpMat hamiltonian_;
  int subspace_;
  double tol_;
  double norm_estimate_;
};

/// e^{-iHt} psi0 normalized to unit norm. psi0 must already be normalized.
EvolvedState propagate(const OperatorMatrix& hamiltonian, const Vec& psi0,
                       double t, PropagationMethod method);

/// One particle per site on the N central sites; rejects geometries where
/// the centered block has no unique placement unless `offset` pins the first
/// occupied site (1-based).
Vec uniform_center_state(const FockBasis& basis,
                         std::optional<int> offset = std::nullopt);

/// Sampled densities n_j(t) = <psi(t)| n_j |psi(t)> on the normalized state.
struct TimeSeries {
  std::vector<double> times;
  Eigen::MatrixXd density;  // rows = times, cols = sites
  ModelParams params;
  std::string initial_state;
};

TimeSeries density_series(const ModelParams& params, const FockBasis& basis,
                          const Vec& psi0, double t_max, double dt,
                          PropagationMethod method);

/// Right-minus-left half imbalance sum_{i<=L/2} (n_{i+L/2} - n_i) per sampled
/// time. Odd L requires `exclude_center` and skips the middle site.
std::vector<double> imbalance(const TimeSeries& series,
                              bool exclude_center = false);

/// Total duration with centered-difference slope < -slope_eps, summed over
/// all maximal subintervals (`longest` keeps the single largest one).
struct ReversedInterval {
  double total = 0.0;
  double longest = 0.0;
};

ReversedInterval reversed_interval(const std::vector<double>& imbalance,
                                   double dt, double slope_eps,
                                   int smooth_window = 0);

/// Default slope threshold per particle for reversed-interval detection.
inline constexpr double kSlopeEpsPerParticle = 1e-4;

/// Gamma_qr = <psi| n_q n_r |psi>; real symmetric, sums to N^2.
Eigen::MatrixXd density_correlation(const Vec& psi, const FockBasis& basis);

/// |<psi1|e^{-iHt}|psi0>| versus the mirror transition
/// |<I psi1|e^{-iHt}|psi0>|; psi0 must be inversion symmetric.
struct TransitionAmplitudes {
  double direct = 0.0;
  double mirrored = 0.0;
};

TransitionAmplitudes transition_asymmetry(const Vec& psi0, const Vec& psi1,
                                          const OperatorMatrix& hamiltonian,
                                          const FockBasis& basis, double t);

}  // namespace nhanyon
