#include "nhanyon/symmetry.hpp"

#include <cmath>
#include <stdexcept>

namespace nhanyon {

OperatorMatrix inversion_matrix(const FockBasis& basis) {
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(basis.dim());
  std::vector<std::uint8_t> rev(basis.sites());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto occ = basis.state(s);
    std::reverse_copy(occ.begin(), occ.end(), rev.begin());
    triplets.emplace_back(static_cast<int>(basis.rank(rev)),
                          static_cast<int>(s), 1.0);
  }
  SpMat mat(static_cast<Eigen::Index>(basis.dim()),
            static_cast<Eigen::Index>(basis.dim()));
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(mat), basis.key(), basis.key()};
}

OperatorMatrix statistics_rotation_matrix(const FockBasis& basis,
                                          double theta) {
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(basis.dim());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto occ = basis.state(s);
    double w = 0.0;
    for (int j = 0; j < basis.sites(); ++j)
      w += 0.5 * occ[j] * (occ[j] - 1.0);
    triplets.emplace_back(static_cast<int>(s), static_cast<int>(s),
                          std::exp(cd(0.0, -theta * w)));
  }
  SpMat mat(static_cast<Eigen::Index>(basis.dim()),
            static_cast<Eigen::Index>(basis.dim()));
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(mat), basis.key(), basis.key()};
}

SymmetryReport pseudo_hermiticity_residual(const ModelParams& params,
                                           const FockBasis& basis,
                                           double tolerance) {
  if (params.boundary == Boundary::periodic && params.twist != 0.0)
    throw std::invalid_argument(
        "pseudo_hermiticity_residual: twisted rings break the identity");

  const Mat h = build_hamiltonian(params, basis).dense();
  const Mat inv = inversion_matrix(basis).dense();
  const Mat rot = statistics_rotation_matrix(basis, params.theta).dense();

  // Complex conjugation is anti-unitary, so it acts on the operand: the
  // identity reads R_z I conj(H) I† R_z† = H†.
  const Mat lhs =
      rot * inv * h.conjugate() * inv.adjoint() * rot.adjoint();
  const double residual = (lhs - h.adjoint()).cwiseAbs().maxCoeff();
  return SymmetryReport::make("pseudo_hermiticity", residual, tolerance);
}

SymmetryReport conjugate_pair_check(const Spectrum& spectrum,
                                    double tolerance) {
  // The sort order (re, im) maps a conjugate-closed multiset onto itself
  // with the imaginary order reversed inside equal-real groups; sorting the
  // conjugated values the same way makes the comparison elementwise.
  const Eigen::Index n = spectrum.values.size();
  std::vector<cd> a(n), b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a[i] = spectrum.values(i);
    b[i] = std::conj(spectrum.values(i));
  }
  auto cmp = [](const cd& x, const cd& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), cmp);
  std::sort(b.begin(), b.end(), cmp);
  double residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    residual = std::max(residual, std::abs(a[i] - b[i]));
  return SymmetryReport::make("conjugate_pairing", residual, tolerance);
}

SymmetryReport dynamical_symmetry_residual(const ModelParams& params,
                                           const Vec& psi0, double t_max,
                                           double dt, double tolerance) {
  for (Eigen::Index s = 0; s < psi0.size(); ++s)
    if (std::abs(psi0(s).imag()) > 1e-14)
      throw std::invalid_argument(
          "dynamical_symmetry_residual: initial state must be real in the "
          "occupation basis");

  ModelParams flipped = params;
  flipped.theta = -params.theta;
  flipped.onsite_u = -params.onsite_u;

  const FockBasis basis = params.basis();
  const auto method = basis.dim() <= 4096 ? PropagationMethod::dense
                                          : PropagationMethod::krylov;
  const TimeSeries plus = density_series(params, basis, psi0, t_max, dt,
                                         method);
  const TimeSeries minus = density_series(flipped, basis, psi0, t_max, dt,
                                          method);
  const double residual =
      (plus.density - minus.density).cwiseAbs().maxCoeff();
  return SymmetryReport::make("dynamical_symmetry", residual, tolerance);
}

SymmetryReport obc_reality_residual(const ModelParams& params,
                                    double tolerance) {
  if (params.boundary != Boundary::open)
    throw std::invalid_argument("obc_reality_residual: requires OBC");
  const FockBasis basis = params.basis();
  const Spectrum spec = eigendecompose(build_hamiltonian(params, basis));
  const double residual = spec.values.imag().cwiseAbs().maxCoeff();
  return SymmetryReport::make("obc_reality", residual, tolerance);
}

}  // namespace nhanyon
