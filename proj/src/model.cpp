#include "nhanyon/model.hpp"

#include <cmath>
#include <stdexcept>

namespace nhanyon {

ModelParams ModelParams::asymmetric(int sites, int particles, double alpha,
                                    double theta, double onsite_u,
                                    Boundary boundary) {
  ModelParams p;
  p.sites = sites;
  p.particles = particles;
  p.hop_left = std::exp(-alpha);
  p.hop_right = std::exp(alpha);
  p.theta = theta;
  p.onsite_u = onsite_u;
  p.boundary = boundary;
  return p;
}

double ModelParams::alpha() const {
  return 0.5 * std::log(hop_right / hop_left);
}

void ModelParams::validate() const {
  if (sites < 1) throw std::invalid_argument("params: need at least one site");
  if (particles < 0)
    throw std::invalid_argument("params: negative particle number");
  if (!(hop_left > 0.0) || !(hop_right > 0.0))
    throw std::invalid_argument("params: hopping amplitudes must be positive");
  if (boundary == Boundary::open && twist != 0.0)
    throw std::invalid_argument("params: boundary twist requires a ring");
  if (boundary == Boundary::periodic && sites < 3)
    throw std::invalid_argument(
        "params: periodic ring needs L >= 3 (shorter rings double-count the "
        "boundary bond)");
  if (static_cast<long long>(sites) * occupation_cap() < particles)
    throw std::invalid_argument("params: empty sector");
}

FockBasis ModelParams::basis() const {
  validate();
  return FockBasis(sites, particles, occupation_cap());
}

namespace {

// Accumulates both hopping terms of the bond whose left site is `p` and
// right site is `q` (0-based). Reading the terms right to left fixes which
// occupation enters the density-dependent phase: the leftward hop sees the
// pre-hop n_p, the rightward hop sees n_p - 1 after its annihilation.
void add_bond(const FockBasis& basis, std::span<const std::uint8_t> occ,
              std::size_t source, int p, int q, cd amp_left, cd amp_right,
              double theta, int cap, std::vector<std::uint8_t>& scratch,
              std::vector<Eigen::Triplet<cd>>& triplets) {
  // -J_L b†_p e^{-i theta n_p} b_q : particle moves q -> p.
  if (occ[q] >= 1 && occ[p] < cap) {
    std::copy(occ.begin(), occ.end(), scratch.begin());
    ++scratch[p];
    --scratch[q];
    const std::size_t target = basis.rank(scratch);
    const double root =
        std::sqrt(static_cast<double>(occ[q]) * (occ[p] + 1.0));
    const cd phase = std::exp(cd(0.0, -theta * occ[p]));
    triplets.emplace_back(static_cast<int>(target), static_cast<int>(source),
                          -amp_left * root * phase);
  }
  // -J_R b†_q e^{+i theta n_p} b_p : particle moves p -> q.
  if (occ[p] >= 1 && occ[q] < cap) {
    std::copy(occ.begin(), occ.end(), scratch.begin());
    --scratch[p];
    ++scratch[q];
    const std::size_t target = basis.rank(scratch);
    const double root =
        std::sqrt(static_cast<double>(occ[p]) * (occ[q] + 1.0));
    const cd phase = std::exp(cd(0.0, theta * (occ[p] - 1.0)));
    triplets.emplace_back(static_cast<int>(target), static_cast<int>(source),
                          -amp_right * root * phase);
  }
}

}  // namespace

OperatorMatrix build_hamiltonian(const ModelParams& params,
                                 const FockBasis& basis) {
  params.validate();
  if (basis.key() != params.sector())
    throw std::invalid_argument("build_hamiltonian: basis/sector mismatch");

  const int L = params.sites;
  const int cap = params.occupation_cap();
  const cd boundary_left = params.hop_left * std::exp(cd(0.0, params.twist));
  const cd boundary_right =
      params.hop_right * std::exp(cd(0.0, -params.twist));

  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(basis.dim() *
                   (2 * std::min(params.particles + 1, L) + 2));
  std::vector<std::uint8_t> scratch(L);

  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto occ = basis.state(s);
    double onsite = 0.0;
    for (int j = 0; j < L; ++j)
      onsite += 0.5 * params.onsite_u * occ[j] * (occ[j] - 1.0);
    if (onsite != 0.0)
      triplets.emplace_back(static_cast<int>(s), static_cast<int>(s), onsite);

    for (int j = 0; j + 1 < L; ++j)
      add_bond(basis, occ, s, j, j + 1, params.hop_left, params.hop_right,
               params.theta, cap, scratch, triplets);
    if (params.boundary == Boundary::periodic)
      add_bond(basis, occ, s, L - 1, 0, boundary_left, boundary_right,
               params.theta, cap, scratch, triplets);
  }

  SpMat mat(static_cast<Eigen::Index>(basis.dim()),
            static_cast<Eigen::Index>(basis.dim()));
  mat.setFromTriplets(triplets.begin(), triplets.end());
  mat.prune([](Eigen::Index, Eigen::Index, const cd& v) { return v != cd(0); });
  return {std::move(mat), basis.key(), basis.key()};
}

OperatorMatrix build_hamiltonian(const ModelParams& params) {
  const FockBasis basis = params.basis();
  return build_hamiltonian(params, basis);
}

GaugeSimilarity gauge_similarity(const ModelParams& params,
                                 const FockBasis& basis) {
  params.validate();
  if (params.boundary != Boundary::open)
    throw std::invalid_argument(
        "gauge_similarity: the similarity transform is exact only for open "
        "boundaries");

  GaugeSimilarity g;
  g.alpha_eff = params.alpha();

  // Weight w(s) = sum_l l * n_l, l counted from 1.
  Eigen::VectorXd weight(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto occ = basis.state(s);
    double w = 0.0;
    for (int l = 0; l < basis.sites(); ++l) w += (l + 1.0) * occ[l];
    weight(static_cast<Eigen::Index>(s)) = w;
  }
  const double w_min = weight.minCoeff();
  const double w_max = weight.maxCoeff();
  g.exponent_span = std::abs(g.alpha_eff) * (w_max - w_min);
  g.conditioning_warning = g.exponent_span > kGaugeConditioningLimit;

  // Normalize so the largest diagonal entry is exactly 1.
  const double shift = g.alpha_eff >= 0.0 ? w_min : w_max;
  g.diag = (-g.alpha_eff * (weight.array() - shift)).exp();
  return g;
}

OperatorMatrix hermitized(const ModelParams& params, const FockBasis& basis,
                          GaugeSimilarity* info) {
  const GaugeSimilarity g = gauge_similarity(params, basis);
  if (info) *info = g;

  OperatorMatrix h = build_hamiltonian(params, basis);
  SpMat scaled = h.mat;
  for (int k = 0; k < scaled.outerSize(); ++k)
    for (SpMat::InnerIterator it(scaled, k); it; ++it)
      it.valueRef() *= g.diag(it.row()) / g.diag(it.col());

  double dev = 0.0, scale = 1.0;
  const SpMat diff = scaled - SpMat(scaled.adjoint());
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SpMat::InnerIterator it(diff, k); it; ++it)
      dev = std::max(dev, std::abs(it.value()));
  for (int k = 0; k < scaled.outerSize(); ++k)
    for (SpMat::InnerIterator it(scaled, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  if (dev > 1e-8 * scale)
    throw std::runtime_error(
        "hermitized: transformed matrix deviates from Hermiticity by " +
        std::to_string(dev));
  return {std::move(scaled), basis.key(), basis.key()};
}

}  // namespace nhanyon
