#include "nhanyon/topology.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nhanyon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double principal(double angle) {
  while (angle > std::numbers::pi) angle -= kTwoPi;
  while (angle <= -std::numbers::pi) angle += kTwoPi;
  return angle;
}

}  // namespace

OperatorMatrix twisted_hamiltonian(const ModelParams& params,
                                   const FockBasis& basis, double phi) {
  if (params.boundary != Boundary::periodic)
    throw std::invalid_argument(
        "twisted_hamiltonian: the boundary twist needs a ring");
  ModelParams p = params;
  p.twist = phi;
  return build_hamiltonian(p, basis);
}

LogDet logdet_phase(const Mat& matrix) {
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("logdet_phase: matrix must be square");
  Eigen::PartialPivLU<Mat> lu(matrix);
  LogDet out;
  const auto& diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const double mag = std::abs(diag(i));
    if (mag < 1e-300) {
      out.near_singular = true;
      out.log_abs = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.log_abs += std::log(mag);
    out.arg += std::arg(diag(i));
  }
  if (lu.permutationP().determinant() < 0) out.arg += std::numbers::pi;
  out.arg = principal(out.arg);
  return out;
}

WindingScan winding_scan(const std::function<Mat(double)>& family,
                         cd reference, int n_phi) {
  if (n_phi < 8)
    throw std::invalid_argument("winding_scan: grid too coarse");
  WindingScan scan;
  scan.reference = reference;

  const auto arg_at = [&](double phi) {
    Mat shifted = family(phi);
    shifted.diagonal().array() -= reference;
    const LogDet ld = logdet_phase(shifted);
    if (ld.near_singular)
      throw std::runtime_error(
          "winding_scan: reference energy sits on the swept spectrum");
    return ld.arg;
  };

  // Uniform grid first, then bisect wherever the phase jumps approach pi.
  std::vector<std::pair<double, double>> samples;  // (phi, principal arg)
  samples.reserve(n_phi + 1);
  for (int k = 0; k <= n_phi; ++k) {
    const double phi = kTwoPi * k / n_phi;
    samples.emplace_back(phi, arg_at(phi));
  }
  const double jump_limit = 0.5 * std::numbers::pi;
  const double min_step = kTwoPi / (1 << 22);
  for (std::size_t i = 0; i + 1 < samples.size();) {
    const double jump = principal(samples[i + 1].second - samples[i].second);
    const double step = samples[i + 1].first - samples[i].first;
    if (std::abs(jump) > jump_limit && step > min_step) {
      const double mid = 0.5 * (samples[i].first + samples[i + 1].first);
      samples.insert(samples.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                     {mid, arg_at(mid)});
    } else {
      ++i;
    }
  }

  scan.phis.reserve(samples.size());
  scan.phases.reserve(samples.size());
  double unwrapped = samples.front().second;
  scan.phis.push_back(samples.front().first);
  scan.phases.push_back(unwrapped);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    unwrapped += principal(samples[i].second - samples[i - 1].second);
    scan.phis.push_back(samples[i].first);
    scan.phases.push_back(unwrapped);
  }

  const double total = (scan.phases.back() - scan.phases.front()) / kTwoPi;
  scan.winding = static_cast<int>(std::lround(total));
  scan.residual = std::abs(total - scan.winding);
  scan.conclusive = scan.residual < 0.05;
  return scan;
}

WindingScan winding_number(const ModelParams& params, const FockBasis& basis,
                           cd reference, int n_phi) {
  if (params.boundary != Boundary::periodic)
    throw std::invalid_argument("winding_number: requires a ring");
  const auto family = [&](double phi) {
    return twisted_hamiltonian(params, basis, phi).dense();
  };
  return winding_scan(family, reference, n_phi);
}

}  // namespace nhanyon
