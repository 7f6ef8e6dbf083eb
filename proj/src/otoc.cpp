#include "nhanyon/otoc.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace nhanyon {

namespace {

double sign_of(int a, int b) { return a > b ? 1.0 : (a < b ? -1.0 : 0.0); }

// Tr(A B) without forming the product.
cd trace_prod(const Mat& a, const Mat& b) {
  return (a.transpose().cwiseProduct(b)).sum();
}

// Spectral factorization of one fixed-N sector, providing the forward map
// e^{-iHt} and its adjoint as matrices or matrix-vector actions.
struct SectorOps {
  FockBasis basis;
  Mat h;
  Spectrum spec;
  Eigen::PartialPivLU<Mat> vlu;
  bool pade_fallback = false;

  SectorOps(const ModelParams& params, int particles)
      : basis(params.sites, particles, params.occupation_cap()),
        h([&] {
          ModelParams p = params;
          p.particles = particles;
          return build_hamiltonian(p, basis).dense();
        }()),
        spec(eigendecompose(h)),
        vlu(spec.right) {
    pade_fallback = spec.near_defective;
  }

  Eigen::Index dim() const { return h.rows(); }

  Vec phases(double t) const {
    Vec e(spec.values.size());
    for (Eigen::Index i = 0; i < e.size(); ++i)
      e(i) = std::exp(cd(0.0, -t) * spec.values(i));
    return e;
  }

  // e^{-iHt} v
  Vec forward(const Vec& v, double t) const {
    if (pade_fallback) return forward_matrix(t) * v;
    return spec.right * (phases(t).cwiseProduct(vlu.solve(v)));
  }

  // e^{+iH†t} v = (e^{-iHt})† v
  Vec forward_adjoint(const Vec& v, double t) const {
    if (pade_fallback) return forward_matrix(t).adjoint() * v;
    const Vec y = phases(t).conjugate().cwiseProduct(spec.right.adjoint() * v);
    return vlu.adjoint().solve(y);
  }

  // e^{+iHt} v (similarity convention)
  Vec backward(const Vec& v, double t) const { return forward(v, -t); }

  Mat forward_matrix(double t) const {
    if (pade_fallback) return (cd(0.0, -t) * h).exp();
    return spec.right * phases(t).asDiagonal() *
           vlu.solve(Mat::Identity(dim(), dim()));
  }
};

void check_source(const ModelParams& params, int source) {
  if (source < 1 || source > params.sites)
    throw std::invalid_argument("otoc: source site outside the chain");
  if (params.particles < 2)
    throw std::invalid_argument(
        "otoc: the commutator chain needs at least two particles");
}

}  // namespace

Mat heisenberg_operator(const Mat& h_out, const Mat& h_in, const Mat& op,
                        double t, HeisenbergConvention convention) {
  if (op.rows() != h_out.rows() || op.cols() != h_in.rows())
    throw std::invalid_argument(
        "heisenberg_operator: operator does not match the sector pair");
  const Mat u_in = (cd(0.0, -t) * h_in).exp();
  Mat left;
  if (convention == HeisenbergConvention::adjoint)
    left = (cd(0.0, -t) * h_out).exp().adjoint();  // e^{+i H_out† t}
  else
    left = (cd(0.0, t) * h_out).exp();
  return left * op * u_in;
}

Mat heisenberg_operator(const Mat& hamiltonian, const Mat& op, double t,
                        HeisenbergConvention convention) {
  return heisenberg_operator(hamiltonian, hamiltonian, op, t, convention);
}

OtocGrid normalize_grid(const OtocGrid& grid, OtocNormalization scheme) {
  const double global = grid.f.cwiseAbs().maxCoeff();
  if (!(global > 0.0))
    throw std::invalid_argument("normalize_grid: all-zero grid");
  OtocGrid out = grid;
  out.norm_divisor = global;
  if (scheme == OtocNormalization::global_max) {
    out.f /= global;
  } else {
    for (Eigen::Index j = 0; j < out.f.rows(); ++j) {
      const double row_max = out.f.row(j).cwiseAbs().maxCoeff();
      if (row_max > 0.0) out.f.row(j) /= row_max;
    }
  }
  return out;
}

OtocGrid thermal_otoc(const ModelParams& params, double beta, int source,
                      const std::vector<double>& times,
                      HeisenbergConvention convention) {
  params.validate();
  check_source(params, source);
  if (beta < 0.0)
    throw std::invalid_argument("thermal_otoc: negative inverse temperature");

  const int L = params.sites;
  const int N = params.particles;
  const int k = source;
  const SectorOps top(params, N), mid(params, N - 1), low(params, N - 2);

  // Thermal weight over the fixed-N sector, shifted so nothing overflows.
  const double shift = top.spec.values.real().minCoeff();
  Vec weights(top.dim());
  double weight_mass = 0.0;
  for (Eigen::Index m = 0; m < top.dim(); ++m) {
    weights(m) = std::exp(-beta * (top.spec.values(m) - shift));
    weight_mass += std::abs(weights(m));
  }
  const cd partition = weights.sum();
  const Mat rho = top.spec.right * weights.asDiagonal() *
                  top.vlu.solve(Mat::Identity(top.dim(), top.dim())) /
                  partition;

  // Anyonic annihilation blocks for every site, in both sector pairs.
  std::vector<Mat> a_top(L), a_mid(L);
  for (int j = 1; j <= L; ++j) {
    a_top[j - 1] =
        anyon_annihilation(top.basis, mid.basis, j, params.theta).dense();
    a_mid[j - 1] =
        anyon_annihilation(mid.basis, low.basis, j, params.theta).dense();
  }

  OtocGrid grid;
  grid.times = times;
  grid.source = k;
  grid.f.resize(L, static_cast<Eigen::Index>(times.size()));
  grid.commutator.resize(L, static_cast<Eigen::Index>(times.size()));
  grid.conditioning_warning =
      std::abs(partition) < 1e-8 * weight_mass;

  const bool adjoint = convention == HeisenbergConvention::adjoint;
  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    const Mat u_top = top.forward_matrix(t);
    const Mat u_mid = mid.forward_matrix(t);
    const Mat u_low = low.forward_matrix(t);
    const Mat left_mid = adjoint ? Mat(u_mid.adjoint()) : mid.forward_matrix(-t);
    const Mat left_low = adjoint ? Mat(u_low.adjoint()) : low.forward_matrix(-t);

    for (int j = 1; j <= L; ++j) {
      const cd stat_phase =
          std::exp(cd(0.0, -params.theta * sign_of(j, k)));
      const Mat aj_top_t = left_mid * a_top[j - 1] * u_top;  // N -> N-1
      const Mat aj_mid_t = left_low * a_mid[j - 1] * u_mid;  // N-1 -> N-2

      // F = < a†_j(t) a†_k(0) a_j(t) a_k(0) > times the exchange phase
      const Mat chain = aj_top_t.adjoint() *
                        (a_mid[k - 1].adjoint() * (aj_mid_t * a_top[k - 1]));
      grid.f(j - 1, static_cast<Eigen::Index>(it)) =
          trace_prod(rho, chain) * stat_phase;

      // C = < |[a_j(t), a_k(0)]_theta|^2 >
      const Mat commutator =
          aj_mid_t * a_top[k - 1] -
          std::exp(cd(0.0, params.theta * sign_of(j, k))) * a_mid[k - 1] *
              aj_top_t;
      const cd c = trace_prod(rho, Mat(commutator.adjoint() * commutator));
      grid.commutator(j - 1, static_cast<Eigen::Index>(it)) = c.real();
      if (std::abs(c.imag()) > 1e-6 * std::max(1.0, std::abs(c.real())))
        grid.conditioning_warning = true;
    }
  }
  return grid;
}

OtocGrid state_otoc(const ModelParams& params, const Vec& psi0, int source,
                    const std::vector<double>& times,
                    HeisenbergConvention convention) {
  params.validate();
  check_source(params, source);

  const int L = params.sites;
  const int N = params.particles;
  const int k = source;
  const SectorOps top(params, N), mid(params, N - 1), low(params, N - 2);
  if (psi0.size() != top.dim())
    throw std::invalid_argument("state_otoc: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("state_otoc: state must be normalized");

  std::vector<Mat> a_top(L), a_mid(L);
  for (int j = 1; j <= L; ++j) {
    a_top[j - 1] =
        anyon_annihilation(top.basis, mid.basis, j, params.theta).dense();
    a_mid[j - 1] =
        anyon_annihilation(mid.basis, low.basis, j, params.theta).dense();
  }

  OtocGrid grid;
  grid.times = times;
  grid.source = k;
  grid.f.resize(L, static_cast<Eigen::Index>(times.size()));
  grid.commutator.resize(L, static_cast<Eigen::Index>(times.size()));

  const bool adjoint = convention == HeisenbergConvention::adjoint;
  // Left factor of the evolved operator: e^{+iH†t} (adjoint convention) or
  // e^{+iHt} (similarity convention).
  const auto left_apply = [&](const SectorOps& sector, const Vec& v,
                              double t) {
    return adjoint ? sector.forward_adjoint(v, t) : sector.backward(v, t);
  };
  // Its Hermitian conjugate, needed on the dagger legs of the chain.
  const auto left_apply_dag = [&](const SectorOps& sector, const Vec& v,
                                  double t) {
    return adjoint ? sector.forward(v, t) : sector.forward_adjoint(v, -t);
  };

  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    const Vec w_k = a_top[k - 1] * psi0;       // a_k(0) |psi0>, sector N-1
    const Vec w_k_t = mid.forward(w_k, t);
    const Vec bra_top = top.forward(psi0, t);  // e^{-iHt}|psi0>

    for (int j = 1; j <= L; ++j) {
      const cd stat_phase =
          std::exp(cd(0.0, -params.theta * sign_of(j, k)));

      // a_j(t) a_k(0) |psi0>, sector N-2
      const Vec path1 = left_apply(low, Vec(a_mid[j - 1] * w_k_t), t);
      // a_k(0) a_j(t) |psi0>, sector N-2
      const Vec aj_psi =
          left_apply(mid, Vec(a_top[j - 1] * bra_top), t);
      const Vec path2 = a_mid[k - 1] * aj_psi;

      // C for a pure state is a plain squared norm.
      const Vec commutator =
          path1 -
          std::exp(cd(0.0, params.theta * sign_of(j, k))) * path2;
      grid.commutator(j - 1, static_cast<Eigen::Index>(it)) =
          commutator.squaredNorm();

      // F: climb back to the N sector along the dagger legs.
      const Vec u1 = a_mid[k - 1].adjoint() * path1;      // sector N-1
      const Vec u2 = left_apply_dag(mid, u1, t);
      const Vec u3 = a_top[j - 1].adjoint() * u2;         // sector N
      grid.f(j - 1, static_cast<Eigen::Index>(it)) =
          (bra_top.adjoint() * u3)(0) * stat_phase;
    }
  }
  return grid;
}

}  // namespace nhanyon
