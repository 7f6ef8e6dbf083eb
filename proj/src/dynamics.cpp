#include "nhanyon/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace nhanyon {

namespace {

constexpr double kUnitNormTol = 1e-8;

void check_unit_norm(const Vec& psi) {
  if (std::abs(psi.norm() - 1.0) > kUnitNormTol)
    throw std::invalid_argument("propagate: initial state must be normalized");
}

Eigen::VectorXd state_density(const Vec& psi, const FockBasis& basis) {
  Eigen::VectorXd density = Eigen::VectorXd::Zero(basis.sites());
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    const double w = std::norm(psi(s));
    if (w == 0.0) continue;
    const auto occ = basis.state(static_cast<std::size_t>(s));
    for (int j = 0; j < basis.sites(); ++j) density(j) += w * occ[j];
  }
  return density;
}

}  // namespace

DensePropagator::DensePropagator(const Mat& hamiltonian)
    : hamiltonian_(hamiltonian),
      spectrum_(eigendecompose(hamiltonian)),
      lu_(spectrum_.right) {
  // Probe whether V diag(lambda) V^{-1} reproduces H well enough; a nearly
  // defective eigenbasis silently loses digits otherwise.
  const Eigen::Index n = hamiltonian_.rows();
  const double scale = std::max(1.0, hamiltonian_.cwiseAbs().maxCoeff());
  Vec probe = Vec::Zero(n);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < std::min<Eigen::Index>(3, n); ++k) {
    const Eigen::Index idx = (k * 7919) % n;
    probe.setZero();
    probe(idx) = 1.0;
    const Vec reconstructed =
        spectrum_.right *
        (spectrum_.values.array() * lu_.solve(probe).array()).matrix();
    worst = std::max(worst,
                     (reconstructed - hamiltonian_.col(idx)).cwiseAbs()
                         .maxCoeff());
  }
  spectral_ok_ = worst < 1e-8 * scale && !spectrum_.near_defective;
}

Vec DensePropagator::apply(const Vec& psi, double t,
                           double* log_norm_out) const {
  if (psi.size() != hamiltonian_.rows())
    throw std::invalid_argument("DensePropagator: state dimension mismatch");

  Vec raw;
  double shift = 0.0;
  if (spectral_ok_) {
    // e^{-iHt} psi = V e^{-i lambda t} V^{-1} psi, peeled by the largest
    // growth exponent so nothing overflows.
    shift = t >= 0.0 ? t * spectrum_.values.imag().maxCoeff()
                     : t * spectrum_.values.imag().minCoeff();
    const Vec coeff = lu_.solve(psi);
    Vec scaled(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      scaled(i) = std::exp(cd(0.0, -t) * spectrum_.values(i) - shift) *
                  coeff(i);
    raw = spectrum_.right * scaled;
  } else {
    const Mat expm = (cd(0.0, -t) * hamiltonian_).exp();
    raw = expm * psi;
  }

  if (log_norm_out) {
    const double norm = raw.norm();
    if (norm == 0.0)
      throw std::runtime_error("DensePropagator: state norm underflow");
    *log_norm_out = shift + std::log(norm);
    return raw / norm;
  }
  return std::exp(shift) * raw;
}

KrylovPropagator::KrylovPropagator(SpMat hamiltonian, int subspace, double tol)
    : hamiltonian_(std::move(hamiltonian)), subspace_(subspace), tol_(tol) {
  if (hamiltonian_.rows() != hamiltonian_.cols())
    throw std::invalid_argument("KrylovPropagator: matrix must be square");
  double norm = 0.0;
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(hamiltonian_.rows());
  for (int k = 0; k < hamiltonian_.outerSize(); ++k)
    for (SpMat::InnerIterator it(hamiltonian_, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  if (row_sums.size() > 0) norm = row_sums.maxCoeff();
  norm_estimate_ = std::max(norm, 1e-300);
}

Vec KrylovPropagator::apply(const Vec& psi, double t,
                            double* log_norm_out) const {
  const Eigen::Index n = hamiltonian_.rows();
  if (psi.size() != n)
    throw std::invalid_argument("KrylovPropagator: state dimension mismatch");
  if (t < 0.0) throw std::invalid_argument("KrylovPropagator: negative time");

  double log_norm = 0.0;
  Vec w = psi;
  if (t > 0.0) {
    const int m_max = static_cast<int>(std::min<Eigen::Index>(subspace_, n));
    Mat basis(n, m_max + 1);
    Mat hess = Mat::Zero(m_max + 1, m_max);

    double remaining = t;
    double step = t;
    while (remaining > 1e-14 * t) {
      const double beta = w.norm();
      if (!(beta > 0.0))
        throw std::runtime_error("KrylovPropagator: state norm underflow");
      log_norm += std::log(beta);
      w /= beta;

      // Arnoldi with one reorthogonalization pass; non-normal H needs it.
      basis.col(0) = w;
      hess.setZero();
      int m = m_max;
      bool invariant = false;
      for (int k = 0; k < m_max; ++k) {
        Vec u = hamiltonian_ * basis.col(k);
        for (int j = 0; j <= k; ++j) {
          const cd h = basis.col(j).dot(u);
          hess(j, k) = h;
          u -= h * basis.col(j);
        }
        for (int j = 0; j <= k; ++j) {
          const cd c = basis.col(j).dot(u);
          hess(j, k) += c;
          u -= c * basis.col(j);
        }
        const double h_next = u.norm();
        hess(k + 1, k) = h_next;
        if (h_next < 1e-14 * norm_estimate_) {
          m = k + 1;
          invariant = true;
          break;
        }
        basis.col(k + 1) = u / h_next;
      }

      double tau = std::min(step, remaining);
      Mat f;
      if (invariant) {
        tau = remaining;
        f = (cd(0.0, -tau) * hess.topLeftCorner(m, m)).exp();
      } else {
        int halvings = 0;
        for (;; ++halvings) {
          f = (cd(0.0, -tau) * hess.topLeftCorner(m, m)).exp();
          const double err =
              std::abs(hess(m, m - 1)) * std::abs(f(m - 1, 0)) * tau;
          if (err < tol_) break;
          if (halvings > 60)
            throw std::runtime_error(
                "KrylovPropagator: residual stalled at " +
                std::to_string(err));
          tau *= 0.5;
        }
        if (halvings == 0) step = std::min(tau * 1.5, t);
      }

      w = basis.leftCols(m) * f.col(0);
      remaining -= tau;
    }
  }

  const double norm = w.norm();
  if (!(norm > 0.0))
    throw std::runtime_error("KrylovPropagator: state norm underflow");
  log_norm += std::log(norm);
  if (log_norm_out) {
    *log_norm_out = log_norm;
    return w / norm;
  }
  return std::exp(log_norm) * (w / norm);
}

EvolvedState propagate(const OperatorMatrix& hamiltonian, const Vec& psi0,
                       double t, PropagationMethod method) {
  if (!hamiltonian.square())
    throw std::invalid_argument("propagate: Hamiltonian is cross-sector");
  if (t < 0.0) throw std::invalid_argument("propagate: negative time");
  check_unit_norm(psi0);

  EvolvedState out;
  out.time = t;
  if (method == PropagationMethod::dense) {
    DensePropagator prop(hamiltonian.dense());
    out.amplitudes = prop.apply(psi0, t, &out.log_norm);
  } else {
    KrylovPropagator prop(hamiltonian.mat);
    out.amplitudes = prop.apply(psi0, t, &out.log_norm);
  }
  return out;
}

Vec uniform_center_state(const FockBasis& basis, std::optional<int> offset) {
  const int L = basis.sites();
  const int N = basis.particles();
  if (N > L)
    throw std::invalid_argument(
        "uniform_center_state: more particles than sites");
  int start;  // 1-based position of the first occupied site
  if (offset) {
    start = *offset;
  } else {
    if ((L - N) % 2 != 0)
      throw std::invalid_argument(
          "uniform_center_state: centering ambiguous for odd L-N; pass an "
          "explicit offset");
    start = (L - N) / 2 + 1;
  }
  if (start < 1 || start + N - 1 > L)
    throw std::invalid_argument("uniform_center_state: block out of range");

  std::vector<int> occ(L, 0);
  for (int j = start - 1; j < start - 1 + N; ++j) occ[j] = 1;
  return fock_state(basis, occ);
}

TimeSeries density_series(const ModelParams& params, const FockBasis& basis,
                          const Vec& psi0, double t_max, double dt,
                          PropagationMethod method) {
  if (dt <= 0.0) throw std::invalid_argument("density_series: dt must be > 0");
  if (t_max < 0.0) throw std::invalid_argument("density_series: t_max < 0");
  check_unit_norm(psi0);

  const OperatorMatrix h = build_hamiltonian(params, basis);
  const int n_steps = static_cast<int>(std::floor(t_max / dt + 1e-9));

  TimeSeries series;
  series.params = params;
  series.times.reserve(n_steps + 1);
  series.density.resize(n_steps + 1, basis.sites());

  if (method == PropagationMethod::dense) {
    DensePropagator prop(h.dense());
    for (int k = 0; k <= n_steps; ++k) {
      const double t = k * dt;
      double log_norm = 0.0;
      const Vec psi = k == 0 ? psi0 : prop.apply(psi0, t, &log_norm);
      series.times.push_back(t);
      series.density.row(k) = state_density(psi, basis);
    }
  } else {
    KrylovPropagator prop(h.mat);
    Vec psi = psi0;
    for (int k = 0; k <= n_steps; ++k) {
      if (k > 0) {
        double log_norm = 0.0;
        psi = prop.apply(psi, dt, &log_norm);
      }
      series.times.push_back(k * dt);
      series.density.row(k) = state_density(psi, basis);
    }
  }
  return series;
}

std::vector<double> imbalance(const TimeSeries& series, bool exclude_center) {
  const int L = static_cast<int>(series.density.cols());
  if (L % 2 != 0 && !exclude_center)
    throw std::invalid_argument(
        "imbalance: odd chain length needs the center-exclusion convention");

  const int half = L / 2;  // sites per half; odd L skips the middle site
  const int right_start = L % 2 == 0 ? half : half + 1;
  std::vector<double> out;
  out.reserve(series.times.size());
  for (Eigen::Index k = 0; k < series.density.rows(); ++k) {
    double dn = 0.0;
    for (int i = 0; i < half; ++i)
      dn += series.density(k, right_start + i) - series.density(k, i);
    out.push_back(dn);
  }
  return out;
}

ReversedInterval reversed_interval(const std::vector<double>& imbalance,
                                   double dt, double slope_eps,
                                   int smooth_window) {
  if (dt <= 0.0)
    throw std::invalid_argument("reversed_interval: dt must be > 0");
  const int n = static_cast<int>(imbalance.size());
  ReversedInterval out;
  if (n < 3) return out;

  std::vector<double> y = imbalance;
  if (smooth_window > 0) {
    std::vector<double> smooth(n);
    for (int k = 0; k < n; ++k) {
      const int lo = std::max(0, k - smooth_window);
      const int hi = std::min(n - 1, k + smooth_window);
      double acc = 0.0;
      for (int i = lo; i <= hi; ++i) acc += y[i];
      smooth[k] = acc / (hi - lo + 1);
    }
    y.swap(smooth);
  }

  double run = 0.0;
  for (int k = 1; k + 1 < n; ++k) {
    const double slope = (y[k + 1] - y[k - 1]) / (2.0 * dt);
    if (slope < -slope_eps) {
      out.total += dt;
      run += dt;
      out.longest = std::max(out.longest, run);
    } else {
      run = 0.0;
    }
  }
  return out;
}

Eigen::MatrixXd density_correlation(const Vec& psi, const FockBasis& basis) {
  if (psi.size() != static_cast<Eigen::Index>(basis.dim()))
    throw std::invalid_argument("density_correlation: dimension mismatch");
  const int L = basis.sites();
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(L, L);
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    const double w = std::norm(psi(s));
    if (w == 0.0) continue;
    const auto occ = basis.state(static_cast<std::size_t>(s));
    for (int q = 0; q < L; ++q) {
      if (occ[q] == 0) continue;
      for (int r = 0; r < L; ++r)
        gamma(q, r) += w * occ[q] * occ[r];
    }
  }
  return gamma;
}

TransitionAmplitudes transition_asymmetry(const Vec& psi0, const Vec& psi1,
                                          const OperatorMatrix& hamiltonian,
                                          const FockBasis& basis, double t) {
  if (!hamiltonian.square())
    throw std::invalid_argument("transition_asymmetry: cross-sector H");
  check_unit_norm(psi0);

  // Mirror of a state under site inversion occ -> reversed(occ).
  const auto mirrored = [&basis](const Vec& v) {
    Vec out(v.size());
    std::vector<std::uint8_t> rev(basis.sites());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      const auto occ = basis.state(static_cast<std::size_t>(s));
      std::reverse_copy(occ.begin(), occ.end(), rev.begin());
      out(static_cast<Eigen::Index>(basis.rank(rev))) = v(s);
    }
    return out;
  };

  const Vec psi0_mirror = mirrored(psi0);
  // psi0 must be inversion symmetric up to a global phase.
  cd phase(0.0, 0.0);
  for (Eigen::Index s = 0; s < psi0.size(); ++s)
    if (std::abs(psi0(s)) > 1e-12) {
      phase = psi0_mirror(s) / psi0(s);
      break;
    }
  if (std::abs(std::abs(phase) - 1.0) > 1e-10 ||
      (psi0_mirror - phase * psi0).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(
        "transition_asymmetry: initial state is not inversion symmetric");

  DensePropagator prop(hamiltonian.dense());
  const Vec evolved = prop.apply(psi0, t);
  TransitionAmplitudes out;
  out.direct = std::abs((psi1.adjoint() * evolved)(0));
  out.mirrored = std::abs((mirrored(psi1).adjoint() * evolved)(0));
  return out;
}

}  // namespace nhanyon
