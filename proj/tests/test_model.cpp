#include <doctest.h>

#include <map>
#include <numbers>

#include "nhanyon/model.hpp"
#include "nhanyon/spectra.hpp"

using namespace nhanyon;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent reference: plain Bose-Hubbard matrix assembled from its own
// state enumeration, no phase factors (theta = 0), open boundaries.
Mat reference_bose_hubbard(int L, int N, double jl, double jr, double u) {
  std::vector<std::vector<int>> states;
  std::vector<int> occ(L, 0);
  const std::function<void(int, int)> emit = [&](int site, int left) {
    if (site == L) {
      if (left == 0) states.push_back(occ);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      occ[site] = v;
      emit(site + 1, left - v);
    }
    occ[site] = 0;
  };
  emit(0, N);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < states.size(); ++i)
    index[states[i]] = static_cast<int>(i);

  Mat h = Mat::Zero(states.size(), states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto& st = states[s];
    double diag = 0.0;
    for (int j = 0; j < L; ++j) diag += 0.5 * u * st[j] * (st[j] - 1.0);
    h(s, s) = diag;
    for (int j = 0; j + 1 < L; ++j) {
      if (st[j + 1] > 0) {  // move one particle j+1 -> j
        auto t = st;
        --t[j + 1];
        ++t[j];
        h(index[t], s) += -jl * std::sqrt(st[j + 1] * (st[j] + 1.0));
      }
      if (st[j] > 0) {  // move one particle j -> j+1
        auto t = st;
        --t[j];
        ++t[j + 1];
        h(index[t], s) += -jr * std::sqrt(st[j] * (st[j + 1] + 1.0));
      }
    }
  }
  return h;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("single particle is a tridiagonal hopping matrix") {
  ModelParams p;
  p.sites = 5;
  p.particles = 1;
  p.hop_left = 0.7;
  p.hop_right = 1.4;
  p.theta = 1.1;  // must not matter for one particle
  p.onsite_u = 3.0;
  const Mat h = build_hamiltonian(p).dense();
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      // Basis order for N=1 is site L occupied first (ascending lex), so the
      // matrix indices run opposite to the site indices.
      const int site_r = 5 - r, site_c = 5 - c;
      const cd v = h(r, c);
      if (site_r + 1 == site_c)
        CHECK(std::abs(v - cd(-0.7)) < 1e-15);  // J_L moves right site left
      else if (site_r == site_c + 1)
        CHECK(std::abs(v - cd(-1.4)) < 1e-15);
      else
        CHECK(std::abs(v) < 1e-15);
    }
}

TEST_CASE("theta=0 reproduces an independently built Bose-Hubbard matrix") {
  ModelParams p;
  p.sites = 3;
  p.particles = 2;
  p.hop_left = 1.0;
  p.hop_right = 1.0;
  p.theta = 0.0;
  p.onsite_u = 0.0;
  const Mat h = build_hamiltonian(p).dense();
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);

  const Mat ref = reference_bose_hubbard(3, 2, 1.0, 1.0, 0.0);
  const Spectrum ours = eigendecompose(build_hamiltonian(p));
  Eigen::SelfAdjointEigenSolver<Mat> solver(ref);
  for (Eigen::Index i = 0; i < 6; ++i) {
    CHECK(ours.values(i).real() ==
          doctest::Approx(solver.eigenvalues()(i)).epsilon(1e-10));
    CHECK(std::abs(ours.values(i).imag()) < 1e-12);
  }

  // Also elementwise, mapped through the occupation labels.
  SUBCASE("elementwise equality with interactions and asymmetry") {
    ModelParams q = ModelParams::asymmetric(4, 3, 0.2, 0.0, 2.5);
    const FockBasis basis = q.basis();
    const Mat ham = build_hamiltonian(q, basis).dense();
    const Mat reference =
        reference_bose_hubbard(4, 3, q.hop_left, q.hop_right, 2.5);
    // The reference enumerates states in its own (ascending map) order; both
    // orders are lexicographic over occupations, so they agree.
    CHECK((ham - reference).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("hermitian limit and sector closure") {
  for (double theta : {0.0, -kPi / 2, 0.9}) {
    ModelParams p = ModelParams::asymmetric(5, 2, 0.0, theta, 3.0);
    const Mat h = build_hamiltonian(p).dense();
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  }
  // Total number operator commutes with H.
  ModelParams p = ModelParams::asymmetric(5, 2, 0.3, 0.7, 2.0);
  const FockBasis basis = p.basis();
  const Mat h = build_hamiltonian(p, basis).dense();
  Mat total = Mat::Zero(basis.dim(), basis.dim());
  for (int j = 1; j <= 5; ++j) total += number_matrix(basis, j).dense();
  CHECK((h * total - total * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("twist periodicity and boundary errors") {
  ModelParams p = ModelParams::asymmetric(6, 2, 0.1, -kPi / 2, 4.0,
                                          Boundary::periodic);
  const FockBasis basis = p.basis();
  ModelParams p0 = p, p2 = p;
  p0.twist = 0.0;
  p2.twist = 2.0 * kPi;
  const Mat h0 = build_hamiltonian(p0, basis).dense();
  const Mat h2 = build_hamiltonian(p2, basis).dense();
  CHECK((h0 - h2).cwiseAbs().maxCoeff() < 1e-14);

  ModelParams bad = p;
  bad.sites = 2;
  bad.particles = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ModelParams obc_twist = ModelParams::asymmetric(5, 1, 0.1, 0.0, 0.0);
  obc_twist.twist = 0.3;
  CHECK_THROWS_AS(obc_twist.validate(), std::invalid_argument);
}

TEST_CASE("gauge similarity") {
  SUBCASE("alpha=0 gives the identity") {
    ModelParams p = ModelParams::asymmetric(4, 2, 0.0, 0.3, 1.0);
    const FockBasis basis = p.basis();
    const GaugeSimilarity g = gauge_similarity(p, basis);
    CHECK((g.diag.array() - 1.0).abs().maxCoeff() == 0.0);
    CHECK(!g.conditioning_warning);
  }

  SUBCASE("single particle entries follow e^{-alpha l}") {
    ModelParams p = ModelParams::asymmetric(3, 1, 0.1, 0.0, 0.0);
    const FockBasis basis = p.basis();
    const GaugeSimilarity g = gauge_similarity(p, basis);
    // Up to overall normalization the entry at site l is e^{-0.1 l}.
    const auto at_site = [&](int site) {
      std::vector<int> occ(3, 0);
      occ[site - 1] = 1;
      return g.diag(static_cast<Eigen::Index>(basis.rank(occ)));
    };
    CHECK(at_site(1) / at_site(2) == doctest::Approx(std::exp(0.1)));
    CHECK(at_site(2) / at_site(3) == doctest::Approx(std::exp(0.1)));
  }

  SUBCASE("conditioning warning fires for extreme spans") {
    ModelParams p = ModelParams::asymmetric(10, 2, 0.5, 0.0, 0.0);
    const GaugeSimilarity g = gauge_similarity(p, p.basis());
    CHECK(g.conditioning_warning);
  }
}

TEST_CASE("hermitized transform") {
  ModelParams p = ModelParams::asymmetric(20, 2, 0.1, -kPi / 2, 4.0);
  const FockBasis basis = p.basis();
  GaugeSimilarity info;
  const Mat herm = hermitized(p, basis, &info).dense();
  CHECK((herm - herm.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(!info.conditioning_warning);

  SUBCASE("alpha=0 returns the Hamiltonian itself") {
    ModelParams q = ModelParams::asymmetric(6, 2, 0.0, 0.4, 2.0);
    const FockBasis b = q.basis();
    const Mat h = build_hamiltonian(q, b).dense();
    const Mat t = hermitized(q, b).dense();
    CHECK((h - t).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("spectrum preserved under the similarity") {
    const Spectrum direct = eigendecompose(build_hamiltonian(p, basis));
    const Spectrum transformed = eigendecompose({herm.sparseView(),
                                                 basis.key(), basis.key()});
    for (Eigen::Index i = 0; i < direct.values.size(); ++i)
      CHECK(std::abs(direct.values(i) - transformed.values(i)) < 1e-8);
  }

  SUBCASE("entry magnitudes do not depend on theta") {
    ModelParams q = p;
    q.theta = 0.0;
    const Mat herm0 = hermitized(q, basis).dense();
    CHECK((herm.cwiseAbs() - herm0.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

}  // TEST_SUITE
