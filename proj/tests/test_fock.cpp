#include <doctest.h>

#include <random>

#include "nhanyon/fock.hpp"

using namespace nhanyon;

namespace {

// Exchange phase consistent with the string e^{-i theta sum_{k<j} n_k}:
// a_j a_k = e^{+i theta sgn(j-k)} a_k a_j.
Mat commutator_theta(const Mat& a_jk, const Mat& a_kj, double theta,
                     int j, int k) {
  const double sgn = j > k ? 1.0 : (j < k ? -1.0 : 0.0);
  return a_jk - std::exp(cd(0.0, theta * sgn)) * a_kj;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("sector counts") {
  CHECK(sector_dimension(3, 2, 2) == 6);      // stars and bars C(4,2)
  CHECK(sector_dimension(30, 2, 2) == 465);   // C(31,2)
  CHECK(sector_dimension(4, 2, 1) == 6);      // hardcore subsets C(4,2)
  CHECK(sector_dimension(5, 0, 1) == 1);      // vacuum
  CHECK(FockBasis(3, 2, 2).dim() == 6);
  CHECK(FockBasis(30, 2, 2).dim() == 465);
  CHECK_THROWS_AS(FockBasis(3, 4, 1), std::invalid_argument);
}

TEST_CASE("rank/unrank bijection") {
  for (const auto& [L, N, cap] :
       {std::tuple{3, 2, 2}, std::tuple{5, 3, 3}, std::tuple{6, 2, 1},
        std::tuple{4, 4, 2}}) {
    const FockBasis basis(L, N, cap);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
      CHECK(basis.rank(basis.state(i)) == i);
      int total = 0;
      for (const auto n : basis.state(i)) total += n;
      CHECK(total == N);
    }
    // Lexicographic: consecutive states strictly increase.
    for (std::size_t i = 0; i + 1 < basis.dim(); ++i) {
      const auto a = basis.state(i);
      const auto b = basis.state(i + 1);
      CHECK(std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                         b.end()));
    }
  }
}

TEST_CASE("annihilation matrix elements") {
  const FockBasis from(3, 2, 2), to(3, 1, 2);
  const OperatorMatrix b1 = annihilation_matrix(from, to, 1);

  // b_1 kills amplitudes with nothing on site 1.
  const Vec empty_site = fock_state(from, std::vector<int>{0, 1, 1});
  CHECK((b1.mat * empty_site).norm() == 0.0);

  // b_1 |2,0,0> = sqrt(2) |1,0,0>
  const Vec doubly = fock_state(from, std::vector<int>{2, 0, 0});
  const Vec lowered = b1.mat * doubly;
  const Vec expected =
      std::sqrt(2.0) * fock_state(to, std::vector<int>{1, 0, 0});
  CHECK((lowered - expected).norm() == doctest::Approx(0.0));

  // b†_j b_j is diagonal with the site occupation.
  for (int j = 1; j <= 3; ++j) {
    const OperatorMatrix bj = annihilation_matrix(from, to, j);
    const Mat nj = Mat(bj.mat.adjoint()) * Mat(bj.mat);
    for (std::size_t s = 0; s < from.dim(); ++s) {
      CHECK(nj(s, s).real() == doctest::Approx(from.state(s)[j - 1]));
      CHECK(std::abs(nj(s, s).imag()) < 1e-15);
    }
    const Mat direct = number_matrix(from, j).dense();
    CHECK((nj - direct).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("creation is the adjoint of annihilation built independently") {
  const FockBasis lower(4, 1, 3), upper(4, 2, 3);
  for (int j = 1; j <= 4; ++j) {
    // Direct sqrt(n+1) rule, written out independently of creation_matrix.
    Mat direct = Mat::Zero(upper.dim(), lower.dim());
    for (std::size_t s = 0; s < lower.dim(); ++s) {
      std::vector<int> occ(lower.state(s).begin(), lower.state(s).end());
      if (occ[j - 1] + 1 > upper.cap()) continue;
      occ[j - 1] += 1;
      direct(static_cast<Eigen::Index>(upper.rank(occ)),
             static_cast<Eigen::Index>(s)) = std::sqrt(occ[j - 1]);
    }
    const Mat lib = creation_matrix(lower, upper, j).dense();
    CHECK((lib - direct).cwiseAbs().maxCoeff() < 1e-14);
    const Mat adj = annihilation_matrix(upper, lower, j).dense().adjoint();
    CHECK((lib - adj).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("string phases") {
  const FockBasis basis(3, 2, 2);
  const double theta = 0.7;

  // Site 1 carries an empty string.
  const Mat s1 = string_phase_matrix(basis, 1, theta).dense();
  CHECK((s1 - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);

  // |1,1,0>, j=3: two particles to the left.
  const Mat s3 = string_phase_matrix(basis, 3, theta).dense();
  const auto idx = basis.rank(std::vector<int>{1, 1, 0});
  CHECK(std::abs(s3(idx, idx) - std::exp(cd(0.0, -2.0 * theta))) < 1e-15);

  // theta = 0 is the identity for every site.
  for (int j = 1; j <= 3; ++j) {
    const Mat s = string_phase_matrix(basis, j, 0.0).dense();
    CHECK((s - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("anyon operators reduce to bosons at theta=0") {
  const FockBasis from(4, 2, 2), to(4, 1, 2);
  for (int j = 1; j <= 4; ++j) {
    const Mat a = anyon_annihilation(from, to, j, 0.0).dense();
    const Mat b = annihilation_matrix(from, to, j).dense();
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("generalized commutation relations hold as matrix identities") {
  // [a_j, a_k]_theta = 0 evaluated on the N=2 sector of L=4.
  std::mt19937 rng(20240511);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  const FockBasis top(4, 2, 3), mid(4, 1, 3), low(4, 0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = angle(rng);
    const int j = 1 + static_cast<int>(rng() % 4);
    const int k = 1 + static_cast<int>(rng() % 4);
    const Mat aj_mid = anyon_annihilation(mid, low, j, theta).dense();
    const Mat ak_mid = anyon_annihilation(mid, low, k, theta).dense();
    const Mat aj_top = anyon_annihilation(top, mid, j, theta).dense();
    const Mat ak_top = anyon_annihilation(top, mid, k, theta).dense();
    const Mat comm = commutator_theta(Mat(aj_mid * ak_top),
                                      Mat(ak_mid * aj_top), theta, j, k);
    CHECK(comm.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("mixed commutator gives a Kronecker delta") {
  // [a_j, a†_k]_{-theta} = delta_jk on the N=2 sector of L=4 (cap covers the
  // intermediate N=3 states exactly).
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> angle(-3.14, 3.14);
  const FockBasis upper(4, 3, 3), sector(4, 2, 3), lower(4, 1, 3);
  for (int trial = 0; trial < 12; ++trial) {
    const double theta = angle(rng);
    for (int j = 1; j <= 4; ++j)
      for (int k = 1; k <= 4; ++k) {
        const Mat aj_up = anyon_annihilation(upper, sector, j, theta).dense();
        const Mat ak_up = anyon_annihilation(upper, sector, k, theta).dense();
        const Mat aj = anyon_annihilation(sector, lower, j, theta).dense();
        const Mat ak = anyon_annihilation(sector, lower, k, theta).dense();
        const double sgn = j > k ? 1.0 : (j < k ? -1.0 : 0.0);
        const Mat lhs = aj_up * ak_up.adjoint() -
                        std::exp(cd(0.0, -theta * sgn)) * ak.adjoint() * aj;
        const Mat expected = j == k
                                 ? Mat(Mat::Identity(sector.dim(), sector.dim()))
                                 : Mat(Mat::Zero(sector.dim(), sector.dim()));
        CHECK((lhs - expected).cwiseAbs().maxCoeff() < 1e-13);
      }
  }
}

}  // TEST_SUITE
