#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nhanyon {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<std::complex<double>>;

/// Identifies the fixed-number sector a state vector or operator acts on.
struct SectorKey {
  int sites = 0;
  int particles = 0;
  int cap = 0;
  bool operator==(const SectorKey&) const = default;
};

/// Number of occupation states of `particles` bosons on `sites` sites with at
/// most `cap` per site. Throws when the count does not fit the return type.
std::size_t sector_dimension(int sites, int particles, int cap);

/// Same count evaluated in floating point; never throws. Used for resource
/// estimates before any allocation happens.
double sector_dimension_estimate(int sites, int particles, int cap);

/// Fixed-N bosonic occupation basis with a per-site occupation cap.
///
/// States are ordered lexicographically over occupation vectors (site 1 most
/// significant). rank/unrank use a precomputed composition-count table and
/// run in O(L*cap); rank(state(i)) == i for every i.
class FockBasis {
 public:
  FockBasis(int sites, int particles, int cap);

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  int cap() const { return cap_; }
  std::size_t dim() const { return dim_; }
  SectorKey key() const { return {sites_, particles_, cap_}; }

  /// Occupation vector of basis state i, one entry per site.
  std::span<const std::uint8_t> state(std::size_t i) const {
    return {occ_.data() + i * static_cast<std::size_t>(sites_),
            static_cast<std::size_t>(sites_)};
  }

  std::size_t rank(std::span<const std::uint8_t> occ) const;
  std::size_t rank(std::span<const int> occ) const;

 private:
  // count_[s][n]: fillings of the last s sites with n particles.
  std::size_t count(int s, int n) const {
    return count_[static_cast<std::size_t>(s) * (particles_ + 1) + n];
  }

  int sites_;
  int particles_;
  int cap_;
  std::size_t dim_;
  std::vector<std::size_t> count_;
  std::vector<std::uint8_t> occ_;  // dim * sites, row-major
};

/// Complex sparse matrix tagged with the sectors it maps between.
struct OperatorMatrix {
  SpMat mat;
  SectorKey rows;
  SectorKey cols;

  bool square() const { return rows == cols; }
  Eigen::Index dim_rows() const { return mat.rows(); }
  Eigen::Index dim_cols() const { return mat.cols(); }
  Mat dense() const { return Mat(mat); }
};

/// <.., n_j - 1, ..| b_j |.., n_j, ..> = sqrt(n_j). Maps the N-particle
/// sector `from` into the (N-1)-particle sector `to`; all other elements
/// vanish. `site` is 1-based.
OperatorMatrix annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                   int site);

/// Adjoint counterpart, <.., n_j + 1, ..| b†_j |.., n_j, ..> = sqrt(n_j + 1),
/// from the N-particle sector into the (N+1)-particle sector.
OperatorMatrix creation_matrix(const FockBasis& from, const FockBasis& to,
                               int site);

/// Diagonal number operator b†_j b_j within one sector.
OperatorMatrix number_matrix(const FockBasis& basis, int site);

/// Diagonal string phase exp(-i theta sum_{k<j} n_k). Identity for site 1.
OperatorMatrix string_phase_matrix(const FockBasis& basis, int site,
                                   double theta);

/// Anyonic annihilation a_j = b_j exp(-i theta sum_{k<j} n_k), evaluated in
/// the bosonic occupation basis.
OperatorMatrix anyon_annihilation(const FockBasis& from, const FockBasis& to,
                                  int site, double theta);

/// Unit basis vector for an explicit occupation pattern.
Vec fock_state(const FockBasis& basis, std::span<const int> occ);

}  // namespace nhanyon
