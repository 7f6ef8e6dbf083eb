#include "nhanyon/fock.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nhanyon {

namespace {

void check_sector_args(int sites, int particles, int cap) {
  if (sites < 1) throw std::invalid_argument("sector: need at least one site");
  if (cap < 1) throw std::invalid_argument("sector: cap must be positive");
  if (particles < 0)
    throw std::invalid_argument("sector: negative particle number");
  if (static_cast<long long>(sites) * cap < particles)
    throw std::invalid_argument(
        "sector: " + std::to_string(particles) + " particles do not fit " +
        std::to_string(sites) + " sites with cap " + std::to_string(cap));
}

void check_site(const FockBasis& basis, int site) {
  if (site < 1 || site > basis.sites())
    throw std::invalid_argument("site index " + std::to_string(site) +
                                " outside 1.." + std::to_string(basis.sites()));
}

void check_lowering_pair(const FockBasis& from, const FockBasis& to) {
  if (from.sites() != to.sites() || from.cap() != to.cap() ||
      from.particles() - 1 != to.particles())
    throw std::invalid_argument(
        "annihilation: target basis must be the same lattice with one "
        "particle fewer");
}

}  // namespace

double sector_dimension_estimate(int sites, int particles, int cap) {
  if (sites < 1 || cap < 1 || particles < 0) return 0.0;
  std::vector<double> row(particles + 1, 0.0);
  row[0] = 1.0;
  for (int s = 1; s <= sites; ++s) {
    for (int n = particles; n >= 1; --n) {
      double acc = 0.0;
      for (int v = 0; v <= std::min(cap, n); ++v) acc += row[n - v];
      row[n] = acc;
    }
  }
  return row[particles];
}

std::size_t sector_dimension(int sites, int particles, int cap) {
  check_sector_args(sites, particles, cap);
  const double estimate = sector_dimension_estimate(sites, particles, cap);
  if (estimate > 1e17)
    throw std::overflow_error("sector dimension exceeds integer range");
  std::vector<std::size_t> row(particles + 1, 0);
  row[0] = 1;
  for (int s = 1; s <= sites; ++s) {
    for (int n = particles; n >= 1; --n) {
      std::size_t acc = 0;
      for (int v = 0; v <= std::min(cap, n); ++v) acc += row[n - v];
      row[n] = acc;
    }
  }
  return row[particles];
}

FockBasis::FockBasis(int sites, int particles, int cap)
    : sites_(sites), particles_(particles), cap_(cap) {
  check_sector_args(sites, particles, cap);
  const double estimate = sector_dimension_estimate(sites, particles, cap);
  if (estimate > 3e7)
    throw std::invalid_argument("FockBasis: sector dimension " +
                                std::to_string(estimate) +
                                " too large for explicit enumeration");

  // count_[s][n]: fillings of s sites with n particles, cap per site.
  count_.assign(static_cast<std::size_t>(sites + 1) * (particles + 1), 0);
  count_[0] = 1;  // s = 0, n = 0
  for (int s = 1; s <= sites; ++s)
    for (int n = 0; n <= particles; ++n) {
      std::size_t acc = 0;
      for (int v = 0; v <= std::min(cap, n); ++v)
        acc += count_[static_cast<std::size_t>(s - 1) * (particles_ + 1) +
                      (n - v)];
      count_[static_cast<std::size_t>(s) * (particles_ + 1) + n] = acc;
    }
  dim_ = count(sites_, particles_);

  // Enumerate in ascending lexicographic order, site 1 most significant.
  occ_.resize(dim_ * static_cast<std::size_t>(sites_));
  std::vector<std::uint8_t> current(sites_, 0);
  std::size_t emitted = 0;
  // Iterative unrank of consecutive indices is as fast as recursion and
  // keeps rank/unrank trivially consistent.
  for (std::size_t i = 0; i < dim_; ++i) {
    std::size_t r = i;
    int rem = particles_;
    for (int j = 0; j < sites_; ++j) {
      int v = 0;
      for (;; ++v) {
        if (v > std::min(cap_, rem))
          throw std::logic_error("FockBasis: unrank walked out of range");
        const std::size_t block = count(sites_ - 1 - j, rem - v);
        if (r < block) break;
        r -= block;
      }
      current[j] = static_cast<std::uint8_t>(v);
      rem -= v;
    }
    std::copy(current.begin(), current.end(),
              occ_.begin() + emitted * static_cast<std::size_t>(sites_));
    ++emitted;
  }
}

std::size_t FockBasis::rank(std::span<const std::uint8_t> occ) const {
  if (static_cast<int>(occ.size()) != sites_)
    throw std::invalid_argument("rank: occupation length mismatch");
  std::size_t r = 0;
  int rem = particles_;
  for (int j = 0; j < sites_; ++j) {
    const int v = occ[j];
    if (v > cap_ || v > rem)
      throw std::invalid_argument("rank: occupation outside this sector");
    for (int u = 0; u < v; ++u) r += count(sites_ - 1 - j, rem - u);
    rem -= v;
  }
  if (rem != 0)
    throw std::invalid_argument("rank: total particle number mismatch");
  return r;
}

std::size_t FockBasis::rank(std::span<const int> occ) const {
  std::vector<std::uint8_t> tmp(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i] < 0 || occ[i] > 255)
      throw std::invalid_argument("rank: occupation out of range");
    tmp[i] = static_cast<std::uint8_t>(occ[i]);
  }
  return rank(std::span<const std::uint8_t>(tmp));
}

OperatorMatrix annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                   int site) {
  check_site(from, site);
  check_lowering_pair(from, to);
  const int j = site - 1;
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(from.dim());
  std::vector<std::uint8_t> target(from.sites());
  for (std::size_t s = 0; s < from.dim(); ++s) {
    const auto occ = from.state(s);
    if (occ[j] == 0) continue;
    std::copy(occ.begin(), occ.end(), target.begin());
    --target[j];
    const std::size_t t = to.rank(target);
    triplets.emplace_back(static_cast<int>(t), static_cast<int>(s),
                          std::sqrt(static_cast<double>(occ[j])));
  }
  SpMat mat(static_cast<Eigen::Index>(to.dim()),
            static_cast<Eigen::Index>(from.dim()));
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(mat), to.key(), from.key()};
}

OperatorMatrix creation_matrix(const FockBasis& from, const FockBasis& to,
                               int site) {
  // b† from N to N+1 is the adjoint of b from N+1 to N by the sqrt rule.
  OperatorMatrix lowering = annihilation_matrix(to, from, site);
  SpMat mat = lowering.mat.adjoint();
  return {std::move(mat), to.key(), from.key()};
}

OperatorMatrix number_matrix(const FockBasis& basis, int site) {
  check_site(basis, site);
  const int j = site - 1;
  SpMat mat(static_cast<Eigen::Index>(basis.dim()),
            static_cast<Eigen::Index>(basis.dim()));
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(basis.dim());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const double n = basis.state(s)[j];
    if (n != 0.0)
      triplets.emplace_back(static_cast<int>(s), static_cast<int>(s), n);
  }
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(mat), basis.key(), basis.key()};
}

OperatorMatrix string_phase_matrix(const FockBasis& basis, int site,
                                   double theta) {
  check_site(basis, site);
  const int j = site - 1;
  SpMat mat(static_cast<Eigen::Index>(basis.dim()),
            static_cast<Eigen::Index>(basis.dim()));
  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(basis.dim());
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const auto occ = basis.state(s);
    int left = 0;
    for (int k = 0; k < j; ++k) left += occ[k];
    triplets.emplace_back(static_cast<int>(s), static_cast<int>(s),
                          std::exp(cd(0.0, -theta * left)));
  }
  mat.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(mat), basis.key(), basis.key()};
}

OperatorMatrix anyon_annihilation(const FockBasis& from, const FockBasis& to,
                                  int site, double theta) {
  OperatorMatrix b = annihilation_matrix(from, to, site);
  OperatorMatrix phase = string_phase_matrix(from, site, theta);
  SpMat mat = b.mat * phase.mat;
  return {std::move(mat), to.key(), from.key()};
}

Vec fock_state(const FockBasis& basis, std::span<const int> occ) {
  Vec v = Vec::Zero(static_cast<Eigen::Index>(basis.dim()));
  v(static_cast<Eigen::Index>(basis.rank(occ))) = 1.0;
  return v;
}

}  // namespace nhanyon
