#include "spinline/fermionic.hpp"

#include <algorithm>

#include <Eigen/LU>

namespace spinline {

OccupationSet::OccupationSet(std::vector<std::size_t> sites) : sites_(std::move(sites)) {
  // Insertion sort so the permutation parity comes for free.
  int parity = 1;
  for (std::size_t i = 1; i < sites_.size(); ++i) {
    for (std::size_t j = i; j > 0 && sites_[j - 1] > sites_[j]; --j) {
      std::swap(sites_[j - 1], sites_[j]);
      parity = -parity;
    }
  }
  sign_ = std::adjacent_find(sites_.begin(), sites_.end()) == sites_.end() ? parity : 0;
}

bool OccupationSet::contains(std::size_t site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

namespace {

Complex lift_unchecked(const ComplexMatrix& u, const OccupationSet& from, const OccupationSet& to) {
  if (from.annihilated() || to.annihilated()) return 0.0;
  const auto k = static_cast<Eigen::Index>(from.size());
  if (k == 0) return 1.0;
  ComplexMatrix sub(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      sub(r, c) = u(static_cast<Eigen::Index>(to.sites()[static_cast<std::size_t>(r)]),
                    static_cast<Eigen::Index>(from.sites()[static_cast<std::size_t>(c)]));
    }
  }
  const double sign = static_cast<double>(from.sign() * to.sign());
  if (k == 1) return sign * sub(0, 0);
  return sign * sub.partialPivLu().determinant();
}

void check_sites(const ComplexMatrix& u, const OccupationSet& s) {
  for (std::size_t site : s.sites()) require(site < static_cast<std::size_t>(u.rows()), "occupied site out of range");
}

}  // namespace

Complex lift_amplitude(const ComplexMatrix& u, const OccupationSet& from, const OccupationSet& to) {
  require(u.rows() == u.cols(), "single-particle operator must be square");
  require(from.size() == to.size(), "occupation sets differ in size");
  const double defect = (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  require(u.rows() == 0 || defect <= 1e-10, "single-particle operator is not unitary");
  check_sites(u, from);
  check_sites(u, to);
  return lift_unchecked(u, from, to);
}

std::vector<OccupationSet> enumerate_occupations(std::size_t n, std::size_t k) {
  std::vector<OccupationSet> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.emplace_back(idx);
    if (k == 0) break;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

ComplexMatrix lift_operator(const ComplexMatrix& u, std::size_t k) {
  const std::vector<OccupationSet> basis = enumerate_occupations(static_cast<std::size_t>(u.rows()), k);
  const auto d = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix out(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      out(r, c) = lift_unchecked(u, basis[static_cast<std::size_t>(c)], basis[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

}  // namespace spinline
