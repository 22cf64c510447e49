#pragma once

#include <cstddef>
#include <vector>

#include "spinline/core.hpp"

namespace spinline {

// Ordered set of occupied sites standing for the wedge product
// |s_1> ^ |s_2> ^ ... . Construction sorts the sites and keeps the sign of
// the sorting permutation; a repeated site gives the annihilated (zero) set.
class OccupationSet {
 public:
  OccupationSet() = default;
  explicit OccupationSet(std::vector<std::size_t> sites);

  const std::vector<std::size_t>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }
  int sign() const { return sign_; }
  bool annihilated() const { return sign_ == 0; }
  bool contains(std::size_t site) const;

  bool operator==(const OccupationSet& other) const = default;

 private:
  std::vector<std::size_t> sites_;
  int sign_ = 1;
};

// <to| U |from> for free fermions: determinant of U[to, from], times the
// signs carried by both sets.
Complex lift_amplitude(const ComplexMatrix& u, const OccupationSet& from, const OccupationSet& to);

// All k-element subsets of {0 .. n-1} in lexicographic order.
std::vector<OccupationSet> enumerate_occupations(std::size_t n, std::size_t k);

// Matrix of lift_amplitude over the lexicographic k-subsets.
ComplexMatrix lift_operator(const ComplexMatrix& u, std::size_t k);

}  // namespace spinline
