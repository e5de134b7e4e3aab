// Finite probability mass functions over nonnegative integers.
#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "delib/rational.hpp"

namespace delib {

// One (value, probability) atom of a pmf.
struct PmfEntry {
  int value = 0;
  Rational prob;

  friend bool operator==(const PmfEntry& a, const PmfEntry& b) {
    return a.value == b.value && a.prob == b.prob;
  }
};

// Finite pmf with exact rational probabilities. Support is kept sorted
// strictly ascending; every probability is positive and they sum to exactly 1.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<PmfEntry> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty())
      throw std::invalid_argument("distribution has empty support");
    std::sort(entries_.begin(), entries_.end(),
              [](const PmfEntry& a, const PmfEntry& b) { return a.value < b.value; });
    Rational sum = 0;
    int previous = -1;
    for (const PmfEntry& e : entries_) {
      if (e.value < 0)
        throw std::invalid_argument("negative value " + std::to_string(e.value) +
                                    " in support");
      if (e.value == previous)
        throw std::invalid_argument("duplicate support value " +
                                    std::to_string(e.value));
      if (e.prob <= 0)
        throw std::invalid_argument("probability of value " +
                                    std::to_string(e.value) +
                                    " must be positive");
      previous = e.value;
      sum += e.prob;
    }
    if (sum != 1)
      throw std::invalid_argument("probabilities sum to " + fraction_string(sum));
  }

  static DiscreteDistribution point_mass(int value) {
    return DiscreteDistribution({PmfEntry{value, Rational(1)}});
  }

  const std::vector<PmfEntry>& support() const { return entries_; }
  int min_value() const { return entries_.front().value; }
  int max_value() const { return entries_.back().value; }

  bool is_point_mass_at(int value) const {
    return entries_.size() == 1 && entries_.front().value == value;
  }

  bool contains(int value) const {
    for (const PmfEntry& e : entries_)
      if (e.value == value) return true;
    return false;
  }

  // 0 when the value is not in the support.
  Rational prob_of(int value) const {
    for (const PmfEntry& e : entries_)
      if (e.value == value) return e.prob;
    return Rational(0);
  }

  // P(X > threshold)
  Rational tail_above(int threshold) const {
    Rational sum = 0;
    for (const PmfEntry& e : entries_)
      if (e.value > threshold) sum += e.prob;
    return sum;
  }

  Rational expected_value() const {
    Rational sum = 0;
    for (const PmfEntry& e : entries_) sum += e.value * e.prob;
    return sum;
  }

  friend bool operator==(const DiscreteDistribution& a,
                         const DiscreteDistribution& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<PmfEntry> entries_;
};

}  // namespace delib
