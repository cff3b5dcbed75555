#pragma once

// Exhaustive enumeration over the multinomial outcome space at tiny scale.
// Composition mode covers statistics of the final counts; sequence mode is
// required for anything that reads prefix profiles Phi_i(j) with j < n.

#include <functional>
#include <vector>

#include "masskit/numerics.hpp"

namespace masskit {

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

class OutcomeTable {
 public:
  enum class Granularity { kComposition, kSequence };

  /// Every count vector over the support summing to n with its exact
  /// multinomial probability. Refuses when C(n+S-1, S-1) exceeds the budget.
  static OutcomeTable enumerate_compositions(const std::vector<Rational>& probs,
                                             long long n,
                                             long long budget = 2'000'000);
  /// Every ordered sequence; S^n outcomes. Needed for prefix statistics.
  static OutcomeTable enumerate_sequences(const std::vector<Rational>& probs,
                                          long long n,
                                          long long budget = 2'000'000);

  Granularity granularity() const { return granularity_; }
  long long sample_size() const { return n_; }
  size_t support() const { return probs_.size(); }
  const std::vector<Rational>& probs() const { return probs_; }
  size_t outcome_count() const { return outcomes_.size(); }
  /// Outcome i: counts per class (composition) or class per step (sequence).
  const std::vector<int>& outcome(size_t i) const { return outcomes_[i]; }
  const Rational& weight(size_t i) const { return weights_[i]; }

  /// Exact sum of weight * statistic over all outcomes.
  Rational exact_expectation(
      const std::function<Rational(const std::vector<int>&)>& statistic) const;

 private:
  Granularity granularity_ = Granularity::kComposition;
  long long n_ = 0;
  std::vector<Rational> probs_;
  std::vector<std::vector<int>> outcomes_;
  std::vector<Rational> weights_;
};

// Statistics over enumerated outcomes.
long long phi_of_counts(const std::vector<int>& counts, long long k);
Rational mass_of_counts(const std::vector<int>& counts,
                        const std::vector<Rational>& probs, long long k);
std::vector<int> sequence_prefix_counts(const std::vector<int>& seq, size_t support,
                                        long long j);
long long phi_of_sequence_prefix(const std::vector<int>& seq, size_t support,
                                 long long k, long long j);

}  // namespace masskit
