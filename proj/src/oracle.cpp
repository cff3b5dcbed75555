#include "masskit/oracle.hpp"

#include <stdexcept>

namespace masskit {

namespace {

void check_probs(const std::vector<Rational>& probs) {
  if (probs.size() < 2) throw std::domain_error("oracle: support must be >= 2");
  Rational total = 0;
  for (const auto& p : probs) {
    if (p <= 0) throw std::domain_error("oracle: probabilities must be positive");
    total += p;
  }
  if (total != 1) throw std::domain_error("oracle: probabilities must sum to 1 exactly");
}

}  // namespace

OutcomeTable OutcomeTable::enumerate_compositions(const std::vector<Rational>& probs,
                                                  long long n, long long budget) {
  check_probs(probs);
  const long long S = static_cast<long long>(probs.size());
  const BigInt count = binomial_exact(n + S - 1, S - 1);
  if (count > budget)
    throw BudgetExceeded("composition enumeration needs " + count.str() +
                         " outcomes, budget is " + std::to_string(budget));

  OutcomeTable table;
  table.granularity_ = Granularity::kComposition;
  table.n_ = n;
  table.probs_ = probs;

  std::vector<int> counts(static_cast<size_t>(S), 0);
  // Recursively assign counts to classes; weight = multinomial * prod p^c.
  std::function<void(size_t, long long)> recurse = [&](size_t klass, long long left) {
    if (klass + 1 == counts.size()) {
      counts[klass] = static_cast<int>(left);
      // multinomial coefficient n! / prod c_i!
      BigInt coeff = 1;
      long long rem = n;
      for (int c : counts) {
        coeff *= binomial_exact(rem, c);
        rem -= c;
      }
      Rational w(coeff);
      for (size_t x = 0; x < counts.size(); ++x)
        w *= pow_exact(probs[x], counts[x]);
      table.outcomes_.push_back(counts);
      table.weights_.push_back(w);
      return;
    }
    for (long long c = 0; c <= left; ++c) {
      counts[klass] = static_cast<int>(c);
      recurse(klass + 1, left - c);
    }
  };
  recurse(0, n);
  return table;
}

OutcomeTable OutcomeTable::enumerate_sequences(const std::vector<Rational>& probs,
                                               long long n, long long budget) {
  check_probs(probs);
  const long long S = static_cast<long long>(probs.size());
  BigInt count = 1;
  for (long long i = 0; i < n; ++i) count *= S;
  if (count > budget)
    throw BudgetExceeded("sequence enumeration needs " + count.str() +
                         " outcomes, budget is " + std::to_string(budget));

  OutcomeTable table;
  table.granularity_ = Granularity::kSequence;
  table.n_ = n;
  table.probs_ = probs;

  std::vector<int> seq(static_cast<size_t>(n), 0);
  std::function<void(size_t, Rational)> recurse = [&](size_t pos, Rational w) {
    if (pos == seq.size()) {
      table.outcomes_.push_back(seq);
      table.weights_.push_back(w);
      return;
    }
    for (long long x = 0; x < S; ++x) {
      seq[pos] = static_cast<int>(x);
      recurse(pos + 1, w * probs[static_cast<size_t>(x)]);
    }
  };
  recurse(0, Rational(1));
  return table;
}

Rational OutcomeTable::exact_expectation(
    const std::function<Rational(const std::vector<int>&)>& statistic) const {
  Rational acc = 0;
  for (size_t i = 0; i < outcomes_.size(); ++i)
    acc += weights_[i] * statistic(outcomes_[i]);
  return acc;
}

long long phi_of_counts(const std::vector<int>& counts, long long k) {
  long long hits = 0;
  for (int c : counts)
    if (c == k) ++hits;
  return hits;
}

Rational mass_of_counts(const std::vector<int>& counts,
                        const std::vector<Rational>& probs, long long k) {
  Rational acc = 0;
  for (size_t x = 0; x < counts.size(); ++x)
    if (counts[x] == k) acc += probs[x];
  return acc;
}

std::vector<int> sequence_prefix_counts(const std::vector<int>& seq, size_t support,
                                        long long j) {
  std::vector<int> counts(support, 0);
  for (long long t = 0; t < j; ++t) ++counts[static_cast<size_t>(seq[static_cast<size_t>(t)])];
  return counts;
}

long long phi_of_sequence_prefix(const std::vector<int>& seq, size_t support,
                                 long long k, long long j) {
  return phi_of_counts(sequence_prefix_counts(seq, support, j), k);
}

}  // namespace masskit
