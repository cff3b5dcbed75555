#pragma once

// Numeric policy layer: the moment and expectation formulas are written once
// against this interface and run either in log space (LogPolicy, production)
// or with exact rationals (ExactPolicy, the oracle gate). Probability-scale
// quantities flow through the policy Scalar; conversion to plain double
// happens only at output boundaries.

#include <vector>

#include "masskit/distributions.hpp"
#include "masskit/numerics.hpp"

namespace masskit {

struct LogPolicy {
  using Value = double;     // probability values
  using Scalar = LogWeight; // accumulators

  static Scalar zero() { return LogWeight::zero(); }
  static Scalar one() { return LogWeight::from_log(0.0, +1); }
  static Scalar from_value(Value v) { return LogWeight::from_double(v); }
  static Scalar from_count(long long c) {
    return LogWeight::from_double(static_cast<double>(c));
  }
  static Scalar from_coeff(double c) { return LogWeight::from_double(c); }

  /// v^e for v in (0, 1], e >= 0.
  static Scalar value_pow(Value v, long long e) {
    if (e == 0) return one();
    if (v <= 0.0) return zero();
    return LogWeight::from_log(static_cast<double>(e) * std::log(v), +1);
  }
  /// (1 - v)^e via log1p for accuracy near v = 0.
  static Scalar comp_pow(Value v, long long e) {
    if (e == 0) return one();
    const double r = 1.0 - v;
    if (r <= 0.0) return zero();
    return LogWeight::from_log(static_cast<double>(e) * std::log1p(-v), +1);
  }
  /// (1 - v1 - v2)^e.
  static Scalar comp2_pow(Value v1, Value v2, long long e) {
    if (e == 0) return one();
    const double r = 1.0 - v1 - v2;
    if (r <= 0.0) return zero();
    return LogWeight::from_log(static_cast<double>(e) * std::log1p(-(v1 + v2)), +1);
  }
  static Scalar binomial(long long n, long long k) {
    if (k < 0 || k > n) return zero();
    return log_binomial(n, k);
  }
  static Scalar trinomial(long long n, long long a, long long b) {
    if (a < 0 || b < 0 || a + b > n) return zero();
    return LogWeight::from_log(log_trinomial(n, a, b), +1);
  }
  static Scalar sum(const std::vector<Scalar>& terms) {
    return compensated_alternating_sum(terms);
  }
  static double to_double(const Scalar& s) { return s.value(); }
};

struct ExactPolicy {
  using Value = Rational;
  using Scalar = Rational;

  static Scalar zero() { return Rational(0); }
  static Scalar one() { return Rational(1); }
  static Scalar from_value(const Value& v) { return v; }
  static Scalar from_count(long long c) { return Rational(c); }
  static Scalar from_coeff(double c) { return rational_from_double(c); }

  static Scalar value_pow(const Value& v, long long e) { return pow_exact(v, e); }
  static Scalar comp_pow(const Value& v, long long e) {
    return pow_exact(Rational(1) - v, e);
  }
  static Scalar comp2_pow(const Value& v1, const Value& v2, long long e) {
    return pow_exact(Rational(1) - v1 - v2, e);
  }
  static Scalar binomial(long long n, long long k) {
    if (k < 0 || k > n) return zero();
    return Rational(binomial_exact(n, k));
  }
  static Scalar trinomial(long long n, long long a, long long b) {
    return Rational(trinomial_exact(n, a, b));
  }
  static Scalar sum(const std::vector<Scalar>& terms) {
    Rational acc = 0;
    for (const auto& t : terms) acc += t;
    return acc;
  }
  static double to_double(const Scalar& s) { return rational_to_double(s); }
};

/// A distribution collapsed into groups of equal-probability classes. All
/// class sums in the moment formulas run over groups, which is what keeps
/// S = 1000 evaluations tractable.
template <class P>
struct ClassGroups {
  std::vector<typename P::Value> prob;
  std::vector<long long> mult;

  size_t size() const { return prob.size(); }
  long long classes() const {
    long long s = 0;
    for (long long m : mult) s += m;
    return s;
  }
};

inline ClassGroups<LogPolicy> group_classes(const std::vector<double>& probs) {
  std::vector<double> sorted(probs);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  ClassGroups<LogPolicy> g;
  for (size_t i = 0; i < sorted.size();) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    g.prob.push_back(sorted[i]);
    g.mult.push_back(static_cast<long long>(j - i));
    i = j;
  }
  return g;
}

inline ClassGroups<LogPolicy> group_classes(const DiscreteDistribution& dist) {
  return group_classes(dist.probs());
}

inline ClassGroups<ExactPolicy> group_classes(const std::vector<Rational>& probs) {
  std::vector<Rational> sorted(probs);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  ClassGroups<ExactPolicy> g;
  for (size_t i = 0; i < sorted.size();) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    g.prob.push_back(sorted[i]);
    g.mult.push_back(static_cast<long long>(j - i));
    i = j;
  }
  return g;
}

}  // namespace masskit
