#pragma once

// Exact second-moment engine under a known (or estimated) distribution:
// Var(Phi_i(j)), Cov(Phi_i(j), Phi_l(m)) across prefix sizes of one sample
// stream, Var(M_k), Cov(estimator, M_k), and the MSE decomposition of any
// linear estimator. Runs in log space for production and with exact
// rationals for the oracle gate; only covariances a caller actually touches
// are computed, and classes with equal probability are grouped.

#include <algorithm>
#include <mutex>
#include <optional>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "masskit/estimators.hpp"
#include "masskit/ground_truth.hpp"
#include "masskit/representations.hpp"
#include "masskit/scalar_policy.hpp"

namespace masskit {

template <class P>
struct MseComponents {
  typename P::Scalar mse;
  typename P::Scalar bias;           // E[est] - E[M_k], signed
  typename P::Scalar variance;       // Var(est)
  typename P::Scalar covariance;     // Cov(est, M_k)
  typename P::Scalar mass_variance;  // Var(M_k)
};

template <class P>
class MomentContextT {
 public:
  using Scalar = typename P::Scalar;
  using Value = typename P::Value;

  MomentContextT(std::vector<Value> probs, long long n) : n_(n) {
    if (n < 1) throw std::domain_error("MomentContext: n must be >= 1");
    if (probs.size() < 1) throw std::domain_error("MomentContext: empty support");
    // Group classes with identical probability; sums below run over groups.
    std::vector<size_t> order(probs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&probs](size_t a, size_t b) { return probs[a] > probs[b]; });
    class_group_.resize(probs.size());
    for (size_t idx : order) {
      if (!gprob_.empty() && probs[idx] == gprob_.back()) {
        ++gmult_.back();
      } else {
        gprob_.push_back(probs[idx]);
        gmult_.push_back(1);
      }
      class_group_[idx] = gprob_.size() - 1;
    }
  }

  long long sample_size() const { return n_; }
  size_t support() const { return class_group_.size(); }
  size_t group_count() const { return gprob_.size(); }

  /// P(N_x(j) = i and N_y(n') = l) for classes x, y; sizes are prefix lengths
  /// of one sample stream. Infeasible combinations return exact zero.
  Scalar joint_indicator_expectation(size_t x, long long j, long long i, size_t y,
                                     long long n_prime, long long l) const {
    if (x >= support() || y >= support())
      throw std::domain_error("joint_indicator_expectation: class out of range");
    if (j < 1 || n_prime < 1 || i < 0 || l < 0 || i > j || l > n_prime)
      throw std::domain_error("joint_indicator_expectation: bad indices");
    // Normalize so the first argument carries the larger prefix.
    if (n_prime > j) return joint_indicator_expectation(y, n_prime, l, x, j, i);
    if (x == y) return joint_same(class_group_[x], i, j, l, n_prime);
    return joint_diff(class_group_[x], class_group_[y], i, j, l, n_prime);
  }

  /// E[Phi_i(j)] under this context's distribution.
  Scalar expected_phi(long long i, long long j) const {
    if (i < 0 || i > j) throw std::domain_error("expected_phi: bad indices");
    const uint64_t key = pack(1, i, j, 0, 0);
    if (auto hit = lookup(key)) return *hit;
    Scalar v = expected_fk(groups(), j, i);
    store(key, v);
    return v;
  }

  /// Var(Phi_i(j)): f_i(j) - f_i(j)^2 plus the distinct-pair trinomial term
  /// when 2i <= j.
  Scalar variance_phi(long long i, long long j) const {
    if (i < 1 || i > j || j > n_) throw std::domain_error("variance_phi: bad indices");
    const uint64_t key = pack(3, i, j, 0, 0);
    if (auto hit = lookup(key)) return *hit;
    const Scalar fij = expected_phi(i, j);
    std::vector<Scalar> terms{fij, -(fij * fij)};
    if (2 * i <= j) {
      const Scalar tri = P::trinomial(j, i, i);
      for_distinct_pairs([&](size_t gx, size_t gy, long long pairs) {
        terms.push_back(P::from_count(pairs) * tri * P::value_pow(gprob_[gx], i) *
                        P::value_pow(gprob_[gy], i) *
                        P::comp2_pow(gprob_[gx], gprob_[gy], j - 2 * i));
      });
    }
    Scalar v = P::sum(terms);
    store(key, v);
    return v;
  }

  /// Cov(Phi_i(j), Phi_l(m)) across prefix sizes of the same stream.
  Scalar covariance_phi(long long i, long long j, long long l, long long m) const {
    if (i < 1 || i > j || j > n_ || l < 1 || l > m || m > n_)
      throw std::domain_error("covariance_phi: bad indices");
    if (m > j || (m == j && l > i)) return covariance_phi(l, m, i, j);
    const uint64_t key = pack(2, i, j, l, m);
    if (auto hit = lookup(key)) return *hit;
    std::vector<Scalar> terms;
    // Same-class part of E[Phi_i(j) Phi_l(m)].
    for (size_t g = 0; g < gprob_.size(); ++g) {
      const Scalar t = joint_same(g, i, j, l, m);
      if (!is_zero(t)) terms.push_back(P::from_count(gmult_[g]) * t);
    }
    for_distinct_pairs([&](size_t gx, size_t gy, long long pairs) {
      const Scalar t = joint_diff(gx, gy, i, j, l, m);
      if (!is_zero(t)) terms.push_back(P::from_count(pairs) * t);
    });
    terms.push_back(-(expected_phi(i, j) * expected_phi(l, m)));
    Scalar v = P::sum(terms);
    store(key, v);
    return v;
  }

  /// Var(M_k) at the context's sample size.
  Scalar variance_mass(long long k) const {
    if (k < 0 || k > n_) throw std::domain_error("variance_mass: bad k");
    const uint64_t key = pack(4, k, 0, 0, 0);
    if (auto hit = lookup(key)) return *hit;
    std::vector<Scalar> terms;
    const Scalar cnk = P::binomial(n_, k);
    auto indicator_mean = [&](size_t g) {
      return cnk * P::value_pow(gprob_[g], k) * P::comp_pow(gprob_[g], n_ - k);
    };
    for (size_t g = 0; g < gprob_.size(); ++g) {
      const Scalar b = indicator_mean(g);
      const Scalar p2 = P::value_pow(gprob_[g], 2);
      terms.push_back(P::from_count(gmult_[g]) * p2 * (b - b * b));
    }
    const bool feasible = n_ >= 2 * k;
    const Scalar tri = feasible ? P::trinomial(n_, k, k) : P::zero();
    for_distinct_pairs([&](size_t gx, size_t gy, long long pairs) {
      const Scalar pxpy = P::from_value(gprob_[gx]) * P::from_value(gprob_[gy]);
      std::vector<Scalar> cov_terms;
      if (feasible)
        cov_terms.push_back(tri * P::value_pow(gprob_[gx], k) *
                            P::value_pow(gprob_[gy], k) *
                            P::comp2_pow(gprob_[gx], gprob_[gy], n_ - 2 * k));
      cov_terms.push_back(-(indicator_mean(gx) * indicator_mean(gy)));
      terms.push_back(P::from_count(pairs) * pxpy * P::sum(cov_terms));
    });
    Scalar v = P::sum(terms);
    store(key, v);
    return v;
  }

  /// Cov(Phi_i(j), M_k) with M_k at the full sample size.
  Scalar covariance_phi_mass(long long i, long long j, long long k) const {
    if (i < 1 || i > j || j > n_ || k < 0 || k > n_)
      throw std::domain_error("covariance_phi_mass: bad indices");
    const uint64_t key = pack(5, i, j, k, 0);
    if (auto hit = lookup(key)) return *hit;
    std::vector<Scalar> terms;
    const Scalar cnk = P::binomial(n_, k);
    // sum_x sum_y p_y (E[1(N_x(j)=i and N_y(n)=k)] - E[..x..] E[..y..]);
    // the bigger side of the joint is always (y, k, n).
    for (size_t g = 0; g < gprob_.size(); ++g) {
      const Scalar joint = joint_same(g, k, n_, i, j);
      const Scalar marg = P::binomial(j, i) * P::value_pow(gprob_[g], i) *
                          P::comp_pow(gprob_[g], j - i) * cnk *
                          P::value_pow(gprob_[g], k) * P::comp_pow(gprob_[g], n_ - k);
      terms.push_back(P::from_count(gmult_[g]) * P::from_value(gprob_[g]) *
                      (joint - marg));
    }
    for_distinct_pairs([&](size_t gx, size_t gy, long long pairs) {
      // x carries Phi_i(j), y carries the mass indicator and the p_y weight.
      const Scalar joint = joint_diff(gy, gx, k, n_, i, j);
      const Scalar marg = P::binomial(j, i) * P::value_pow(gprob_[gx], i) *
                          P::comp_pow(gprob_[gx], j - i) * cnk *
                          P::value_pow(gprob_[gy], k) *
                          P::comp_pow(gprob_[gy], n_ - k);
      terms.push_back(P::from_count(pairs) * P::from_value(gprob_[gy]) *
                      (joint - marg));
    });
    Scalar v = P::sum(terms);
    store(key, v);
    return v;
  }

  /// MSE(est) = bias^2 + Var(est) + Var(M_k) - 2 Cov(est, M_k), with every
  /// component returned.
  MseComponents<P> estimator_mse(const LinearEstimator& est, long long k) const {
    if (est.sample_size() != n_)
      throw std::domain_error("estimator_mse: estimator domain exceeds context");
    const auto& terms = est.terms();

    std::vector<Scalar> expect_terms;
    expect_terms.reserve(terms.size() + 1);
    for (const auto& t : terms)
      expect_terms.push_back(P::from_coeff(t.beta) * expected_phi(t.i, t.j));
    expect_terms.push_back(-expected_mass(groups(), n_, k));
    MseComponents<P> out;
    out.bias = P::sum(expect_terms);

    std::vector<Scalar> var_terms;
    var_terms.reserve(terms.size() * (terms.size() + 1) / 2);
    for (size_t a = 0; a < terms.size(); ++a) {
      for (size_t b = a; b < terms.size(); ++b) {
        Scalar cov = covariance_phi(terms[a].i, terms[a].j, terms[b].i, terms[b].j);
        Scalar w = P::from_coeff(terms[a].beta) * P::from_coeff(terms[b].beta) * cov;
        if (b != a) w = w + w;
        var_terms.push_back(w);
      }
    }
    out.variance = P::sum(var_terms);

    std::vector<Scalar> cov_terms;
    cov_terms.reserve(terms.size());
    for (const auto& t : terms)
      cov_terms.push_back(P::from_coeff(t.beta) * covariance_phi_mass(t.i, t.j, k));
    out.covariance = P::sum(cov_terms);

    out.mass_variance = variance_mass(k);

    std::vector<Scalar> mse_terms{out.bias * out.bias, out.variance,
                                  out.mass_variance,
                                  -(out.covariance + out.covariance)};
    out.mse = P::sum(mse_terms);
    return out;
  }

  const ClassGroups<P>& groups() const {
    if (groups_view_.prob.empty()) {
      groups_view_.prob = gprob_;
      groups_view_.mult = gmult_;
    }
    return groups_view_;
  }

 private:
  static bool is_zero(const Scalar& s) {
    if constexpr (std::is_same_v<Scalar, LogWeight>)
      return s.sign == 0 && !s.underflow;
    else
      return s == 0;
  }

  /// Joint probability for one class: count a at prefix nb, count b at prefix
  /// ns, nb >= ns.
  Scalar joint_same(size_t g, long long a, long long nb, long long b,
                    long long ns) const {
    const Value& p = gprob_[g];
    if (nb == ns) {
      if (a != b) return P::zero();
      return P::binomial(nb, a) * P::value_pow(p, a) * P::comp_pow(p, nb - a);
    }
    if (b > a || a - b > nb - ns) return P::zero();
    return P::binomial(ns, b) * P::value_pow(p, b) * P::comp_pow(p, ns - b) *
           P::binomial(nb - ns, a - b) * P::value_pow(p, a - b) *
           P::comp_pow(p, (nb - ns) - (a - b));
  }

  /// Joint probability for distinct classes: the big-side class carries count
  /// a at prefix nb, the small-side class count b at prefix ns, nb >= ns. For
  /// nb > ns the value conditions on the big-side class's count a' within the
  /// shared prefix.
  Scalar joint_diff(size_t gbig, size_t gsmall, long long a, long long nb,
                    long long b, long long ns) const {
    const Value& pb = gprob_[gbig];
    const Value& ps = gprob_[gsmall];
    if (nb == ns) {
      if (a + b > nb) return P::zero();
      return P::trinomial(nb, a, b) * P::value_pow(pb, a) * P::value_pow(ps, b) *
             P::comp2_pow(pb, ps, nb - a - b);
    }
    const long long lo = std::max<long long>(0, a - (nb - ns));
    const long long hi = std::min(a, ns - b);
    if (lo > hi) return P::zero();
    std::vector<Scalar> terms;
    terms.reserve(static_cast<size_t>(hi - lo + 1));
    for (long long ap = lo; ap <= hi; ++ap) {
      terms.push_back(P::trinomial(ns, ap, b) * P::value_pow(pb, ap) *
                      P::value_pow(ps, b) * P::comp2_pow(pb, ps, ns - ap - b) *
                      P::binomial(nb - ns, a - ap) * P::value_pow(pb, a - ap) *
                      P::comp_pow(pb, (nb - ns) - (a - ap)));
    }
    return P::sum(terms);
  }

  /// Ordered distinct-class pair visitor: pairs = multiplicity of (x, y)
  /// ordered pairs with x != y in the given group combination.
  template <class Fn>
  void for_distinct_pairs(Fn&& fn) const {
    for (size_t gx = 0; gx < gprob_.size(); ++gx) {
      for (size_t gy = 0; gy < gprob_.size(); ++gy) {
        const long long pairs = gx == gy ? gmult_[gx] * (gmult_[gx] - 1)
                                         : gmult_[gx] * gmult_[gy];
        if (pairs > 0) fn(gx, gy, pairs);
      }
    }
  }

  static uint64_t pack(uint64_t op, long long a, long long b, long long c,
                       long long d) {
    return (op << 60) | (static_cast<uint64_t>(a) << 45) |
           (static_cast<uint64_t>(b) << 30) | (static_cast<uint64_t>(c) << 15) |
           static_cast<uint64_t>(d);
  }

  std::optional<Scalar> lookup(uint64_t key) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = cache_.find(key);
    if (it == cache_.end()) return std::nullopt;
    return it->second;
  }

  void store(uint64_t key, const Scalar& v) const {
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, v);
  }

  long long n_;
  std::vector<Value> gprob_;
  std::vector<long long> gmult_;
  std::vector<size_t> class_group_;
  mutable ClassGroups<P> groups_view_;
  mutable std::mutex mu_;
  mutable std::unordered_map<uint64_t, Scalar> cache_;
};

using MomentContext = MomentContextT<LogPolicy>;
using ExactMomentContext = MomentContextT<ExactPolicy>;

MomentContext context_for(const DiscreteDistribution& dist, long long n);

/// Hybrid-estimate context: seen classes at their hybrid rates plus
/// ceil(f0_hat) synthetic unseen classes, the last one scaled so the unseen
/// block totals its share exactly.
MomentContext estimated_context(const SampleProfile& profile);

/// Estimated-MSE fitness: builds the hybrid context and evaluates Eq-style
/// MSE of the estimator on it. Never aborts on degenerate profiles.
double estimated_mse(const SampleProfile& profile, const LinearEstimator& est,
                     long long k);

}  // namespace masskit
