#pragma once

// Exact expected quantities under a known distribution: f_k(n), g_k(n),
// E[M_k], the series/remainder decomposition of E[M_k], and closed-form
// estimator biases.

#include "masskit/scalar_policy.hpp"

namespace masskit {

enum class EstimatorId { kGoodTuring, kGoodTuringSimple, kMinimalBias };

/// g_k(n) = f_k(n) / C(n,k) = sum_x p_x^k (1 - p_x)^(n-k).
template <class P>
typename P::Scalar g_value(const ClassGroups<P>& dist, long long k, long long n) {
  std::vector<typename P::Scalar> terms;
  terms.reserve(dist.size());
  for (size_t gi = 0; gi < dist.size(); ++gi)
    terms.push_back(P::from_count(dist.mult[gi]) *
                    P::value_pow(dist.prob[gi], k) *
                    P::comp_pow(dist.prob[gi], n - k));
  return P::sum(terms);
}

/// f_k(n) = C(n,k) g_k(n) = E[Phi_k(n)].
template <class P>
typename P::Scalar expected_fk(const ClassGroups<P>& dist, long long n, long long k) {
  if (k < 0 || k > n) throw std::domain_error("expected_fk: k out of range");
  return P::binomial(n, k) * g_value(dist, k, n);
}

/// E[M_k] = C(n,k) g_{k+1}(n+1).
template <class P>
typename P::Scalar expected_mass(const ClassGroups<P>& dist, long long n, long long k) {
  if (k < 0 || k > n) throw std::domain_error("expected_mass: k out of range");
  return P::binomial(n, k) * g_value(dist, k + 1, n + 1);
}

template <class P>
struct MassDecomposition {
  typename P::Scalar series;     // C(n,k) sum_i (-1)^(i-1) g_{k+i}(n)
  typename P::Scalar remainder;  // R_{n,k} = C(n,k) (-1)^(n-k) f_{n+1}(n+1)
};

/// series + remainder reproduces expected_mass; the remainder is the part no
/// statistic of X^n can capture.
template <class P>
MassDecomposition<P> mass_decomposition(const ClassGroups<P>& dist, long long n,
                                        long long k) {
  if (k < 0 || k > n) throw std::domain_error("mass_decomposition: k out of range");
  std::vector<typename P::Scalar> terms;
  terms.reserve(static_cast<size_t>(n - k));
  const auto cnk = P::binomial(n, k);
  for (long long i = 1; i <= n - k; ++i) {
    auto t = cnk * g_value(dist, k + i, n);
    if (i % 2 == 0) t = -t;
    terms.push_back(t);
  }
  MassDecomposition<P> out;
  out.series = P::sum(terms);
  auto rem = cnk * g_value(dist, n + 1, n + 1);  // f_{n+1}(n+1) = sum p^(n+1)
  if ((n - k) % 2 != 0) rem = -rem;
  out.remainder = rem;
  return out;
}

/// Signed exact bias E[estimate] - E[M_k].
///  - minimal bias: -R_{n,k}.
///  - simple Good-Turing (k+1)/(n-k) Phi_{k+1}: sum_x C(n,k) p^(k+2) (1-p)^(n-k-1).
///  - Good-Turing (k+1)/n Phi_{k+1}: the same sum with factor (1 - k/(n p_x)).
template <class P>
typename P::Scalar analytic_bias(const ClassGroups<P>& dist, long long n, long long k,
                                 EstimatorId estimator) {
  if (k < 0 || k > n) throw std::domain_error("analytic_bias: k out of range");
  switch (estimator) {
    case EstimatorId::kMinimalBias:
      return -(mass_decomposition(dist, n, k).remainder);
    case EstimatorId::kGoodTuringSimple: {
      if (k + 1 > n) throw std::domain_error("analytic_bias: needs k + 1 <= n");
      std::vector<typename P::Scalar> terms;
      const auto cnk = P::binomial(n, k);
      for (size_t gi = 0; gi < dist.size(); ++gi)
        terms.push_back(P::from_count(dist.mult[gi]) * cnk *
                        P::value_pow(dist.prob[gi], k + 2) *
                        P::comp_pow(dist.prob[gi], n - k - 1));
      return P::sum(terms);
    }
    case EstimatorId::kGoodTuring: {
      if (k + 1 > n) throw std::domain_error("analytic_bias: needs k + 1 <= n");
      // Per-class closed form avoids the cancellation of the difference form
      // (k+1)/n f_{k+1}(n) - C(n,k) g_{k+1}(n+1).
      std::vector<typename P::Scalar> terms;
      const auto cnk = P::binomial(n, k);
      const auto cn1k1 = P::binomial(n - 1, k - 1);  // zero when k = 0
      for (size_t gi = 0; gi < dist.size(); ++gi) {
        const auto base = P::from_count(dist.mult[gi]) *
                          P::value_pow(dist.prob[gi], k + 1) *
                          P::comp_pow(dist.prob[gi], n - k - 1);
        terms.push_back(base * P::from_value(dist.prob[gi]) * cnk);
        if (k > 0) terms.push_back(-(base * cn1k1));
      }
      return P::sum(terms);
    }
  }
  throw std::domain_error("analytic_bias: unknown estimator");
}

/// g_k(n) and f_k(n) for k = 0..n at a fixed n (g[0] is g_0(n)).
template <class P>
struct ExpectedProfile {
  long long n = 0;
  std::vector<typename P::Scalar> g;
  std::vector<typename P::Scalar> f;
};

template <class P>
ExpectedProfile<P> expected_profile(const ClassGroups<P>& dist, long long n) {
  ExpectedProfile<P> prof;
  prof.n = n;
  prof.g.reserve(static_cast<size_t>(n + 1));
  prof.f.reserve(static_cast<size_t>(n + 1));
  for (long long k = 0; k <= n; ++k) {
    prof.g.push_back(g_value(dist, k, n));
    prof.f.push_back(P::binomial(n, k) * prof.g.back());
  }
  return prof;
}

}  // namespace masskit
