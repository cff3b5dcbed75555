#pragma once

// The search space: sparse coefficient tables over g_i(j) that sum to E[M_k],
// the mass-preserving rewriting identities, the constraint validator that
// characterizes the space, instantiation into plug-in estimators, and the
// index shift that adapts a table to a larger sample.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "masskit/distributions.hpp"

namespace masskit {

/// One term beta_{i,j} applied to the plug-in statistic Phi_i(j).
struct EstimatorTerm {
  long long i = 0;
  long long j = 0;
  double beta = 0.0;
};

class LinearEstimator {
 public:
  LinearEstimator() = default;
  LinearEstimator(long long n, std::vector<EstimatorTerm> terms);

  long long sample_size() const { return n_; }
  const std::vector<EstimatorTerm>& terms() const { return terms_; }

  /// Whether any term reads a proper prefix (j < n).
  bool needs_prefixes() const;

  /// Applies the estimator to a sample; replays the prefix profile once.
  double evaluate(const SampleProfile& profile) const;

  /// Canonical content hash (term layout plus exact double bits).
  uint64_t content_hash() const;

 private:
  long long n_ = 0;
  std::vector<EstimatorTerm> terms_;  // sorted by (j, i)
};

enum class IdentityKind {
  kSplit,    // alpha g_i(j) -> (1-delta) alpha g_i(j) + delta alpha g_i(j)
  kDown,     // g_i(j) = g_i(j+1) + g_{i+1}(j+1)
  kUpMinus,  // g_i(j) = g_i(j-1) - g_{i+1}(j)
  kLeftUp,   // g_i(j) = g_{i-1}(j-1) - g_{i-1}(j)
};

struct ValidationReport {
  bool valid = false;
  long long worst_kprime = 0;
  double worst_residual = 0.0;
  std::string message;
};

class Representation {
 public:
  using CoeffMap = std::map<std::pair<long long, long long>, double>;

  Representation() = default;
  Representation(long long n, long long k) : n_(n), k_(k) {}

  long long sample_size() const { return n_; }
  long long target_k() const { return k_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  size_t term_count() const { return coeffs_.size(); }
  double coeff(long long i, long long j) const;

  /// Adds to alpha_{i,j}; values below 1e-14 in magnitude are dropped after
  /// merging. 1 <= i <= j <= n+1 required.
  void add_coeff(long long i, long long j, double value);

  bool operator==(const Representation& o) const {
    return n_ == o.n_ && k_ == o.k_ && coeffs_ == o.coeffs_;
  }

 private:
  long long n_ = 0, k_ = 0;
  CoeffMap coeffs_;
};

/// The single-cell table alpha_{k+1,n+1} = C(n,k).
Representation initial_representation(long long n, long long k);

/// Series-plus-remainder table whose instantiation is the alternating-sum
/// minimal-bias estimator: alpha_{k+i,n} = (-1)^(i-1) C(n,k) for i = 1..n-k
/// and the remainder cell alpha_{n+1,n+1} = (-1)^(n-k) C(n,k).
Representation minimal_bias_representation(long long n, long long k);

/// Rewrites the coefficient at `target` by one identity. kSplit needs delta
/// in (0,1) and leaves the instantiated estimator unchanged on its own; the
/// others move the full coefficient. Out-of-domain rewrites (including any
/// that would touch the g_{n+1}(n+1) cell, which has no plug-in statistic)
/// throw std::domain_error.
Representation apply_identity(const Representation& rep, IdentityKind identity,
                              std::pair<long long, long long> target,
                              double delta = 0.5);

/// Split `target` by delta, then rewrite the delta half with `identity`.
/// This is the mutation primitive; kSplit is not a valid second step.
Representation split_and_rewrite(const Representation& rep,
                                 std::pair<long long, long long> target,
                                 double delta, IdentityKind identity);

/// Checks, for every k' in 1..n+1, that sum c_{i,j} alpha_{i,j} equals
/// C(n,k) for k' = k+1 and 0 otherwise, with c_{i,j} = C(n+1-j, k'-i) where
/// feasible. Relative tolerance 1e-8 on the nonzero target; zero targets use
/// max(1e-10, 1e-8 * cancellation scale).
ValidationReport validate_representation(const Representation& rep);

/// beta_{i,j} = alpha_{i,j}/C(j,i) for j <= n; the j = n+1 column folds onto
/// Phi_i(n) with addend alpha_{i,n+1}/C(n+1,i). The g_{n+1}(n+1) cell has no
/// statistic and is skipped (it is exactly the decomposition remainder).
LinearEstimator instantiate(const Representation& rep);

/// Index shift j -> j + (m - n); coefficients scaled by C(m,k)/C(n,k) (a
/// no-op for k = 0). The result is a valid size-m representation.
Representation adapt_representation(const Representation& rep, long long m);

/// The adapted estimator taken verbatim: interior columns shift and fold as
/// usual, while the original j = n+1 column keeps denominator C(n+1,i) and
/// applies to Phi_i(m).
LinearEstimator adapt_to_larger_sample(const Representation& rep, long long m);

/// a*r1 + b*r2 coefficient-wise; preserves validity when a + b = 1.
Representation affine_combine(double a, const Representation& r1, double b,
                              const Representation& r2);

/// The Good-Turing estimator (k+1)/n Phi_{k+1} as a linear table.
LinearEstimator good_turing_linear(long long n, long long k);
/// The instantiated minimal-bias table, i.e. the alternating sum over Phi.
LinearEstimator minimal_bias_linear(long long n, long long k);

// Text persistence: header "n k", then one "i j coefficient" line per term
// with 17 significant digits.
std::string representation_to_text(const Representation& rep);
Representation representation_from_text(const std::string& text);
void write_representation(const Representation& rep, const std::string& path);
Representation read_representation(const std::string& path);

}  // namespace masskit
