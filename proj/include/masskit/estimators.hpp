#pragma once

// Sample-only estimators: Good-Turing (two variants), the alternating-sum
// minimal-bias estimator, Chao's unseen-species count, and the hybrid
// per-class probability estimate used when the true distribution is unknown.

#include <map>
#include <vector>

#include "masskit/distributions.hpp"
#include "masskit/ground_truth.hpp"

namespace masskit {

enum class GoodTuringVariant { kStandard, kSimple };

/// (k+1)/n Phi_{k+1} (standard) or (k+1)/(n-k) Phi_{k+1} (simple).
/// k = n is a domain error: Phi_{n+1} is undefined in a sample of size n.
double good_turing(const SampleProfile& profile, long long k,
                   GoodTuringVariant variant = GoodTuringVariant::kStandard);

/// C(n,k) sum_{i=1}^{n-k} (-1)^(i-1) Phi_{k+i} / C(n,k+i), evaluated through
/// the log-space ratio chain with compensated summation. Not range
/// restricted: may be negative or exceed 1. k = n gives the empty sum, 0.
double minimal_bias(const SampleProfile& profile, long long k);

/// Chao's unseen-class estimate (n-1)/n Phi_1^2 / (2 Phi_2). When Phi_2 = 0
/// the bias-corrected fallback Phi_1 (Phi_1 - 1) / 2 is used.
double chao_unseen(const SampleProfile& profile);

struct EstimatedDistribution {
  std::map<uint32_t, double> seen;  // class -> probability estimate
  double unseen_count = 0.0;        // estimated f_0
  double unseen_each = 0.0;         // probability per unseen class

  double seen_total() const;
  double unseen_total() const { return unseen_count > 0.0 ? unseen_count * unseen_each : 0.0; }
};

/// Hybrid of the empirical and Good-Turing natural estimates: a seen class
/// with N_x = k gets c k/n when k < Phi_{k+1}, else c GT_k / Phi_k; a seen
/// class whose branch value degenerates to zero falls back to the empirical
/// rate before normalization. The unseen block is Chao-sized with per-class
/// rate GT_0 / f0_hat. c normalizes seen plus unseen block to 1.
EstimatedDistribution hybrid_phat(const SampleProfile& profile);

}  // namespace masskit
