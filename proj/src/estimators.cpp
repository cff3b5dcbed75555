#include "masskit/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "masskit/numerics.hpp"

namespace masskit {

double good_turing(const SampleProfile& profile, long long k,
                   GoodTuringVariant variant) {
  const long long n = profile.size();
  if (k < 0 || k >= n) throw std::domain_error("good_turing: requires 0 <= k < n");
  const double phi = static_cast<double>(profile.phi(k + 1));
  const double denom = variant == GoodTuringVariant::kStandard
                           ? static_cast<double>(n)
                           : static_cast<double>(n - k);
  return static_cast<double>(k + 1) / denom * phi;
}

double minimal_bias(const SampleProfile& profile, long long k) {
  const long long n = profile.size();
  if (k < 0 || k > n) throw std::domain_error("minimal_bias: requires 0 <= k <= n");
  if (k == n) return 0.0;
  const std::vector<double> log_chain = log_binomial_ratio_chain(n, k, n - k);
  std::vector<LogWeight> terms;
  terms.reserve(static_cast<size_t>(n - k));
  for (long long i = 1; i <= n - k; ++i) {
    const long long phi = profile.phi(k + i);
    if (phi == 0) continue;
    LogWeight t = LogWeight::from_log(
        log_chain[static_cast<size_t>(i - 1)] + std::log(static_cast<double>(phi)),
        i % 2 == 0 ? -1 : +1);
    terms.push_back(t);
  }
  return compensated_alternating_sum(terms).value();
}

double chao_unseen(const SampleProfile& profile) {
  const long long n = profile.size();
  if (n < 2) throw std::domain_error("chao_unseen: requires n >= 2");
  const double phi1 = static_cast<double>(profile.phi(1));
  const double phi2 = static_cast<double>(profile.phi(2));
  if (phi1 == 0.0) return 0.0;
  if (phi2 == 0.0) return phi1 * (phi1 - 1.0) / 2.0;
  return (static_cast<double>(n - 1) / static_cast<double>(n)) * phi1 * phi1 /
         (2.0 * phi2);
}

double EstimatedDistribution::seen_total() const {
  CompensatedSum acc;
  for (const auto& [klass, p] : seen) {
    (void)klass;
    acc.add(p);
  }
  return acc.result();
}

EstimatedDistribution hybrid_phat(const SampleProfile& profile) {
  const long long n = profile.size();
  if (n < 2) throw std::domain_error("hybrid_phat: requires n >= 2");

  EstimatedDistribution est;
  CompensatedSum raw_total;
  for (const auto& [klass, count] : profile.counts()) {
    const long long k = count;
    const double empirical = static_cast<double>(k) / static_cast<double>(n);
    double value;
    if (k < profile.phi(k + 1)) {
      value = empirical;
    } else {
      const double phi_k = static_cast<double>(profile.phi(k));
      value = k < n ? good_turing(profile, k) / phi_k : 0.0;
    }
    if (value <= 0.0) value = empirical;  // observed classes keep positive mass
    est.seen[klass] = value;
    raw_total.add(value);
  }

  const double f0 = chao_unseen(profile);
  const double gt0 = profile.phi(1) > 0 ? good_turing(profile, 0) : 0.0;
  double unseen_block = 0.0;
  if (f0 > 0.0 && gt0 > 0.0) {
    est.unseen_count = f0;
    unseen_block = gt0;
  }

  const double total = raw_total.result() + unseen_block;
  const double c = 1.0 / total;
  for (auto& [klass, p] : est.seen) {
    (void)klass;
    p *= c;
  }
  if (est.unseen_count > 0.0) est.unseen_each = c * gt0 / f0;
  return est;
}

}  // namespace masskit
