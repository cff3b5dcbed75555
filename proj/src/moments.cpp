#include "masskit/moments.hpp"

#include <cmath>

namespace masskit {

MomentContext context_for(const DiscreteDistribution& dist, long long n) {
  return MomentContext(dist.probs(), n);
}

MomentContext estimated_context(const SampleProfile& profile) {
  const EstimatedDistribution est = hybrid_phat(profile);
  std::vector<double> probs;
  probs.reserve(est.seen.size() + 4);
  for (const auto& [klass, p] : est.seen) {
    (void)klass;
    probs.push_back(p);
  }
  if (est.unseen_count > 0.0 && est.unseen_each > 0.0) {
    const long long u = static_cast<long long>(std::ceil(est.unseen_count));
    const double block = est.unseen_count * est.unseen_each;
    double assigned = 0.0;
    for (long long i = 0; i + 1 < u; ++i) {
      probs.push_back(est.unseen_each);
      assigned += est.unseen_each;
    }
    const double last = block - assigned;
    if (last > 0.0) probs.push_back(last);
  }
  return MomentContext(std::move(probs), profile.size());
}

double estimated_mse(const SampleProfile& profile, const LinearEstimator& est,
                     long long k) {
  const MomentContext ctx = estimated_context(profile);
  const auto components = ctx.estimator_mse(est, k);
  const double mse = LogPolicy::to_double(components.mse);
  // The decomposition is a squared error; tiny negatives are rounding.
  return std::max(0.0, mse);
}

}  // namespace masskit
