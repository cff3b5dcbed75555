#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "masskit/moments.hpp"
#include "masskit/oracle.hpp"

using namespace masskit;

namespace {

const std::vector<Rational> kHalf = {Rational(1, 2), Rational(1, 2)};
const std::vector<Rational> kSkew3 = {Rational(1, 2), Rational(1, 3), Rational(1, 6)};

Rational oracle_joint(const OutcomeTable& seq, size_t S, size_t x, long long j,
                      long long i, size_t y, long long np, long long l) {
  return seq.exact_expectation([&](const std::vector<int>& o) {
    return Rational(sequence_prefix_counts(o, S, j)[x] == i &&
                            sequence_prefix_counts(o, S, np)[y] == l
                        ? 1
                        : 0);
  });
}

}  // namespace

TEST_CASE("joint indicator hand cases") {
  const ExactMomentContext ctx(kHalf, 2);
  CHECK(ctx.joint_indicator_expectation(0, 2, 1, 0, 2, 1) == Rational(1, 2));
  // Distinct classes cannot jointly exceed the sample.
  CHECK(ctx.joint_indicator_expectation(0, 2, 2, 1, 2, 1) == 0);
  // Same class across prefix sizes: first draw x, second draw x.
  CHECK(ctx.joint_indicator_expectation(0, 2, 2, 0, 1, 1) == Rational(1, 4));
  // Same class, same size, different counts: infeasible.
  CHECK(ctx.joint_indicator_expectation(0, 2, 1, 0, 2, 2) == 0);
}

TEST_CASE("joint indicator matches sequence enumeration on every branch") {
  for (const auto& probs : {kHalf, kSkew3}) {
    const long long n = 4;
    const auto seq = OutcomeTable::enumerate_sequences(probs, n);
    const ExactMomentContext ctx(probs, n);
    const size_t S = probs.size();
    for (size_t x = 0; x < S; ++x)
      for (size_t y = 0; y < S; ++y)
        for (long long j = 1; j <= n; ++j)
          for (long long np = 1; np <= n; ++np)
            for (long long i = 0; i <= j; ++i)
              for (long long l = 0; l <= np; ++l)
                CHECK(ctx.joint_indicator_expectation(x, j, i, y, np, l) ==
                      oracle_joint(seq, S, x, j, i, y, np, l));
  }
}

TEST_CASE("joint indicator symmetry and marginalization") {
  const ExactMomentContext ctx(kSkew3, 5);
  for (size_t x = 0; x < 3; ++x)
    for (size_t y = 0; y < 3; ++y)
      for (long long i = 0; i <= 4; ++i)
        for (long long l = 0; l <= 4; ++l)
          CHECK(ctx.joint_indicator_expectation(x, 4, i, y, 4, l) ==
                ctx.joint_indicator_expectation(y, 4, l, x, 4, i));

  // Summing the smaller-prefix count marginalizes exactly.
  const auto groups = group_classes(kSkew3);
  for (size_t x = 0; x < 3; ++x)
    for (long long i = 0; i <= 5; ++i) {
      Rational total = 0;
      for (long long l = 0; l <= 3; ++l)
        total += ctx.joint_indicator_expectation(x, 5, i, x, 3, l);
      const Rational marginal = Rational(binomial_exact(5, i)) *
                                pow_exact(kSkew3[x], i) *
                                pow_exact(1 - kSkew3[x], 5 - i);
      CHECK(total == marginal);
    }
}

TEST_CASE("variance of Phi hand cases") {
  const ExactMomentContext ctx(kHalf, 2);
  CHECK(ctx.variance_phi(1, 2) == 1);
  CHECK(ctx.variance_phi(2, 2) == Rational(1, 4));

  const MomentContext log_ctx(std::vector<double>{0.5, 0.5}, 2);
  CHECK(LogPolicy::to_double(log_ctx.variance_phi(1, 2)) == doctest::Approx(1.0));
  CHECK(LogPolicy::to_double(log_ctx.variance_phi(2, 2)) == doctest::Approx(0.25));
}

TEST_CASE("variance of the realized mass") {
  const ExactMomentContext ctx(kHalf, 2);
  CHECK(ctx.variance_mass(0) == Rational(1, 16));
  // k = n: M_n is p if one class fills the sample.
  const auto table = OutcomeTable::enumerate_compositions(kHalf, 2);
  const Rational e = table.exact_expectation(
      [&](const std::vector<int>& o) { return mass_of_counts(o, kHalf, 2); });
  const Rational e2 = table.exact_expectation([&](const std::vector<int>& o) {
    const Rational m = mass_of_counts(o, kHalf, 2);
    return m * m;
  });
  CHECK(ctx.variance_mass(2) == e2 - e * e);
}

TEST_CASE("variances and covariances match enumeration exactly") {
  for (const auto& probs : {kHalf, kSkew3}) {
    const long long n = 5;
    const auto seq = OutcomeTable::enumerate_sequences(probs, n);
    const ExactMomentContext ctx(probs, n);
    const size_t S = probs.size();
    for (long long i = 1; i <= n; ++i) {
      for (long long j = i; j <= n; ++j) {
        for (long long l = 1; l <= n; ++l) {
          for (long long m = l; m <= n; ++m) {
            const Rational want =
                seq.exact_expectation([&](const std::vector<int>& o) {
                  return Rational(phi_of_sequence_prefix(o, S, i, j)) *
                         phi_of_sequence_prefix(o, S, l, m);
                }) -
                seq.exact_expectation([&](const std::vector<int>& o) {
                  return Rational(phi_of_sequence_prefix(o, S, i, j));
                }) * seq.exact_expectation([&](const std::vector<int>& o) {
                  return Rational(phi_of_sequence_prefix(o, S, l, m));
                });
            CHECK(ctx.covariance_phi(i, j, l, m) == want);
          }
        }
        // Cov(Phi_i(j), M_k) for a couple of k values.
        for (long long k : {0LL, 2LL}) {
          const Rational want =
              seq.exact_expectation([&](const std::vector<int>& o) {
                return Rational(phi_of_sequence_prefix(o, S, i, j)) *
                       mass_of_counts(sequence_prefix_counts(o, S, n), probs, k);
              }) -
              seq.exact_expectation([&](const std::vector<int>& o) {
                return Rational(phi_of_sequence_prefix(o, S, i, j));
              }) * seq.exact_expectation([&](const std::vector<int>& o) {
                return mass_of_counts(sequence_prefix_counts(o, S, n), probs, k);
              });
          CHECK(ctx.covariance_phi_mass(i, j, k) == want);
        }
      }
      CHECK(ctx.covariance_phi(i, n, i, n) == ctx.variance_phi(i, n));
    }
  }
}

TEST_CASE("estimator MSE: hand value for Good-Turing on two fair classes") {
  const MomentContext ctx(std::vector<double>{0.5, 0.5}, 2);
  const auto c = ctx.estimator_mse(good_turing_linear(2, 0), 0);
  CHECK(LogPolicy::to_double(c.mse) == doctest::Approx(0.625));
  CHECK(LogPolicy::to_double(c.bias) == doctest::Approx(0.25));
  CHECK(LogPolicy::to_double(c.variance) == doctest::Approx(0.25));
  CHECK(LogPolicy::to_double(c.covariance) == doctest::Approx(-0.125));
  CHECK(LogPolicy::to_double(c.mass_variance) == doctest::Approx(0.0625));

  // Zero estimator: MSE = E[M0^2].
  const LinearEstimator zero(2, {});
  const auto z = ctx.estimator_mse(zero, 0);
  CHECK(LogPolicy::to_double(z.mse) ==
        doctest::Approx(0.0625 + 0.25 * 0.25));  // Var + E^2
}

TEST_CASE("MSE recomposes from its components") {
  const auto dist = make_distribution(DistributionKind::kZipf, 8, 1.0);
  const MomentContext ctx = context_for(dist, 12);
  for (long long k : {0LL, 1LL}) {
    for (const auto& est : {good_turing_linear(12, k), minimal_bias_linear(12, k)}) {
      const auto c = ctx.estimator_mse(est, k);
      const double recomposed =
          LogPolicy::to_double(c.bias) * LogPolicy::to_double(c.bias) +
          LogPolicy::to_double(c.variance) + LogPolicy::to_double(c.mass_variance) -
          2.0 * LogPolicy::to_double(c.covariance);
      CHECK(LogPolicy::to_double(c.mse) ==
            doctest::Approx(recomposed).epsilon(1e-12));
      CHECK(LogPolicy::to_double(c.mse) >= 0.0);
    }
  }
}

TEST_CASE("estimator MSE matches enumeration exactly, including prefix terms") {
  const auto probs = kSkew3;
  const long long n = 5;
  const auto seq = OutcomeTable::enumerate_sequences(probs, n);
  const ExactMomentContext ctx(probs, n);
  // A deliberately mixed estimator touching interior prefixes.
  const LinearEstimator est(
      n, {{1, 2, 0.75}, {2, 4, -0.25}, {1, 5, 0.2}, {3, 5, 1.5}});
  auto eval = [&](const std::vector<int>& o) {
    Rational v = 0;
    for (const auto& t : est.terms())
      v += rational_from_double(t.beta) *
           Rational(phi_of_sequence_prefix(o, probs.size(), t.i, t.j));
    return v;
  };
  const auto c = ctx.estimator_mse(est, 0);
  const Rational mse_oracle = seq.exact_expectation([&](const std::vector<int>& o) {
    const Rational d =
        eval(o) - mass_of_counts(sequence_prefix_counts(o, probs.size(), n), probs, 0);
    return d * d;
  });
  CHECK(c.mse == mse_oracle);
}

TEST_CASE("regression: variance of singletons and doubletons, uniform S=100") {
  const auto dist = make_distribution(DistributionKind::kUniform, 100);
  const MomentContext ctx100 = context_for(dist, 100);
  CHECK(ctx100.group_count() == 1);
  CHECK(LogPolicy::to_double(ctx100.variance_phi(1, 100)) ==
        doctest::Approx(23.37).epsilon(2e-4));
  CHECK(LogPolicy::to_double(ctx100.variance_phi(2, 100)) ==
        doctest::Approx(11.63).epsilon(5e-4));
  const MomentContext ctx200 = context_for(dist, 200);
  CHECK(LogPolicy::to_double(ctx200.variance_phi(1, 200)) ==
        doctest::Approx(16.04).epsilon(5e-4));
  CHECK(LogPolicy::to_double(ctx200.variance_phi(2, 200)) ==
        doctest::Approx(19.84).epsilon(5e-4));
}

TEST_CASE("regression: variance and MSE reference values for GT and B") {
  const auto dist = make_distribution(DistributionKind::kUniform, 100);
  const MomentContext ctx = context_for(dist, 100);
  const auto gt = ctx.estimator_mse(good_turing_linear(100, 0), 0);
  CHECK(LogPolicy::to_double(gt.variance) == doctest::Approx(2.3372e-3).epsilon(5e-5));
  const double gt_bias = LogPolicy::to_double(gt.bias);
  CHECK(gt_bias == doctest::Approx(3.6973e-3).epsilon(5e-5));
  // Reference MSE convention: squared bias plus estimator variance.
  CHECK(gt_bias * gt_bias + LogPolicy::to_double(gt.variance) ==
        doctest::Approx(2.3508e-3).epsilon(1e-4));

  const auto b = ctx.estimator_mse(minimal_bias_linear(100, 0), 0);
  CHECK(LogPolicy::to_double(b.variance) == doctest::Approx(2.3515e-3).epsilon(1e-4));
}

TEST_CASE("variance of the alternating estimator decays for uniform S=10") {
  std::vector<Rational> probs(10, Rational(1, 10));
  double prev = std::numeric_limits<double>::infinity();
  for (long long n = 10; n <= 20; ++n) {
    const ExactMomentContext ctx(probs, n);
    const auto c = ctx.estimator_mse(minimal_bias_linear(n, 0), 0);
    const double var = ExactPolicy::to_double(c.variance);
    CHECK(var < prev);
    CHECK(var <= 10.0 * static_cast<double>(n) * std::pow(0.9, n));
    prev = var;
  }
}

TEST_CASE("estimated context: unseen block layout") {
  // All-distinct sample: f0 = 6, block of 6 unseen classes.
  const auto prof = SampleProfile::from_sequence({0, 1, 2, 3});
  const MomentContext ctx = estimated_context(prof);
  CHECK(ctx.support() == 4 + 6);
  // Perfect coverage, no singletons: no unseen block at all.
  const auto covered = SampleProfile::from_sequence({0, 0, 1, 1});
  const MomentContext ctx2 = estimated_context(covered);
  CHECK(ctx2.support() == 2);
  CHECK(estimated_mse(covered, good_turing_linear(4, 0), 0) >= 0.0);
}

TEST_CASE("estimated MSE tracks the true MSE under good coverage") {
  // Seed 11538 draws exactly 100 of each class; the scale is so deep in the
  // tail ((1-p)^399 territory) that any count skew would exponentiate.
  const auto dist = make_distribution(DistributionKind::kUniform, 4);
  const auto prof = SampleProfile::draw(dist, 400, 11538);
  REQUIRE(prof.distinct() == 4);
  const auto est = good_turing_linear(400, 0);
  const double estimated = estimated_mse(prof, est, 0);
  const double truth =
      LogPolicy::to_double(context_for(dist, 400).estimator_mse(est, 0).mse);
  CHECK(estimated > 0.5 * truth);
  CHECK(estimated < 2.0 * truth);
}
