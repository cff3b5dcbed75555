#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "masskit/ground_truth.hpp"
#include "masskit/harness.hpp"
#include "masskit/oracle.hpp"

using namespace masskit;

namespace {

std::vector<ClassGroups<LogPolicy>> benchmark_groups(long long support) {
  std::vector<ClassGroups<LogPolicy>> out;
  for (const auto& ds : benchmark_distributions())
    out.push_back(group_classes(
        make_distribution(ds.kind, static_cast<size_t>(support), ds.param, 77)));
  return out;
}

}  // namespace

TEST_CASE("expected profile basics") {
  const auto uniform2 = group_classes(std::vector<double>{0.5, 0.5});
  // E[Phi_1(2)] for two fair classes: sequences ab/ba give 2, aa/bb give 0.
  CHECK(LogPolicy::to_double(expected_fk(uniform2, 2, 1)) == doctest::Approx(1.0));
  // f_n(n) collapses to sum p^n.
  CHECK(LogPolicy::to_double(expected_fk(uniform2, 3, 3)) == doctest::Approx(0.25));

  const auto uniform100 =
      group_classes(make_distribution(DistributionKind::kUniform, 100));
  CHECK(LogPolicy::to_double(expected_fk(uniform100, 100, 0)) ==
        doctest::Approx(36.6032).epsilon(1e-4));
}

TEST_CASE("expected mass basics") {
  const auto uniform2 = group_classes(std::vector<double>{0.5, 0.5});
  CHECK(LogPolicy::to_double(expected_mass(uniform2, 1, 0)) == doctest::Approx(0.5));
  CHECK(LogPolicy::to_double(expected_mass(uniform2, 2, 0)) == doctest::Approx(0.25));

  const auto uniform100 =
      group_classes(make_distribution(DistributionKind::kUniform, 100));
  CHECK(LogPolicy::to_double(expected_mass(uniform100, 100, 0)) ==
        doctest::Approx(std::pow(0.99, 100)).epsilon(1e-12));
}

TEST_CASE("series and remainder reassemble the expected mass") {
  const auto uniform2 = group_classes(std::vector<double>{0.5, 0.5});

  auto d = mass_decomposition(uniform2, 2, 0);
  CHECK(d.series.sign == 0);
  CHECK(LogPolicy::to_double(d.remainder) == doctest::Approx(0.25));

  d = mass_decomposition(uniform2, 1, 0);
  CHECK(LogPolicy::to_double(d.series) == doctest::Approx(1.0));
  CHECK(LogPolicy::to_double(d.remainder) == doctest::Approx(-0.5));

  // k = n: empty series, remainder sum_x p^(n+1) = 2 (1/2)^4.
  d = mass_decomposition(uniform2, 3, 3);
  CHECK(d.series.sign == 0);
  CHECK(LogPolicy::to_double(d.remainder) == doctest::Approx(0.125));

  for (const auto& groups : benchmark_groups(10)) {
    for (long long n : {3LL, 7LL, 12LL}) {
      for (long long k = 0; k <= n; ++k) {
        const auto dec = mass_decomposition(groups, n, k);
        const auto sum = dec.series + dec.remainder;
        CHECK(log_rel_close(sum, expected_mass(groups, n, k), 1e-9));
      }
    }
  }
}

TEST_CASE("exact-mode decomposition is exact") {
  const std::vector<Rational> probs = {Rational(1, 2), Rational(1, 3), Rational(1, 6)};
  const auto groups = group_classes(probs);
  for (long long n = 1; n <= 10; ++n)
    for (long long k = 0; k <= n; ++k) {
      const auto dec = mass_decomposition(groups, n, k);
      CHECK(dec.series + dec.remainder == expected_mass(groups, n, k));
    }
}

TEST_CASE("dependency identity holds through n = 30 on all benchmarks") {
  for (const auto& groups : benchmark_groups(20)) {
    for (long long n = 1; n <= 30; ++n) {
      for (long long k = 1; k <= n; ++k) {
        const auto lhs = g_value(groups, k, n);
        const auto rhs = g_value(groups, k, n + 1) + g_value(groups, k + 1, n + 1);
        CHECK(log_rel_close(lhs, rhs, 1e-10));
      }
    }
  }
}

TEST_CASE("expected profile sums to the support size") {
  for (const auto& groups : benchmark_groups(15)) {
    const auto prof = expected_profile(groups, 12);
    std::vector<LogWeight> terms(prof.f.begin(), prof.f.end());
    CHECK(LogPolicy::to_double(compensated_alternating_sum(terms)) ==
          doctest::Approx(15.0).epsilon(1e-10));
  }
}

TEST_CASE("regression: Good-Turing bias for uniform S=100") {
  const auto uniform100 =
      group_classes(make_distribution(DistributionKind::kUniform, 100));
  const double b100 =
      LogPolicy::to_double(analytic_bias(uniform100, 100, 0, EstimatorId::kGoodTuring));
  CHECK(b100 == doctest::Approx(3.6973e-3).epsilon(5e-5));
  const double b500 =
      LogPolicy::to_double(analytic_bias(uniform100, 500, 0, EstimatorId::kGoodTuring));
  CHECK(b500 == doctest::Approx(6.6369e-5).epsilon(5e-5));
  const double b1000 =
      LogPolicy::to_double(analytic_bias(uniform100, 1000, 0, EstimatorId::kGoodTuring));
  CHECK(b1000 == doctest::Approx(4.3607e-7).epsilon(5e-5));
}

TEST_CASE("regression: minimal-bias magnitude 1e-200 in log space") {
  const auto uniform100 =
      group_classes(make_distribution(DistributionKind::kUniform, 100));
  const auto bias = analytic_bias(uniform100, 100, 0, EstimatorId::kMinimalBias);
  CHECK(bias.log_mag / std::log(10.0) == doctest::Approx(-200.0).epsilon(1e-8));
}

TEST_CASE("Good-Turing bias respects the (k+2)/(n+1) bound") {
  SplitMix64 rng(515);
  const auto groups = benchmark_groups(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& g = groups[rng.next_below(groups.size())];
    const long long n = 2 + static_cast<long long>(rng.next_below(29));
    const long long k = static_cast<long long>(rng.next_below(n));  // k <= n-1
    const auto bias = analytic_bias(g, n, k, EstimatorId::kGoodTuring);
    const double bound = static_cast<double>(k + 2) / static_cast<double>(n + 1);
    CHECK(std::fabs(bias.value()) <= bound);
  }
}

TEST_CASE("minimal-bias magnitude is exactly the remainder, with its bound") {
  const std::vector<Rational> probs = {Rational(3, 5), Rational(1, 5), Rational(1, 5)};
  const auto groups = group_classes(probs);
  for (long long n = 1; n <= 9; ++n)
    for (long long k = 0; k <= n; ++k) {
      const Rational bias = analytic_bias(groups, n, k, EstimatorId::kMinimalBias);
      Rational magnitude = bias < 0 ? -bias : bias;
      Rational sum_pow = 0;
      for (const auto& p : probs) sum_pow += pow_exact(p, n + 1);
      CHECK(magnitude == Rational(binomial_exact(n, k)) * sum_pow);
      // |bias| <= C(n,k) S p_max^(n+1)
      CHECK(magnitude <=
            Rational(binomial_exact(n, k)) * 3 * pow_exact(Rational(3, 5), n + 1));
    }
}

TEST_CASE("simple-GT bias dominates minimal bias geometrically (uniform)") {
  for (size_t S : {3, 5, 10}) {
    const auto groups = group_classes(
        make_distribution(DistributionKind::kUniform, S));
    double prev_log_ratio = -std::numeric_limits<double>::infinity();
    for (long long n = 2; n <= 40; ++n) {
      const auto gt = analytic_bias(groups, n, 0, EstimatorId::kGoodTuringSimple);
      const auto mb = analytic_bias(groups, n, 0, EstimatorId::kMinimalBias);
      const double log_ratio = gt.log_magnitude() - mb.log_magnitude();
      if (n > 2) CHECK(log_ratio - prev_log_ratio > std::log(1.5));
      prev_log_ratio = log_ratio;
    }
  }
}

TEST_CASE("unknown estimator and bad ranges throw") {
  const auto uniform2 = group_classes(std::vector<double>{0.5, 0.5});
  CHECK_THROWS_AS(analytic_bias(uniform2, 3, 3, EstimatorId::kGoodTuring),
                  std::domain_error);
  CHECK_THROWS_AS(expected_fk(uniform2, 3, 4), std::domain_error);
  CHECK_THROWS_AS(expected_mass(uniform2, 3, -1), std::domain_error);
}
