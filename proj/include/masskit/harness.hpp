#pragma once

// Experiment orchestration: the benchmark protocol across the six
// distributions, exact and Monte Carlo MSE measurement, effect sizes, and
// CSV/JSON result export. Every row is reproducible from (experiment id,
// master seed) through the documented seed-split chain in rng.hpp.

#include <string>
#include <vector>

#include "masskit/distributions.hpp"
#include "masskit/ga.hpp"

namespace masskit {

struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExperimentMode {
  kBiasCurve,
  kMseCompare,
  kEvolveCompare,
  kAdaptCompare,
  kOracleAudit,
};

ExperimentMode experiment_mode_from_name(const std::string& name);
std::string experiment_mode_name(ExperimentMode mode);

struct DistributionSpec {
  DistributionKind kind = DistributionKind::kUniform;
  double param = 0.0;  // zipf s or dirichlet a
  std::string label() const;
};

/// The six benchmark distributions: uniform, half-and-half, zipf(1),
/// zipf(0.5), dirichlet(1), dirichlet(0.5).
std::vector<DistributionSpec> benchmark_distributions();

struct ExperimentSpec {
  std::string id = "experiment";
  ExperimentMode mode = ExperimentMode::kMseCompare;
  std::vector<DistributionSpec> distributions = benchmark_distributions();
  long long support = 20;
  std::vector<long long> sample_sizes = {20};
  std::vector<long long> target_k = {0};
  long long replications = 50;
  uint64_t master_seed = 20240817;
  std::vector<long long> extension_factors = {2, 5, 10};  // adapt-compare
  long long monte_carlo_draws = 100000;                   // mse-compare fallback
  int workers = 1;
  GaConfig ga;  // seed is derived per replication from master_seed

  void validate() const;
};

struct ResultRow {
  std::string experiment;
  std::string distribution;
  long long support = 0;
  long long n = 0;
  long long k = 0;
  std::string estimator;
  std::string metric;  // one of: bias, variance, mse, a12, mse_ratio
  double value = 0.0;
  long long replications = 0;
  uint64_t seed = 0;
};

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& csv);

/// Vargha-Delaney effect size: P(X > Y) + 0.5 P(X = Y) over all pairs.
double vargha_delaney_a12(const std::vector<double>& xs, const std::vector<double>& ys);

std::vector<ResultRow> run_bias_curve(const ExperimentSpec& spec);
std::vector<ResultRow> run_mse_compare(const ExperimentSpec& spec);
std::vector<ResultRow> run_evolve_compare(const ExperimentSpec& spec);
std::vector<ResultRow> run_adapt_compare(const ExperimentSpec& spec);
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Gnuplot-friendly bias curve: space-separated columns with log10 magnitude
/// (blank for exact zeros/underflow).
std::string bias_curve_table(const ExperimentSpec& spec);

struct MonteCarloMse {
  double mse = 0.0;
  double standard_error = 0.0;
  long long draws = 0;
};

/// Squared error of the estimator against the realized mass over seeded
/// fresh samples.
MonteCarloMse monte_carlo_mse(const DiscreteDistribution& dist,
                              const LinearEstimator& est, long long k,
                              long long draws, uint64_t seed);

// Spec-file IO (JSON mirror of ExperimentSpec).
ExperimentSpec spec_from_json(const std::string& text);
std::string spec_to_json(const ExperimentSpec& spec);

struct AuditOutcome {
  long long checks = 0;
  long long failures = 0;
  std::string detail;  // JSON summary
};

/// Oracle cross-check grid: expectations, decomposition, variances,
/// covariances, and estimator MSE validated exactly against enumeration.
AuditOutcome run_oracle_audit(long long max_support, long long max_n);

// Derived per-purpose seeds (documented split function: chained mix_seed).
uint64_t derive_seed(uint64_t master, const std::string& experiment_id,
                     uint64_t purpose, uint64_t replication);

}  // namespace masskit
