#include "masskit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "masskit/oracle.hpp"

namespace masskit {

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

DiscreteDistribution realize(const DistributionSpec& ds, long long support,
                             uint64_t seed) {
  return make_distribution(ds.kind, static_cast<size_t>(support), ds.param, seed);
}

uint64_t cell_purpose(uint64_t stream, size_t dist_idx, long long n, long long k) {
  return mix_seed(mix_seed(mix_seed(stream, dist_idx), static_cast<uint64_t>(n)),
                  static_cast<uint64_t>(k));
}

void parallel_reps(long long count, int workers,
                   const std::function<void(long long)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (long long r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<long long> next{0};
  std::vector<std::thread> pool;
  const int use = std::min<long long>(workers, count);
  for (int w = 0; w < use; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long long r = next.fetch_add(1);
        if (r >= count) return;
        fn(r);
      }
    });
  }
  for (auto& t : pool) t.join();
}

double mean_of(const std::vector<double>& xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.result() / static_cast<double>(xs.size());
}

}  // namespace

std::string experiment_mode_name(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::kBiasCurve: return "bias-curve";
    case ExperimentMode::kMseCompare: return "mse-compare";
    case ExperimentMode::kEvolveCompare: return "evolve-compare";
    case ExperimentMode::kAdaptCompare: return "adapt-compare";
    case ExperimentMode::kOracleAudit: return "oracle-audit";
  }
  return "?";
}

ExperimentMode experiment_mode_from_name(const std::string& name) {
  if (name == "bias-curve") return ExperimentMode::kBiasCurve;
  if (name == "mse-compare") return ExperimentMode::kMseCompare;
  if (name == "evolve-compare") return ExperimentMode::kEvolveCompare;
  if (name == "adapt-compare") return ExperimentMode::kAdaptCompare;
  if (name == "oracle-audit") return ExperimentMode::kOracleAudit;
  throw SpecError("unknown experiment mode: " + name);
}

uint64_t derive_seed(uint64_t master, const std::string& experiment_id,
                     uint64_t purpose, uint64_t replication) {
  return mix_seed(mix_seed(mix_seed(master, fnv1a(experiment_id)), purpose),
                  replication);
}

std::string DistributionSpec::label() const {
  switch (kind) {
    case DistributionKind::kUniform: return "uniform";
    case DistributionKind::kHalfAndHalf: return "half-and-half";
    case DistributionKind::kZipf: {
      std::ostringstream s;
      s << "zipf-" << param;
      return s.str();
    }
    case DistributionKind::kDirichletPrior: {
      std::ostringstream s;
      s << "diri-" << param;
      return s.str();
    }
  }
  return "?";
}

std::vector<DistributionSpec> benchmark_distributions() {
  return {
      {DistributionKind::kUniform, 0.0},
      {DistributionKind::kHalfAndHalf, 0.0},
      {DistributionKind::kZipf, 1.0},
      {DistributionKind::kZipf, 0.5},
      {DistributionKind::kDirichletPrior, 1.0},
      {DistributionKind::kDirichletPrior, 0.5},
  };
}

void ExperimentSpec::validate() const {
  if (replications < 1) throw SpecError("spec: replications must be >= 1");
  if (support < 2) throw SpecError("spec: support must be >= 2");
  if (distributions.empty()) throw SpecError("spec: no distributions");
  if (sample_sizes.empty()) throw SpecError("spec: no sample sizes");
  if (target_k.empty()) throw SpecError("spec: no target k");
  for (long long n : sample_sizes)
    if (n < 1) throw SpecError("spec: sample sizes must be positive");
  for (long long k : target_k)
    if (k < 0) throw SpecError("spec: target k must be nonnegative");
  if (workers < 1) throw SpecError("spec: workers must be >= 1");
  ga.validate();
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "experiment,distribution,S,n,k,estimator,metric,value,replications,seed\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << r.experiment << ',' << r.distribution << ',' << r.support << ','
        << r.n << ',' << r.k << ',' << r.estimator << ',' << r.metric << ','
        << buf << ',' << r.replications << ',' << r.seed << '\n';
  }
  return out.str();
}

std::vector<ResultRow> rows_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw SpecError("csv: empty");
  std::vector<ResultRow> rows;
  static const std::vector<std::string> kMetrics = {"bias", "variance", "mse",
                                                    "a12", "mse_ratio"};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 10) throw SpecError("csv: malformed row: " + line);
    ResultRow r;
    r.experiment = fields[0];
    r.distribution = fields[1];
    r.support = std::stoll(fields[2]);
    r.n = std::stoll(fields[3]);
    r.k = std::stoll(fields[4]);
    r.estimator = fields[5];
    r.metric = fields[6];
    r.value = std::stod(fields[7]);
    r.replications = std::stoll(fields[8]);
    r.seed = std::stoull(fields[9]);
    if (std::find(kMetrics.begin(), kMetrics.end(), r.metric) == kMetrics.end())
      throw SpecError("csv: unknown metric: " + r.metric);
    if (!std::isfinite(r.value)) throw SpecError("csv: non-finite value");
    rows.push_back(std::move(r));
  }
  return rows;
}

double vargha_delaney_a12(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty())
    throw std::domain_error("vargha_delaney_a12: empty input");
  long long wins2 = 0;  // 2*wins + ties, to stay integral
  for (double x : xs)
    for (double y : ys) {
      if (x > y)
        wins2 += 2;
      else if (x == y)
        wins2 += 1;
    }
  return static_cast<double>(wins2) /
         (2.0 * static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

std::vector<ResultRow> run_bias_curve(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ResultRow> rows;
  for (size_t d = 0; d < spec.distributions.size(); ++d) {
    const auto& ds = spec.distributions[d];
    const uint64_t dist_seed =
        derive_seed(spec.master_seed, spec.id, cell_purpose(kStreamDistribution, d, 0, 0), 0);
    const DiscreteDistribution dist = realize(ds, spec.support, dist_seed);
    const auto groups = group_classes(dist);
    for (long long n : spec.sample_sizes) {
      for (long long k : spec.target_k) {
        if (k > n) continue;
        struct Entry {
          EstimatorId id;
          const char* name;
        };
        static constexpr Entry kEntries[] = {
            {EstimatorId::kGoodTuring, "GT"},
            {EstimatorId::kGoodTuringSimple, "GT-prime"},
            {EstimatorId::kMinimalBias, "B"},
        };
        for (const auto& e : kEntries) {
          if (e.id != EstimatorId::kMinimalBias && k + 1 > n) continue;
          const LogWeight bias = analytic_bias(groups, n, k, e.id);
          rows.push_back({spec.id, ds.label(), spec.support, n, k, e.name, "bias",
                          bias.value(), 1, dist_seed});
        }
      }
    }
  }
  return rows;
}

std::string bias_curve_table(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "# distribution S n k estimator sign log10_magnitude\n";
  for (size_t d = 0; d < spec.distributions.size(); ++d) {
    const auto& ds = spec.distributions[d];
    const uint64_t dist_seed =
        derive_seed(spec.master_seed, spec.id, cell_purpose(kStreamDistribution, d, 0, 0), 0);
    const DiscreteDistribution dist = realize(ds, spec.support, dist_seed);
    const auto groups = group_classes(dist);
    for (long long n : spec.sample_sizes) {
      for (long long k : spec.target_k) {
        if (k > n) continue;
        const struct {
          EstimatorId id;
          const char* name;
        } entries[] = {{EstimatorId::kGoodTuring, "GT"},
                       {EstimatorId::kMinimalBias, "B"}};
        for (const auto& e : entries) {
          if (e.id == EstimatorId::kGoodTuring && k + 1 > n) continue;
          const LogWeight bias = analytic_bias(groups, n, k, e.id);
          out << ds.label() << ' ' << spec.support << ' ' << n << ' ' << k << ' '
              << e.name << ' ' << bias.sign << ' ';
          if (bias.sign == 0)
            out << (bias.underflow ? "underflow" : "-inf");
          else
            out << bias.log_mag / std::log(10.0);
          out << '\n';
        }
      }
    }
  }
  return out.str();
}

MonteCarloMse monte_carlo_mse(const DiscreteDistribution& dist,
                              const LinearEstimator& est, long long k,
                              long long draws, uint64_t seed) {
  if (draws < 2) throw std::domain_error("monte_carlo_mse: needs >= 2 draws");
  CompensatedSum sum, sum_sq;
  for (long long r = 0; r < draws; ++r) {
    const SampleProfile sample =
        SampleProfile::draw(dist, est.sample_size(), mix_seed(seed, r));
    const double err = est.evaluate(sample) - realized_mass(dist, sample, k);
    const double sq = err * err;
    sum.add(sq);
    sum_sq.add(sq * sq);
  }
  MonteCarloMse out;
  out.draws = draws;
  out.mse = sum.result() / static_cast<double>(draws);
  const double var =
      std::max(0.0, sum_sq.result() / static_cast<double>(draws) - out.mse * out.mse);
  out.standard_error = std::sqrt(var / static_cast<double>(draws));
  return out;
}

std::vector<ResultRow> run_mse_compare(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ResultRow> rows;
  for (size_t d = 0; d < spec.distributions.size(); ++d) {
    const auto& ds = spec.distributions[d];
    const uint64_t dist_seed =
        derive_seed(spec.master_seed, spec.id, cell_purpose(kStreamDistribution, d, 0, 0), 0);
    const DiscreteDistribution dist = realize(ds, spec.support, dist_seed);
    for (long long n : spec.sample_sizes) {
      const MomentContext ctx = context_for(dist, n);
      for (long long k : spec.target_k) {
        if (k + 1 > n) continue;
        const struct {
          LinearEstimator est;
          const char* name;
        } entries[] = {
            {good_turing_linear(n, k), "GT"},
            {minimal_bias_linear(n, k), "B"},
        };
        for (const auto& e : entries) {
          // Exact moments are tractable for grouped benchmark distributions;
          // fall back to Monte Carlo when the covariance grid would blow up.
          const double terms = static_cast<double>(e.est.terms().size());
          const double cost = terms * terms * static_cast<double>(ctx.group_count()) *
                              static_cast<double>(ctx.group_count()) *
                              static_cast<double>(n);
          if (cost < 5e9) {
            const auto c = ctx.estimator_mse(e.est, k);
            rows.push_back({spec.id, ds.label(), spec.support, n, k, e.name, "bias",
                            LogPolicy::to_double(c.bias), 1, dist_seed});
            rows.push_back({spec.id, ds.label(), spec.support, n, k, e.name,
                            "variance", LogPolicy::to_double(c.variance), 1,
                            dist_seed});
            rows.push_back({spec.id, ds.label(), spec.support, n, k, e.name, "mse",
                            LogPolicy::to_double(c.mse), 1, dist_seed});
          } else {
            const uint64_t mc_seed = derive_seed(
                spec.master_seed, spec.id, cell_purpose(kStreamMonteCarlo, d, n, k), 0);
            const auto mc =
                monte_carlo_mse(dist, e.est, k, spec.monte_carlo_draws, mc_seed);
            rows.push_back({spec.id, ds.label(), spec.support, n, k, e.name, "mse",
                            mc.mse, mc.draws, mc_seed});
          }
        }
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_evolve_compare(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ResultRow> rows;
  for (size_t d = 0; d < spec.distributions.size(); ++d) {
    const auto& ds = spec.distributions[d];
    const bool fresh_dist = ds.kind == DistributionKind::kDirichletPrior;
    for (long long n : spec.sample_sizes) {
      for (long long k : spec.target_k) {
        if (k + 1 > n) continue;
        std::vector<double> gt_mse(spec.replications), evo_mse(spec.replications);
        parallel_reps(spec.replications, spec.workers, [&](long long r) {
          const uint64_t ds_seed = derive_seed(
              spec.master_seed, spec.id, cell_purpose(kStreamDistribution, d, n, k),
              fresh_dist ? static_cast<uint64_t>(r) : 0);
          const DiscreteDistribution dist = realize(ds, spec.support, ds_seed);
          const uint64_t sample_seed = derive_seed(
              spec.master_seed, spec.id, cell_purpose(kStreamSample, d, n, k),
              static_cast<uint64_t>(r));
          const SampleProfile sample = SampleProfile::draw(dist, n, sample_seed);
          GaConfig ga = spec.ga;
          ga.seed = derive_seed(spec.master_seed, spec.id,
                                cell_purpose(kStreamGa, d, n, k),
                                static_cast<uint64_t>(r));
          ga.workers = 1;  // replication-level parallelism only
          const EvolveResult evolved = evolve(sample, k, ga);
          const MomentContext truth = context_for(dist, n);
          gt_mse[static_cast<size_t>(r)] = LogPolicy::to_double(
              truth.estimator_mse(good_turing_linear(n, k), k).mse);
          evo_mse[static_cast<size_t>(r)] = LogPolicy::to_double(
              truth.estimator_mse(instantiate(evolved.best.rep), k).mse);
        });
        const double a12 = vargha_delaney_a12(gt_mse, evo_mse);
        const double ratio = mean_of(evo_mse) / mean_of(gt_mse);
        const uint64_t cell_seed = derive_seed(
            spec.master_seed, spec.id, cell_purpose(kStreamSample, d, n, k), 0);
        rows.push_back({spec.id, ds.label(), spec.support, n, k, "GT", "mse",
                        mean_of(gt_mse), spec.replications, cell_seed});
        rows.push_back({spec.id, ds.label(), spec.support, n, k, "evolved", "mse",
                        mean_of(evo_mse), spec.replications, cell_seed});
        rows.push_back({spec.id, ds.label(), spec.support, n, k, "evolved", "a12",
                        a12, spec.replications, cell_seed});
        rows.push_back({spec.id, ds.label(), spec.support, n, k, "evolved",
                        "mse_ratio", ratio, spec.replications, cell_seed});
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_adapt_compare(const ExperimentSpec& spec) {
  spec.validate();
  for (long long k : spec.target_k)
    if (k != 0) throw SpecError("adapt-compare: only k = 0 is defined");
  std::vector<ResultRow> rows;
  for (size_t d = 0; d < spec.distributions.size(); ++d) {
    const auto& ds = spec.distributions[d];
    const bool fresh_dist = ds.kind == DistributionKind::kDirichletPrior;
    for (long long n : spec.sample_sizes) {
      for (long long c : spec.extension_factors) {
        const long long m = c * n;
        std::vector<double> gt_sq(spec.replications), adapted_sq(spec.replications);
        std::atomic<long long> invalid{0};
        parallel_reps(spec.replications, spec.workers, [&](long long r) {
          const uint64_t ds_seed = derive_seed(
              spec.master_seed, spec.id, cell_purpose(kStreamDistribution, d, n, c),
              fresh_dist ? static_cast<uint64_t>(r) : 0);
          const DiscreteDistribution dist = realize(ds, spec.support, ds_seed);
          const uint64_t sample_seed = derive_seed(
              spec.master_seed, spec.id, cell_purpose(kStreamSample, d, n, c),
              static_cast<uint64_t>(r));
          const SampleProfile sample = SampleProfile::draw(dist, n, sample_seed);
          GaConfig ga = spec.ga;
          ga.seed = derive_seed(spec.master_seed, spec.id,
                                cell_purpose(kStreamGa, d, n, c),
                                static_cast<uint64_t>(r));
          ga.workers = 1;
          const EvolveResult evolved = evolve(sample, 0, ga);
          const Representation shifted = adapt_representation(evolved.best.rep, m);
          if (!validate_representation(shifted).valid) ++invalid;
          const LinearEstimator adapted = adapt_to_larger_sample(evolved.best.rep, m);
          // Extending the sample re-draws from the same stream: the first n
          // draws are identical by the counter-based generator contract.
          const SampleProfile extended = SampleProfile::draw(dist, m, sample_seed);
          const double truth = realized_mass(dist, extended, 0);
          const double e_adapted = adapted.evaluate(extended) - truth;
          const double e_gt =
              good_turing_linear(m, 0).evaluate(extended) - truth;
          adapted_sq[static_cast<size_t>(r)] = e_adapted * e_adapted;
          gt_sq[static_cast<size_t>(r)] = e_gt * e_gt;
        });
        if (invalid > 0)
          throw std::runtime_error("adapt-compare: adapted representation failed validation");
        const uint64_t cell_seed = derive_seed(
            spec.master_seed, spec.id, cell_purpose(kStreamSample, d, n, c), 0);
        rows.push_back({spec.id, ds.label(), spec.support, m, 0, "GT", "mse",
                        mean_of(gt_sq), spec.replications, cell_seed});
        rows.push_back({spec.id, ds.label(), spec.support, m, 0, "adapted", "mse",
                        mean_of(adapted_sq), spec.replications, cell_seed});
        rows.push_back({spec.id, ds.label(), spec.support, m, 0, "adapted",
                        "mse_ratio", mean_of(adapted_sq) / mean_of(gt_sq),
                        spec.replications, cell_seed});
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  switch (spec.mode) {
    case ExperimentMode::kBiasCurve: return run_bias_curve(spec);
    case ExperimentMode::kMseCompare: return run_mse_compare(spec);
    case ExperimentMode::kEvolveCompare: return run_evolve_compare(spec);
    case ExperimentMode::kAdaptCompare: return run_adapt_compare(spec);
    case ExperimentMode::kOracleAudit: {
      const AuditOutcome audit = run_oracle_audit(3, 5);
      std::vector<ResultRow> rows;
      rows.push_back({spec.id, "oracle", 0, 0, 0, "audit", "mse",
                      static_cast<double>(audit.failures), audit.checks,
                      spec.master_seed});
      return rows;
    }
  }
  throw SpecError("unknown mode");
}

ExperimentSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("spec: invalid JSON: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (j.contains("id")) spec.id = j["id"].get<std::string>();
    if (j.contains("mode")) spec.mode = experiment_mode_from_name(j["mode"].get<std::string>());
    if (j.contains("distributions")) {
      spec.distributions.clear();
      for (const auto& dj : j["distributions"]) {
        DistributionSpec ds;
        ds.kind = distribution_kind_from_name(dj.at("kind").get<std::string>());
        if (dj.contains("param")) ds.param = dj["param"].get<double>();
        spec.distributions.push_back(ds);
      }
    }
    if (j.contains("support")) spec.support = j["support"].get<long long>();
    if (j.contains("sample_sizes"))
      spec.sample_sizes = j["sample_sizes"].get<std::vector<long long>>();
    if (j.contains("target_k"))
      spec.target_k = j["target_k"].get<std::vector<long long>>();
    if (j.contains("replications"))
      spec.replications = j["replications"].get<long long>();
    if (j.contains("master_seed"))
      spec.master_seed = j["master_seed"].get<uint64_t>();
    if (j.contains("extension_factors"))
      spec.extension_factors = j["extension_factors"].get<std::vector<long long>>();
    if (j.contains("monte_carlo_draws"))
      spec.monte_carlo_draws = j["monte_carlo_draws"].get<long long>();
    if (j.contains("workers")) spec.workers = j["workers"].get<int>();
    if (j.contains("ga")) {
      const auto& gj = j["ga"];
      if (gj.contains("generations")) spec.ga.generations = gj["generations"].get<int>();
      if (gj.contains("max_generations"))
        spec.ga.max_generations = gj["max_generations"].get<int>();
      if (gj.contains("mutant_size")) spec.ga.mutant_size = gj["mutant_size"].get<int>();
      if (gj.contains("tournament")) spec.ga.tournament = gj["tournament"].get<int>();
      if (gj.contains("elite_count")) spec.ga.elite_count = gj["elite_count"].get<int>();
      if (gj.contains("term_cap")) spec.ga.term_cap = gj["term_cap"].get<int>();
      if (gj.contains("improvement_factor"))
        spec.ga.improvement_factor = gj["improvement_factor"].get<double>();
      if (gj.contains("extension_rule")) {
        const std::string rule = gj["extension_rule"].get<std::string>();
        if (rule == "verbatim")
          spec.ga.extension_rule = ExtensionRule::kVerbatim;
        else if (rule == "stagnation")
          spec.ga.extension_rule = ExtensionRule::kStagnation;
        else
          throw SpecError("spec: unknown extension_rule: " + rule);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["id"] = spec.id;
  j["mode"] = experiment_mode_name(spec.mode);
  j["distributions"] = nlohmann::json::array();
  for (const auto& ds : spec.distributions) {
    nlohmann::json dj;
    dj["kind"] = distribution_kind_name(ds.kind);
    if (ds.param != 0.0) dj["param"] = ds.param;
    j["distributions"].push_back(dj);
  }
  j["support"] = spec.support;
  j["sample_sizes"] = spec.sample_sizes;
  j["target_k"] = spec.target_k;
  j["replications"] = spec.replications;
  j["master_seed"] = spec.master_seed;
  j["extension_factors"] = spec.extension_factors;
  j["monte_carlo_draws"] = spec.monte_carlo_draws;
  j["workers"] = spec.workers;
  j["ga"] = {
      {"generations", spec.ga.generations},
      {"max_generations", spec.ga.max_generations},
      {"mutant_size", spec.ga.mutant_size},
      {"tournament", spec.ga.tournament},
      {"elite_count", spec.ga.elite_count},
      {"term_cap", spec.ga.term_cap},
      {"improvement_factor", spec.ga.improvement_factor},
      {"extension_rule",
       spec.ga.extension_rule == ExtensionRule::kVerbatim ? "verbatim" : "stagnation"},
  };
  return j.dump(2);
}

namespace {

std::vector<std::vector<Rational>> audit_distributions(long long max_support) {
  std::vector<std::vector<Rational>> dists;
  auto rat = [](long long num, long long den) { return Rational(num) / den; };
  dists.push_back({rat(1, 2), rat(1, 2)});
  dists.push_back({rat(1, 3), rat(2, 3)});
  dists.push_back({rat(1, 4), rat(3, 4)});
  dists.push_back({rat(1, 5), rat(4, 5)});
  dists.push_back({rat(2, 5), rat(3, 5)});
  dists.push_back({rat(1, 6), rat(5, 6)});
  dists.push_back({rat(1, 10), rat(9, 10)});
  if (max_support >= 3) {
    dists.push_back({rat(1, 3), rat(1, 3), rat(1, 3)});
    dists.push_back({rat(1, 2), rat(1, 3), rat(1, 6)});
    dists.push_back({rat(1, 2), rat(1, 4), rat(1, 4)});
    dists.push_back({rat(3, 5), rat(1, 5), rat(1, 5)});
    dists.push_back({rat(1, 2), rat(3, 10), rat(1, 5)});
    dists.push_back({rat(2, 3), rat(1, 6), rat(1, 6)});
    dists.push_back({rat(5, 8), rat(1, 4), rat(1, 8)});
    dists.push_back({rat(7, 10), rat(1, 5), rat(1, 10)});
    dists.push_back({rat(4, 7), rat(2, 7), rat(1, 7)});
    dists.push_back({rat(1, 2), rat(2, 5), rat(1, 10)});
    dists.push_back({rat(3, 4), rat(1, 8), rat(1, 8)});
    dists.push_back({rat(2, 5), rat(2, 5), rat(1, 5)});
    dists.push_back({rat(6, 11), rat(3, 11), rat(2, 11)});
    dists.push_back({rat(9, 13), rat(3, 13), rat(1, 13)});
  }
  if (max_support >= 4)
    dists.push_back({rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)});
  return dists;
}

}  // namespace

AuditOutcome run_oracle_audit(long long max_support, long long max_n) {
  if (max_support < 2 || max_n < 1)
    throw std::domain_error("audit: needs max_support >= 2 and max_n >= 1");
  // Refuse oversized grids before doing any work.
  constexpr long long kBudget = 2'000'000;
  const BigInt largest = binomial_exact(max_n + max_support - 1, max_support - 1);
  if (largest > kBudget)
    throw BudgetExceeded("audit grid needs " + largest.str() +
                         " compositions at n=" + std::to_string(max_n) +
                         ", budget is " + std::to_string(kBudget));

  AuditOutcome out;
  nlohmann::json detail;
  long long exp_checks = 0, var_checks = 0, joint_checks = 0, mse_checks = 0;

  const auto dists = audit_distributions(max_support);
  SplitMix64 rep_rng(0x0A1D17);
  long long random_reps_done = 0;

  for (size_t di = 0; di < dists.size(); ++di) {
    const auto& probs = dists[di];
    const auto groups = group_classes(probs);

    for (long long n = 1; n <= max_n; ++n) {
      const OutcomeTable table = OutcomeTable::enumerate_compositions(probs, n);
      const ExactMomentContext ctx(probs, n);
      for (long long k = 0; k <= n; ++k) {
        // E[Phi_k] and E[M_k] against enumeration; the series-plus-remainder
        // decomposition against E[M_k] as exact algebra.
        const Rational fk = table.exact_expectation(
            [&](const std::vector<int>& o) { return Rational(phi_of_counts(o, k)); });
        const Rational mk = table.exact_expectation(
            [&](const std::vector<int>& o) { return mass_of_counts(o, probs, k); });
        ++exp_checks;
        if (fk != expected_fk(groups, n, k)) ++out.failures;
        ++exp_checks;
        if (mk != expected_mass(groups, n, k)) ++out.failures;
        const auto decomp = mass_decomposition(groups, n, k);
        ++exp_checks;
        if (decomp.series + decomp.remainder != mk) ++out.failures;

        if (k >= 1) {
          const Rational var_oracle =
              table.exact_expectation([&](const std::vector<int>& o) {
                const Rational phi(phi_of_counts(o, k));
                return phi * phi;
              }) -
              fk * fk;
          ++var_checks;
          if (var_oracle != ctx.variance_phi(k, n)) ++out.failures;
        }
        const Rational mass_var_oracle =
            table.exact_expectation([&](const std::vector<int>& o) {
              const Rational m = mass_of_counts(o, probs, k);
              return m * m;
            }) -
            mk * mk;
        ++var_checks;
        if (mass_var_oracle != ctx.variance_mass(k)) ++out.failures;
      }
    }

    // Joint indicator expectations across every case branch, on sequences.
    // One pass over the outcomes accumulates every (x,j,i,y,n',l) cell.
    const long long nj = std::min<long long>(4, max_n);
    if (nj >= 2) {
      const OutcomeTable seq = OutcomeTable::enumerate_sequences(probs, nj);
      const ExactMomentContext ctx(probs, nj);
      const size_t S = probs.size();
      const size_t counts_dim = static_cast<size_t>(nj + 1);
      auto cell = [&](size_t x, long long j, long long i, size_t y, long long np,
                      long long l) {
        return ((((x * S + y) * counts_dim + static_cast<size_t>(j)) * counts_dim +
                 static_cast<size_t>(np)) *
                    counts_dim +
                static_cast<size_t>(i)) *
                   counts_dim +
               static_cast<size_t>(l);
      };
      std::vector<Rational> oracle(S * S * counts_dim * counts_dim * counts_dim *
                                   counts_dim);
      for (size_t o = 0; o < seq.outcome_count(); ++o) {
        // counts_at[j][x] = N_x(j)
        std::vector<std::vector<int>> counts_at(counts_dim, std::vector<int>(S, 0));
        for (long long j = 1; j <= nj; ++j) {
          counts_at[static_cast<size_t>(j)] = counts_at[static_cast<size_t>(j - 1)];
          ++counts_at[static_cast<size_t>(j)]
                     [static_cast<size_t>(seq.outcome(o)[static_cast<size_t>(j - 1)])];
        }
        for (size_t x = 0; x < S; ++x)
          for (size_t y = 0; y < S; ++y)
            for (long long j = 1; j <= nj; ++j)
              for (long long np = 1; np <= nj; ++np)
                oracle[cell(x, j, counts_at[static_cast<size_t>(j)][x], y, np,
                            counts_at[static_cast<size_t>(np)][y])] += seq.weight(o);
      }
      for (size_t x = 0; x < S; ++x)
        for (size_t y = 0; y < S; ++y)
          for (long long j = 1; j <= nj; ++j)
            for (long long np = 1; np <= nj; ++np)
              for (long long i = 0; i <= j; ++i)
                for (long long l = 0; l <= np; ++l) {
                  ++joint_checks;
                  if (oracle[cell(x, j, i, y, np, l)] !=
                      ctx.joint_indicator_expectation(x, j, i, y, np, l))
                    ++out.failures;
                }
    }

    // Full MSE decomposition for GT, the minimal-bias estimator, and random
    // valid representations, on sequences. One scan per estimator gathers
    // every moment the decomposition needs.
    const long long nm = std::min<long long>(6, max_n);
    if (nm >= 2) {
      const OutcomeTable seq = OutcomeTable::enumerate_sequences(probs, nm);
      const ExactMomentContext ctx(probs, nm);
      std::vector<std::pair<long long, LinearEstimator>> estimators;
      estimators.emplace_back(0, good_turing_linear(nm, 0));
      estimators.emplace_back(0, minimal_bias_linear(nm, 0));
      estimators.emplace_back(1, good_turing_linear(nm, 1));
      while (random_reps_done < 20 && estimators.size() < 6) {
        Representation rep = initial_representation(nm, 0);
        const int chain = 1 + static_cast<int>(rep_rng.next_below(8));
        for (int step = 0; step < chain; ++step) rep = mutate(rep, rep_rng, 20);
        estimators.emplace_back(0, instantiate(rep));
        ++random_reps_done;
      }
      for (const auto& [k, est] : estimators) {
        const auto c = ctx.estimator_mse(est, k);
        Rational e_est = 0, e_est2 = 0, e_mass = 0, e_cross = 0, e_sq = 0;
        for (size_t o = 0; o < seq.outcome_count(); ++o) {
          const auto& outcome = seq.outcome(o);
          Rational v = 0;
          for (const auto& t : est.terms())
            v += rational_from_double(t.beta) *
                 Rational(phi_of_sequence_prefix(outcome, probs.size(), t.i, t.j));
          const Rational m = mass_of_counts(
              sequence_prefix_counts(outcome, probs.size(), nm), probs, k);
          const Rational& w = seq.weight(o);
          e_est += w * v;
          e_est2 += w * v * v;
          e_mass += w * m;
          e_cross += w * v * m;
          e_sq += w * (v - m) * (v - m);
        }
        ++mse_checks;
        if (c.bias != e_est - e_mass) ++out.failures;
        ++mse_checks;
        if (c.variance != e_est2 - e_est * e_est) ++out.failures;
        ++mse_checks;
        if (c.covariance != e_cross - e_est * e_mass) ++out.failures;
        ++mse_checks;
        if (c.mse != e_sq) ++out.failures;
      }
    }
  }

  out.checks = exp_checks + var_checks + joint_checks + mse_checks;
  detail["distributions"] = dists.size();
  detail["expectation_checks"] = exp_checks;
  detail["variance_checks"] = var_checks;
  detail["joint_checks"] = joint_checks;
  detail["mse_checks"] = mse_checks;
  detail["random_representations"] = random_reps_done;
  detail["failures"] = out.failures;
  out.detail = detail.dump(2);
  return out;
}

}  // namespace masskit
