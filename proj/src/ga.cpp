#include "masskit/ga.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace masskit {

void GaConfig::validate() const {
  if (generations < 1 || max_generations < generations || mutant_size < 1 ||
      tournament < 1 || elite_count < 1 || term_cap < 1 ||
      !(improvement_factor > 0.0) || workers < 1)
    throw std::domain_error("GaConfig: invalid hyperparameters");
}

Representation mutate(const Representation& rep, SplitMix64& rng, int term_cap) {
  constexpr int kMaxRetries = 16;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    const auto& coeffs = rep.coeffs();
    if (coeffs.empty()) return rep;
    auto it = coeffs.begin();
    std::advance(it, static_cast<long long>(rng.next_below(coeffs.size())));
    const double delta = rng.next_open();
    static constexpr IdentityKind kMoves[] = {
        IdentityKind::kDown, IdentityKind::kUpMinus, IdentityKind::kLeftUp};
    const IdentityKind move = kMoves[rng.next_below(3)];
    try {
      Representation child = split_and_rewrite(rep, it->first, delta, move);
      if (child.term_count() <= static_cast<size_t>(term_cap)) return child;
    } catch (const std::domain_error&) {
      // out-of-domain rewrite; resample
    }
  }
  return rep;
}

namespace {

struct ScoredIndividual {
  Individual ind;
  uint64_t hash = 0;
};

bool better(const ScoredIndividual& a, const ScoredIndividual& b) {
  if (a.ind.fitness != b.ind.fitness) return a.ind.fitness < b.ind.fitness;
  if (a.ind.rep.term_count() != b.ind.rep.term_count())
    return a.ind.rep.term_count() < b.ind.rep.term_count();
  return a.ind.lineage_id < b.ind.lineage_id;
}

class FitnessCache {
 public:
  explicit FitnessCache(const MomentContext& ctx, long long k) : ctx_(ctx), k_(k) {}

  double evaluate(const Representation& rep, uint64_t* hash_out) {
    const LinearEstimator est = instantiate(rep);
    const uint64_t h = est.content_hash();
    if (hash_out) *hash_out = h;
    {
      std::lock_guard<std::mutex> lock(mu_);
      const auto it = memo_.find(h);
      if (it != memo_.end()) return it->second;
    }
    const auto components = ctx_.estimator_mse(est, k_);
    double mse = LogPolicy::to_double(components.mse);
    if (!std::isfinite(mse)) mse = std::numeric_limits<double>::max();
    mse = std::max(0.0, mse);
    std::lock_guard<std::mutex> lock(mu_);
    memo_.emplace(h, mse);
    return mse;
  }

 private:
  const MomentContext& ctx_;
  long long k_;
  std::mutex mu_;
  std::unordered_map<uint64_t, double> memo_;
};

void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int use = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(static_cast<size_t>(use));
  for (int w = 0; w < use; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

EvolveResult evolve(const SampleProfile& profile, long long k, const GaConfig& config) {
  config.validate();
  if (profile.size() < 2) throw std::domain_error("evolve: requires n >= 2");
  const auto t0 = std::chrono::steady_clock::now();

  const MomentContext ctx = estimated_context(profile);
  FitnessCache fitness(ctx, k);

  uint64_t next_lineage = 0;
  auto make_individual = [&](Representation rep) {
    ScoredIndividual s;
    s.ind.rep = std::move(rep);
    s.ind.lineage_id = next_lineage++;
    return s;
  };

  const Representation r0 = initial_representation(profile.size(), k);
  std::vector<ScoredIndividual> population;
  population.push_back(make_individual(r0));
  population[0].ind.fitness = fitness.evaluate(population[0].ind.rep,
                                               &population[0].hash);

  const double f0 = population[0].ind.fitness;
  double f_best = f0;
  ScoredIndividual best = population[0];

  EvolveResult result;
  long long limit = config.generations;
  long long g = 0;
  while (g < limit) {
    ++g;
    const uint64_t gen_seed = mix_seed(mix_seed(config.seed, kStreamGa), g);

    // Tournament-select m parents (with replacement), then mutate each with
    // its own slot stream so parallelism cannot change the draw sequence.
    std::vector<ScoredIndividual> next_pop;
    next_pop.reserve(static_cast<size_t>(config.mutant_size) + 1 +
                     static_cast<size_t>(config.elite_count));
    SplitMix64 select_rng(mix_seed(gen_seed, 0x5E1EC7));
    for (int s = 0; s < config.mutant_size; ++s) {
      size_t pick = select_rng.next_below(population.size());
      for (int t = 1; t < config.tournament; ++t) {
        const size_t other = select_rng.next_below(population.size());
        if (better(population[other], population[pick])) pick = other;
      }
      SplitMix64 slot_rng(mix_seed(gen_seed, 0x707 + static_cast<uint64_t>(s)));
      next_pop.push_back(
          make_individual(mutate(population[pick].ind.rep, slot_rng, config.term_cap)));
    }
    next_pop.push_back(make_individual(r0));
    {
      std::vector<const ScoredIndividual*> sorted;
      sorted.reserve(population.size());
      for (const auto& ind : population) sorted.push_back(&ind);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto* a, const auto* b) { return better(*a, *b); });
      const size_t elite =
          std::min<size_t>(sorted.size(), static_cast<size_t>(config.elite_count));
      for (size_t e = 0; e < elite; ++e) {
        ScoredIndividual copy = *sorted[e];
        copy.ind.lineage_id = next_lineage++;
        next_pop.push_back(std::move(copy));
      }
    }

    parallel_for(next_pop.size(), config.workers, [&](size_t idx) {
      next_pop[idx].ind.fitness =
          fitness.evaluate(next_pop[idx].ind.rep, &next_pop[idx].hash);
    });
    population = std::move(next_pop);

    const ScoredIndividual* gen_best = &population[0];
    for (const auto& ind : population)
      if (better(ind, *gen_best)) gen_best = &ind;
    if (better(*gen_best, best)) best = *gen_best;
    const double f_g = gen_best->ind.fitness;
    result.history.push_back(f_g);

    if (g == limit && limit < config.max_generations) {
      const bool extend =
          config.extension_rule == ExtensionRule::kVerbatim
              ? (f_g == f0 || f_best > config.improvement_factor * f_g)
              : (f_g == f0 || f_g < config.improvement_factor * f_best);
      if (extend) {
        limit = std::min<long long>(limit + config.generations,
                                    config.max_generations);
        f_best = f_g;
      }
    }
  }

  result.best = best.ind;
  result.generations_run = g;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.extension_rule =
      config.extension_rule == ExtensionRule::kVerbatim ? "verbatim" : "stagnation";
  return result;
}

std::string manifest_json(const GaConfig& config, const EvolveResult& result) {
  nlohmann::json j;
  j["config"] = {
      {"generations", config.generations},
      {"max_generations", config.max_generations},
      {"mutant_size", config.mutant_size},
      {"tournament", config.tournament},
      {"elite_count", config.elite_count},
      {"term_cap", config.term_cap},
      {"improvement_factor", config.improvement_factor},
      {"seed", config.seed},
      {"extension_rule", result.extension_rule},
      {"workers", config.workers},
  };
  j["generations_run"] = result.generations_run;
  j["wall_seconds"] = result.wall_seconds;
  j["best_fitness"] = result.best.fitness;
  j["best_terms"] = result.best.rep.term_count();
  j["history"] = result.history;
  j["extension_rule_note"] =
      "verbatim extends whenever f_best > factor*f_g (with elitism this holds "
      "until the cap); stagnation extends only on substantial recent improvement";
  return j.dump(2);
}

}  // namespace masskit
