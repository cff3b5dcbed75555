#pragma once

// Genetic search over representations minimizing the estimated MSE of the
// instantiated estimator. Generation-synchronous: tournament-select parents,
// mutate, reinject the initial representation, carry the elite unchanged.

#include <cstdint>
#include <string>
#include <vector>

#include "masskit/moments.hpp"
#include "masskit/representations.hpp"

namespace masskit {

enum class ExtensionRule {
  kVerbatim,    // extend when (f_g == f_0) or (f_best > factor * f_g)
  kStagnation,  // extend when (f_g == f_0) or (f_g < factor * f_best)
};

struct GaConfig {
  int generations = 100;        // G, the extension quantum
  int max_generations = 2000;   // hard cap on G_L
  int mutant_size = 40;         // m
  int tournament = 3;           // t, sampled with replacement
  int elite_count = 3;
  int term_cap = 20;
  double improvement_factor = 0.95;
  uint64_t seed = 0;
  ExtensionRule extension_rule = ExtensionRule::kVerbatim;
  int workers = 1;  // parallel fitness evaluation; results identical to serial

  void validate() const;
};

struct Individual {
  Representation rep;
  double fitness = 0.0;  // estimated MSE, lower is better
  uint64_t lineage_id = 0;
};

struct EvolveResult {
  Individual best;
  std::vector<double> history;  // per-generation best fitness, non-increasing
  long long generations_run = 0;
  double wall_seconds = 0.0;
  std::string extension_rule;
};

/// One mutation: split a random term with uniform delta in (0,1), rewrite the
/// delta half with one of the three moves. Domain-invalid draws or term-cap
/// overflows are resampled a bounded number of times, then the parent is
/// returned unchanged.
Representation mutate(const Representation& rep, SplitMix64& rng, int term_cap);

EvolveResult evolve(const SampleProfile& profile, long long k, const GaConfig& config);

std::string manifest_json(const GaConfig& config, const EvolveResult& result);

}  // namespace masskit
