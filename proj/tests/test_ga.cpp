#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "masskit/ga.hpp"
#include "masskit/harness.hpp"

using namespace masskit;

namespace {

GaConfig small_config(uint64_t seed) {
  GaConfig cfg;
  cfg.generations = 5;
  cfg.max_generations = 20;
  cfg.mutant_size = 10;
  cfg.seed = seed;
  return cfg;
}

SampleProfile desk_sample(uint64_t seed) {
  const auto dist = make_distribution(DistributionKind::kUniform, 20);
  return SampleProfile::draw(dist, 20, seed);
}

}  // namespace

TEST_CASE("config validation") {
  GaConfig bad;
  bad.mutant_size = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = GaConfig{};
  bad.max_generations = 10;
  bad.generations = 100;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  CHECK_NOTHROW(GaConfig{}.validate());
}

TEST_CASE("mutations from r0 always validate and respect the cap") {
  SplitMix64 rng(123);
  Representation rep = initial_representation(20, 0);
  for (int step = 0; step < 1000; ++step) {
    rep = mutate(rep, rng, 20);
    CHECK(rep.term_count() <= 20);
    const auto report = validate_representation(rep);
    REQUIRE_MESSAGE(report.valid, report.message);
  }
}

TEST_CASE("a blocked mutation returns the parent unchanged") {
  SplitMix64 rng(3);
  // Term cap of 1 leaves no room for any rewrite: every attempt overflows.
  const Representation r0 = initial_representation(10, 0);
  const Representation child = mutate(r0, rng, 1);
  CHECK(child == r0);
}

TEST_CASE("elitism guarantees and monotone history") {
  const auto profile = desk_sample(5);
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto result = evolve(profile, 0, small_config(seed));
    const double f0 =
        estimated_mse(profile, instantiate(initial_representation(20, 0)), 0);
    CHECK(result.best.fitness <= f0);
    for (size_t g = 1; g < result.history.size(); ++g)
      CHECK(result.history[g] <= result.history[g - 1]);
    CHECK(result.best.fitness == result.history.back());
    CHECK(validate_representation(result.best.rep).valid);
    CHECK(result.best.rep.term_count() <= 20);
  }
}

TEST_CASE("identical seeds reproduce the identical best individual") {
  const auto profile = desk_sample(9);
  const auto a = evolve(profile, 0, small_config(77));
  const auto b = evolve(profile, 0, small_config(77));
  CHECK(a.best.rep == b.best.rep);
  CHECK(a.best.fitness == b.best.fitness);
  CHECK(a.history == b.history);
  const auto c = evolve(profile, 0, small_config(78));
  CHECK(a.history != c.history);
}

TEST_CASE("parallel fitness evaluation changes nothing") {
  const auto profile = desk_sample(13);
  GaConfig serial = small_config(4);
  GaConfig parallel = small_config(4);
  parallel.workers = 4;
  const auto a = evolve(profile, 0, serial);
  const auto b = evolve(profile, 0, parallel);
  CHECK(a.best.rep == b.best.rep);
  CHECK(a.history == b.history);
}

TEST_CASE("the verbatim extension rule keeps extending; stagnation stops") {
  const auto profile = desk_sample(21);
  GaConfig verbatim = small_config(6);
  const auto v = evolve(profile, 0, verbatim);
  // With elitism f_best >= f_g always, so the verbatim condition holds at
  // every checkpoint and the run exhausts the cap.
  CHECK(v.generations_run == verbatim.max_generations);

  GaConfig stagnation = small_config(6);
  stagnation.extension_rule = ExtensionRule::kStagnation;
  const auto s = evolve(profile, 0, stagnation);
  CHECK(s.generations_run <= v.generations_run);
  CHECK(s.extension_rule == "stagnation");
}

TEST_CASE("evolve works on count-ingested profiles") {
  // Fitness touches only the estimated distribution, never sample prefixes.
  const auto profile = SampleProfile::from_counts(
      {{0, 5}, {1, 4}, {2, 3}, {3, 2}, {4, 2}, {5, 1}, {6, 1}, {7, 1}, {8, 1}});
  CHECK_FALSE(profile.has_prefixes());
  const auto result = evolve(profile, 0, small_config(8));
  CHECK(result.best.fitness >= 0.0);
  CHECK(validate_representation(result.best.rep).valid);
}

TEST_CASE("target frequencies above zero evolve too") {
  const auto profile = desk_sample(30);
  const auto result = evolve(profile, 1, small_config(12));
  CHECK(result.best.rep.target_k() == 1);
  CHECK(result.best.fitness >= 0.0);
}

TEST_CASE("manifest records the run") {
  const auto profile = desk_sample(2);
  const GaConfig cfg = small_config(42);
  const auto result = evolve(profile, 0, cfg);
  const std::string manifest = manifest_json(cfg, result);
  CHECK(manifest.find("\"seed\": 42") != std::string::npos);
  CHECK(manifest.find("history") != std::string::npos);
  CHECK(manifest.find("extension_rule") != std::string::npos);
}
