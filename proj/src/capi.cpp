#include "masskit.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "masskit/harness.hpp"
#include "masskit/oracle.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Fn>
masskit_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const masskit::BudgetExceeded& e) {
    g_last_error = e.what();
    return MASSKIT_ERR_BUDGET;
  } catch (const masskit::SpecError& e) {
    g_last_error = e.what();
    return MASSKIT_ERR_SPEC;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return MASSKIT_ERR_DOMAIN;
  } catch (const std::runtime_error& e) {
    g_last_error = e.what();
    return MASSKIT_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MASSKIT_ERR_INTERNAL;
  }
}

masskit::GaConfig ga_config_from_json(const char* config_json) {
  masskit::GaConfig config;
  if (config_json == nullptr || *config_json == '\0') return config;
  nlohmann::json j = nlohmann::json::parse(config_json);
  if (j.contains("generations")) config.generations = j["generations"].get<int>();
  if (j.contains("max_generations"))
    config.max_generations = j["max_generations"].get<int>();
  if (j.contains("mutant_size")) config.mutant_size = j["mutant_size"].get<int>();
  if (j.contains("tournament")) config.tournament = j["tournament"].get<int>();
  if (j.contains("elite_count")) config.elite_count = j["elite_count"].get<int>();
  if (j.contains("term_cap")) config.term_cap = j["term_cap"].get<int>();
  if (j.contains("improvement_factor"))
    config.improvement_factor = j["improvement_factor"].get<double>();
  if (j.contains("seed")) config.seed = j["seed"].get<uint64_t>();
  if (j.contains("workers")) config.workers = j["workers"].get<int>();
  if (j.contains("extension_rule")) {
    const std::string rule = j["extension_rule"].get<std::string>();
    if (rule == "verbatim")
      config.extension_rule = masskit::ExtensionRule::kVerbatim;
    else if (rule == "stagnation")
      config.extension_rule = masskit::ExtensionRule::kStagnation;
    else
      throw std::domain_error("unknown extension_rule: " + rule);
  }
  return config;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

struct masskit_dist {
  masskit::DiscreteDistribution dist;
};
struct masskit_profile {
  masskit::SampleProfile profile;
};
struct masskit_rep {
  masskit::Representation rep;
};

extern "C" {

const char* masskit_last_error(void) { return g_last_error.c_str(); }

void masskit_string_free(char* s) { std::free(s); }

masskit_status masskit_dist_create(const char* kind, long support, double param,
                                   uint64_t seed, masskit_dist** out) {
  return guarded([&]() -> masskit_status {
    if (kind == nullptr || out == nullptr) throw std::domain_error("null argument");
    auto dist = masskit::make_distribution(
        masskit::distribution_kind_from_name(kind),
        static_cast<size_t>(support), param, seed);
    *out = new masskit_dist{std::move(dist)};
    return MASSKIT_OK;
  });
}

void masskit_dist_free(masskit_dist* dist) { delete dist; }

masskit_status masskit_dist_probability(const masskit_dist* dist, long klass,
                                        double* out) {
  return guarded([&]() -> masskit_status {
    if (dist == nullptr || out == nullptr) throw std::domain_error("null argument");
    if (klass < 0 || static_cast<size_t>(klass) >= dist->dist.support())
      throw std::domain_error("class out of range");
    *out = dist->dist.prob(static_cast<size_t>(klass));
    return MASSKIT_OK;
  });
}

masskit_status masskit_sample(const masskit_dist* dist, long n, uint64_t seed,
                              masskit_profile** out) {
  return guarded([&]() -> masskit_status {
    if (dist == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = new masskit_profile{masskit::SampleProfile::draw(dist->dist, n, seed)};
    return MASSKIT_OK;
  });
}

masskit_status masskit_profile_read_tokens(const char* path, masskit_profile** out) {
  return guarded([&]() -> masskit_status {
    if (path == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = new masskit_profile{masskit::read_token_file(path)};
    return MASSKIT_OK;
  });
}

masskit_status masskit_profile_read_counts(const char* path, masskit_profile** out) {
  return guarded([&]() -> masskit_status {
    if (path == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = new masskit_profile{masskit::read_count_csv(path)};
    return MASSKIT_OK;
  });
}

masskit_status masskit_profile_write_tokens(const masskit_profile* p,
                                            const char* path) {
  return guarded([&]() -> masskit_status {
    if (p == nullptr || path == nullptr) throw std::domain_error("null argument");
    masskit::write_token_file(p->profile, path);
    return MASSKIT_OK;
  });
}

long masskit_profile_size(const masskit_profile* p) {
  return p == nullptr ? -1 : static_cast<long>(p->profile.size());
}

long masskit_profile_phi(const masskit_profile* p, long k) {
  return p == nullptr ? -1 : static_cast<long>(p->profile.phi(k));
}

int masskit_profile_has_prefixes(const masskit_profile* p) {
  return p != nullptr && p->profile.has_prefixes() ? 1 : 0;
}

void masskit_profile_free(masskit_profile* p) { delete p; }

masskit_status masskit_good_turing(const masskit_profile* p, long k,
                                   int simple_variant, double* out) {
  return guarded([&]() -> masskit_status {
    if (p == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = masskit::good_turing(p->profile, k,
                                simple_variant ? masskit::GoodTuringVariant::kSimple
                                               : masskit::GoodTuringVariant::kStandard);
    return MASSKIT_OK;
  });
}

masskit_status masskit_minimal_bias(const masskit_profile* p, long k, double* out) {
  return guarded([&]() -> masskit_status {
    if (p == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = masskit::minimal_bias(p->profile, k);
    return MASSKIT_OK;
  });
}

masskit_status masskit_chao_unseen(const masskit_profile* p, double* out) {
  return guarded([&]() -> masskit_status {
    if (p == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = masskit::chao_unseen(p->profile);
    return MASSKIT_OK;
  });
}

masskit_status masskit_estimate_json(const masskit_profile* p, long k,
                                     char** json_out) {
  return guarded([&]() -> masskit_status {
    if (p == nullptr || json_out == nullptr) throw std::domain_error("null argument");
    const auto& profile = p->profile;
    nlohmann::json j;
    j["n"] = profile.size();
    j["k"] = k;
    j["distinct"] = profile.distinct();
    j["phi_k"] = profile.phi(k);
    j["phi_k_plus_1"] = profile.phi(k + 1);
    const double b = masskit::minimal_bias(profile, k);
    j["minimal_bias"] = {{"raw", b}, {"clamped", clamp01(b)}};
    if (k < profile.size()) {
      const double gt = masskit::good_turing(profile, k);
      const double gts =
          masskit::good_turing(profile, k, masskit::GoodTuringVariant::kSimple);
      j["good_turing"] = {{"raw", gt}, {"clamped", clamp01(gt)}};
      j["good_turing_simple"] = {{"raw", gts}, {"clamped", clamp01(gts)}};
    }
    if (profile.size() >= 2) {
      j["chao_unseen"] = masskit::chao_unseen(profile);
      const auto phat = masskit::hybrid_phat(profile);
      j["hybrid"] = {{"seen_total", phat.seen_total()},
                     {"unseen_count", phat.unseen_count},
                     {"unseen_each", phat.unseen_each}};
    }
    *json_out = dup_string(j.dump(2));
    return MASSKIT_OK;
  });
}

masskit_status masskit_rep_read(const char* path, masskit_rep** out) {
  return guarded([&]() -> masskit_status {
    if (path == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = new masskit_rep{masskit::read_representation(path)};
    return MASSKIT_OK;
  });
}

masskit_status masskit_rep_write(const masskit_rep* rep, const char* path) {
  return guarded([&]() -> masskit_status {
    if (rep == nullptr || path == nullptr) throw std::domain_error("null argument");
    masskit::write_representation(rep->rep, path);
    return MASSKIT_OK;
  });
}

masskit_status masskit_rep_validate(const masskit_rep* rep, int* valid_out,
                                    char** report_out) {
  return guarded([&]() -> masskit_status {
    if (rep == nullptr || valid_out == nullptr) throw std::domain_error("null argument");
    const auto report = masskit::validate_representation(rep->rep);
    *valid_out = report.valid ? 1 : 0;
    if (report_out != nullptr)
      *report_out = dup_string(report.valid ? "valid" : report.message);
    return MASSKIT_OK;
  });
}

masskit_status masskit_rep_adapt(const masskit_rep* rep, long m, masskit_rep** out) {
  return guarded([&]() -> masskit_status {
    if (rep == nullptr || out == nullptr) throw std::domain_error("null argument");
    *out = new masskit_rep{masskit::adapt_representation(rep->rep, m)};
    return MASSKIT_OK;
  });
}

masskit_status masskit_rep_evaluate(const masskit_rep* rep, const masskit_profile* p,
                                    double* out) {
  return guarded([&]() -> masskit_status {
    if (rep == nullptr || p == nullptr || out == nullptr)
      throw std::domain_error("null argument");
    *out = masskit::instantiate(rep->rep).evaluate(p->profile);
    return MASSKIT_OK;
  });
}

void masskit_rep_free(masskit_rep* rep) { delete rep; }

masskit_status masskit_evolve(const masskit_profile* p, long k,
                              const char* config_json, masskit_rep** best,
                              char** manifest_json_out) {
  return guarded([&]() -> masskit_status {
    if (p == nullptr || best == nullptr) throw std::domain_error("null argument");
    const masskit::GaConfig config = ga_config_from_json(config_json);
    const masskit::EvolveResult result = masskit::evolve(p->profile, k, config);
    *best = new masskit_rep{result.best.rep};
    if (manifest_json_out != nullptr)
      *manifest_json_out = dup_string(masskit::manifest_json(config, result));
    return MASSKIT_OK;
  });
}

masskit_status masskit_experiment_run(const char* spec_path, const char* out_dir,
                                      int workers, const char* mode_override) {
  return guarded([&]() -> masskit_status {
    if (spec_path == nullptr || out_dir == nullptr)
      throw std::domain_error("null argument");
    std::ifstream in(spec_path);
    if (!in) throw masskit::SpecError(std::string("cannot open spec: ") + spec_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    masskit::ExperimentSpec spec = masskit::spec_from_json(buffer.str());
    if (workers > 0) spec.workers = workers;
    if (mode_override != nullptr && *mode_override != '\0')
      spec.mode = masskit::experiment_mode_from_name(mode_override);

    std::filesystem::create_directories(out_dir);
    const auto rows = masskit::run_experiment(spec);
    {
      std::ofstream csv(std::filesystem::path(out_dir) / "results.csv");
      if (!csv) throw std::runtime_error("cannot write results.csv");
      csv << masskit::rows_to_csv(rows);
    }
    if (spec.mode == masskit::ExperimentMode::kBiasCurve) {
      std::ofstream dat(std::filesystem::path(out_dir) / "bias_curve.dat");
      if (!dat) throw std::runtime_error("cannot write bias_curve.dat");
      dat << masskit::bias_curve_table(spec);
    }
    {
      std::ofstream manifest(std::filesystem::path(out_dir) / "spec.json");
      manifest << masskit::spec_to_json(spec);
    }
    return MASSKIT_OK;
  });
}

masskit_status masskit_audit_run(long max_support, long max_n, long* failures_out,
                                 char** report_json) {
  return guarded([&]() -> masskit_status {
    const auto audit = masskit::run_oracle_audit(max_support, max_n);
    if (failures_out != nullptr) *failures_out = static_cast<long>(audit.failures);
    if (report_json != nullptr) *report_json = dup_string(audit.detail);
    return MASSKIT_OK;
  });
}

}  // extern "C"
