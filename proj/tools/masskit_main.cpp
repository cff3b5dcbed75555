// masskit command line: sample generation, estimation, estimator evolution,
// adaptation to larger samples, experiment runs, and oracle audits. Links
// against the C API only.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "masskit.h"

namespace {

int status_to_exit(masskit_status s) {
  switch (s) {
    case MASSKIT_OK: return 0;
    case MASSKIT_ERR_SPEC: return 2;
    case MASSKIT_ERR_BUDGET: return 3;
    default: return 1;
  }
}

int fail(masskit_status s) {
  std::fprintf(stderr, "error: %s\n", masskit_last_error());
  return status_to_exit(s);
}

masskit_status load_profile(const std::string& path, bool counts,
                            masskit_profile** out) {
  return counts ? masskit_profile_read_counts(path.c_str(), out)
                : masskit_profile_read_tokens(path.c_str(), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"missing/total probability mass estimation toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "draw a seeded sample and write a token file");
  std::string gen_kind = "uniform", gen_out = "sample.txt";
  long gen_support = 20, gen_n = 20;
  double gen_param = 1.0;
  uint64_t gen_seed = 1;
  gen->add_option("--dist", gen_kind, "uniform|half-and-half|zipf|dirichlet-prior");
  gen->add_option("--param", gen_param, "zipf exponent / dirichlet concentration");
  gen->add_option("--support", gen_support, "number of classes S")->required();
  gen->add_option("-n,--size", gen_n, "sample size")->required();
  gen->add_option("--seed", gen_seed, "sample seed");
  gen->add_option("--out", gen_out, "output token file");

  // estimate
  auto* est = app.add_subcommand("estimate", "all estimators for a sample file");
  std::string est_file;
  long est_k = 0;
  bool est_counts = false;
  est->add_option("file", est_file, "sample file")->required();
  est->add_option("-k", est_k, "target frequency");
  est->add_flag("--counts", est_counts, "input is a class,count CSV");

  // evolve
  auto* evo = app.add_subcommand("evolve", "search a minimal-MSE estimator for a sample");
  std::string evo_file, evo_out = "evolved.rep", evo_manifest = "evolved.json";
  std::string evo_config;
  long evo_k = 0;
  uint64_t evo_seed = 1;
  bool evo_counts = false;
  evo->add_option("file", evo_file, "sample file")->required();
  evo->add_option("-k", evo_k, "target frequency");
  evo->add_option("--seed", evo_seed, "search seed");
  evo->add_option("--config", evo_config, "GA config JSON file");
  evo->add_option("--out", evo_out, "evolved representation output");
  evo->add_option("--manifest", evo_manifest, "run manifest output");
  evo->add_flag("--counts", evo_counts, "input is a class,count CSV");

  // adapt
  auto* adp = app.add_subcommand("adapt", "shift a representation to a larger sample size");
  std::string adp_in, adp_out = "adapted.rep";
  long adp_m = 0;
  adp->add_option("rep", adp_in, "representation file")->required();
  adp->add_option("-m,--size", adp_m, "target sample size")->required();
  adp->add_option("--out", adp_out, "adapted representation output");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a declarative experiment spec");
  std::string exp_spec, exp_out = "results", exp_mode;
  int exp_workers = 0;
  exp->add_option("--spec", exp_spec, "experiment spec JSON")->required();
  exp->add_option("--out", exp_out, "output directory");
  exp->add_option("--workers", exp_workers, "worker threads (0 = spec value)");
  exp->add_option("--mode", exp_mode, "override the spec's mode");

  // audit
  auto* aud = app.add_subcommand("audit", "exact oracle cross-checks");
  long aud_support = 3, aud_n = 5;
  aud->add_option("--max-support", aud_support, "largest support to enumerate");
  aud->add_option("--max-n", aud_n, "largest sample size to enumerate");

  // validate
  auto* val = app.add_subcommand("validate", "check a representation against the constraints");
  std::string val_in;
  val->add_option("rep", val_in, "representation file")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    masskit_dist* dist = nullptr;
    masskit_status s = masskit_dist_create(gen_kind.c_str(), gen_support, gen_param,
                                           gen_seed, &dist);
    if (s != MASSKIT_OK) return fail(s);
    masskit_profile* profile = nullptr;
    s = masskit_sample(dist, gen_n, gen_seed, &profile);
    masskit_dist_free(dist);
    if (s != MASSKIT_OK) return fail(s);
    s = masskit_profile_write_tokens(profile, gen_out.c_str());
    masskit_profile_free(profile);
    if (s != MASSKIT_OK) return fail(s);
    std::printf("wrote %s (%s S=%ld n=%ld seed=%llu)\n", gen_out.c_str(),
                gen_kind.c_str(), gen_support, gen_n,
                static_cast<unsigned long long>(gen_seed));
    return 0;
  }

  if (est->parsed()) {
    masskit_profile* profile = nullptr;
    masskit_status s = load_profile(est_file, est_counts, &profile);
    if (s != MASSKIT_OK) return fail(s);
    char* json = nullptr;
    s = masskit_estimate_json(profile, est_k, &json);
    masskit_profile_free(profile);
    if (s != MASSKIT_OK) return fail(s);
    std::printf("%s\n", json);
    masskit_string_free(json);
    return 0;
  }

  if (evo->parsed()) {
    masskit_profile* profile = nullptr;
    masskit_status s = load_profile(evo_file, evo_counts, &profile);
    if (s != MASSKIT_OK) return fail(s);
    std::string config = "{\"seed\": " + std::to_string(evo_seed) + "}";
    if (!evo_config.empty()) {
      FILE* f = std::fopen(evo_config.c_str(), "rb");
      if (f == nullptr) {
        masskit_profile_free(profile);
        std::fprintf(stderr, "error: cannot open config %s\n", evo_config.c_str());
        return 1;
      }
      config.clear();
      char buf[4096];
      size_t got;
      while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) config.append(buf, got);
      std::fclose(f);
    }
    masskit_rep* best = nullptr;
    char* manifest = nullptr;
    s = masskit_evolve(profile, evo_k, config.c_str(), &best, &manifest);
    masskit_profile_free(profile);
    if (s != MASSKIT_OK) return fail(s);
    s = masskit_rep_write(best, evo_out.c_str());
    masskit_rep_free(best);
    if (s == MASSKIT_OK && manifest != nullptr) {
      FILE* f = std::fopen(evo_manifest.c_str(), "wb");
      if (f != nullptr) {
        std::fputs(manifest, f);
        std::fclose(f);
      }
    }
    masskit_string_free(manifest);
    if (s != MASSKIT_OK) return fail(s);
    std::printf("wrote %s and %s\n", evo_out.c_str(), evo_manifest.c_str());
    return 0;
  }

  if (adp->parsed()) {
    masskit_rep* rep = nullptr;
    masskit_status s = masskit_rep_read(adp_in.c_str(), &rep);
    if (s != MASSKIT_OK) return fail(s);
    masskit_rep* adapted = nullptr;
    s = masskit_rep_adapt(rep, adp_m, &adapted);
    masskit_rep_free(rep);
    if (s != MASSKIT_OK) return fail(s);
    int valid = 0;
    char* report = nullptr;
    s = masskit_rep_validate(adapted, &valid, &report);
    if (s == MASSKIT_OK && !valid)
      std::fprintf(stderr, "warning: adapted representation failed validation: %s\n",
                   report);
    masskit_string_free(report);
    s = masskit_rep_write(adapted, adp_out.c_str());
    masskit_rep_free(adapted);
    if (s != MASSKIT_OK) return fail(s);
    std::printf("wrote %s\n", adp_out.c_str());
    return 0;
  }

  if (exp->parsed()) {
    const masskit_status s =
        masskit_experiment_run(exp_spec.c_str(), exp_out.c_str(), exp_workers,
                               exp_mode.empty() ? nullptr : exp_mode.c_str());
    if (s != MASSKIT_OK) return fail(s);
    std::printf("results in %s/results.csv\n", exp_out.c_str());
    return 0;
  }

  if (aud->parsed()) {
    long failures = 0;
    char* report = nullptr;
    const masskit_status s = masskit_audit_run(aud_support, aud_n, &failures, &report);
    if (s != MASSKIT_OK) return fail(s);
    std::printf("%s\n", report);
    masskit_string_free(report);
    std::printf(failures == 0 ? "audit: all checks exact\n"
                              : "audit: %ld FAILURES\n",
                failures);
    return failures == 0 ? 0 : 1;
  }

  if (val->parsed()) {
    masskit_rep* rep = nullptr;
    masskit_status s = masskit_rep_read(val_in.c_str(), &rep);
    if (s != MASSKIT_OK) return fail(s);
    int valid = 0;
    char* report = nullptr;
    s = masskit_rep_validate(rep, &valid, &report);
    masskit_rep_free(rep);
    if (s != MASSKIT_OK) return fail(s);
    std::printf("%s\n", report);
    masskit_string_free(report);
    return valid ? 0 : 1;
  }

  return 0;
}
