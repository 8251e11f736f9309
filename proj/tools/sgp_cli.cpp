// Command-line front end. Links only the C API of the shared library.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "sgp/sgp_c.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct ConfigGuard {
  sgp_config* handle = nullptr;
  ~ConfigGuard() { sgp_config_free(handle); }
};

int data_fail(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, sgp_last_error());
  return kExitData;
}

// Builds the effective config: file (data), then --set pairs (usage), then
// --seed.
int build_config(ConfigGuard& guard, const std::string& config_path,
                 const std::vector<std::string>& sets, bool seed_given, uint64_t seed) {
  if (!config_path.empty()) {
    if (sgp_config_load(config_path.c_str(), &guard.handle) != SGP_OK)
      return data_fail("loading config");
  } else {
    guard.handle = sgp_config_create();
  }
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return kExitUsage;
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (sgp_config_set(guard.handle, key.c_str(), value.c_str()) != SGP_OK) {
      std::fprintf(stderr, "error: --set %s: %s\n", kv.c_str(), sgp_last_error());
      return kExitUsage;
    }
  }
  if (seed_given) {
    const std::string value = std::to_string(seed);
    if (sgp_config_set(guard.handle, "seed", value.c_str()) != SGP_OK) {
      std::fprintf(stderr, "error: --seed: %s\n", sgp_last_error());
      return kExitUsage;
    }
  }
  // A config file validates on load; overrides are checked here so a bad
  // --set surfaces as a usage error.
  if (!sets.empty() && sgp_config_validate(guard.handle) != SGP_OK) {
    std::fprintf(stderr, "error: config overrides: %s\n", sgp_last_error());
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised point cloud registration pipeline"};
  app.require_subcommand(1);
  app.fallthrough();  // global options (--seed, --set, --config) may follow the subcommand

  std::string config_path;
  std::vector<std::string> sets;
  uint64_t seed = 0;
  bool seed_given = false;
  app.add_option("--config", config_path, "Config file (key = value lines)");
  app.add_option("--set", sets, "Override a config key (key=value), repeatable");
  app.add_option("--seed", seed, "Master seed (overrides config)")->each([&](const std::string&) {
    seed_given = true;
  });

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset directory");
  std::string gen_out;
  sgp_datagen_params params;
  sgp_datagen_params_init(&params);
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--train", params.n_train, "Number of training pairs");
  gen->add_option("--test", params.n_test, "Number of test pairs");
  gen->add_option("--overlap", params.target_overlap, "Target overlap fraction");
  gen->add_option("--noise-sigma", params.noise_sigma, "Gaussian noise sigma (m)");
  gen->add_option("--clutter", params.clutter_fraction, "Clutter fraction");
  gen->add_option("--rot-min", params.rot_min_deg, "Min rotation magnitude (deg)");
  gen->add_option("--rot-max", params.rot_max_deg, "Max rotation magnitude (deg)");
  gen->add_option("--trans-min", params.trans_min, "Min translation magnitude (m)");
  gen->add_option("--trans-max", params.trans_max, "Max translation magnitude (m)");
  gen->add_option("--points", params.points_per_scene, "Surface samples per scene");

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "Run the bootstrap matcher, write labels only");
  std::string boot_manifest, boot_out;
  boot->add_option("--manifest", boot_manifest, "Training manifest CSV")->required();
  boot->add_option("--out", boot_out, "Output labels CSV")->required();

  // run
  auto* run = app.add_subcommand("run", "Run the full teacher-student loop");
  std::string run_data, run_train, run_test, run_val, run_dir;
  run->add_option("--data", run_data, "Dataset directory (uses train.csv/test.csv)");
  run->add_option("--train-manifest", run_train, "Training manifest CSV");
  run->add_option("--test-manifest", run_test, "Test manifest CSV");
  run->add_option("--validation-manifest", run_val, "Validation manifest CSV (best-model pick)");
  run->add_option("--run-dir", run_dir, "Output run directory")->required();
  int run_iterations = -1;
  run->add_option("--iterations", run_iterations, "Loop iterations T (overrides config)");

  // register
  auto* reg = app.add_subcommand("register", "Register one pair of PLY files");
  std::string reg_a, reg_b, reg_model;
  reg->add_option("cloud_a", reg_a, "Source PLY")->required();
  reg->add_option("cloud_b", reg_b, "Target PLY")->required();
  reg->add_option("--model", reg_model, "Student checkpoint (default: bootstrap matcher)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Recall of a model over a manifest");
  std::string eval_model, eval_manifest;
  eval->add_option("--model", eval_model, "Student checkpoint")->required();
  eval->add_option("--manifest", eval_manifest, "Manifest with ground truth")->required();

  // export-metrics
  auto* exp = app.add_subcommand("export-metrics", "Resolve/copy a run's metrics.csv");
  std::string exp_run, exp_out;
  exp->add_option("run_dir", exp_run, "Run directory")->required();
  exp->add_option("--out", exp_out, "Copy metrics.csv to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  ConfigGuard config;
  if (const int rc = build_config(config, config_path, sets, seed_given, seed); rc != kExitOk) {
    return rc;
  }
  if (seed_given) params.seed = seed;

  if (gen->parsed()) {
    if (sgp_generate_dataset(gen_out.c_str(), &params) != SGP_OK)
      return data_fail("generating dataset");
    std::printf("%s\n", gen_out.c_str());
    return kExitOk;
  }

  if (boot->parsed()) {
    if (sgp_bootstrap(boot_manifest.c_str(), config.handle, boot_out.c_str()) != SGP_OK)
      return data_fail("bootstrap");
    std::printf("%s\n", boot_out.c_str());
    return kExitOk;
  }

  if (run->parsed()) {
    if (!run_data.empty()) {
      if (run_train.empty()) run_train = run_data + "/train.csv";
      if (run_test.empty()) run_test = run_data + "/test.csv";
    }
    if (run_train.empty()) {
      std::fprintf(stderr, "error: run needs --data or --train-manifest\n");
      return kExitUsage;
    }
    if (run_iterations > 0) {
      const std::string value = std::to_string(run_iterations);
      if (sgp_config_set(config.handle, "iterations", value.c_str()) != SGP_OK) {
        std::fprintf(stderr, "error: --iterations: %s\n", sgp_last_error());
        return kExitUsage;
      }
    }
    if (sgp_run(run_train.c_str(), run_test.empty() ? nullptr : run_test.c_str(),
                run_val.empty() ? nullptr : run_val.c_str(), config.handle,
                run_dir.c_str()) != SGP_OK) {
      return data_fail("run");
    }
    std::printf("%s\n", run_dir.c_str());
    return kExitOk;
  }

  if (reg->parsed()) {
    double transform[12];
    double inlier_rate = 0.0;
    if (sgp_register_pair(reg_a.c_str(), reg_b.c_str(),
                          reg_model.empty() ? nullptr : reg_model.c_str(), config.handle, transform,
                          &inlier_rate) != SGP_OK) {
      return data_fail("register");
    }
    for (int i = 0; i < 12; ++i) std::printf(i ? " %.17g" : "%.17g", transform[i]);
    std::printf("\ninlier_rate %.17g\n", inlier_rate);
    return kExitOk;
  }

  if (eval->parsed()) {
    double recall = 0.0;
    if (sgp_evaluate(eval_model.c_str(), eval_manifest.c_str(), config.handle, &recall) != SGP_OK)
      return data_fail("evaluate");
    std::printf("recall %.17g\n", recall);
    return kExitOk;
  }

  if (exp->parsed()) {
    char resolved[4096];
    if (sgp_export_metrics(exp_run.c_str(), exp_out.empty() ? nullptr : exp_out.c_str(), resolved,
                           sizeof(resolved)) != SGP_OK) {
      return data_fail("export-metrics");
    }
    std::printf("%s\n", resolved);
    return kExitOk;
  }

  return kExitUsage;
}
