#include "sgp/sgp_c.h"

#include <cstring>
#include <string>

#include "sgp/config.hpp"
#include "sgp/datagen.hpp"
#include "sgp/errors.hpp"
#include "sgp/pipeline.hpp"

struct sgp_config {
  sgp::SgpConfig value;
};

namespace {

thread_local std::string t_last_error;

sgp_status code_of(const sgp::Error& e) {
  switch (e.code()) {
    case sgp::ErrorCode::invalid_argument:
      return SGP_ERR_INVALID_ARGUMENT;
    case sgp::ErrorCode::io:
      return SGP_ERR_IO;
    case sgp::ErrorCode::parse:
      return SGP_ERR_PARSE;
    case sgp::ErrorCode::config:
      return SGP_ERR_CONFIG;
    case sgp::ErrorCode::no_model:
      return SGP_ERR_NO_MODEL;
    case sgp::ErrorCode::numeric:
      return SGP_ERR_NUMERIC;
    case sgp::ErrorCode::internal:
      return SGP_ERR_INTERNAL;
  }
  return SGP_ERR_INTERNAL;
}

template <typename Fn>
sgp_status guarded(Fn&& fn) {
  try {
    fn();
    t_last_error.clear();
    return SGP_OK;
  } catch (const sgp::Error& e) {
    t_last_error = e.what();
    return code_of(e);
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return SGP_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return SGP_ERR_INTERNAL;
  }
}

sgp_status require(bool ok, const char* message) {
  if (ok) return SGP_OK;
  t_last_error = message;
  return SGP_ERR_INVALID_ARGUMENT;
}

sgp::SgpConfig effective_config(const sgp_config* config) {
  return config ? config->value : sgp::SgpConfig{};
}

}  // namespace

extern "C" {

const char* sgp_version(void) { return "1.0.0"; }

const char* sgp_last_error(void) { return t_last_error.c_str(); }

sgp_config* sgp_config_create(void) { return new sgp_config{}; }

sgp_status sgp_config_load(const char* path, sgp_config** out) {
  if (auto bad = require(path && out, "sgp_config_load: null argument")) return bad;
  *out = nullptr;
  return guarded([&] { *out = new sgp_config{sgp::load_config(path)}; });
}

sgp_status sgp_config_set(sgp_config* config, const char* key, const char* value) {
  if (auto bad = require(config && key && value, "sgp_config_set: null argument")) return bad;
  return guarded([&] { sgp::apply_config_override(config->value, key, value); });
}

sgp_status sgp_config_validate(const sgp_config* config) {
  if (auto bad = require(config != nullptr, "sgp_config_validate: null argument")) return bad;
  return guarded([&] { config->value.validate(); });
}

sgp_status sgp_config_save(const sgp_config* config, const char* path) {
  if (auto bad = require(config && path, "sgp_config_save: null argument")) return bad;
  return guarded([&] { sgp::save_config(config->value, path); });
}

void sgp_config_free(sgp_config* config) { delete config; }

void sgp_datagen_params_init(sgp_datagen_params* params) {
  if (!params) return;
  const sgp::SceneSpec scene = sgp::default_scene_spec();
  const sgp::PairSpec pair = sgp::default_pair_spec();
  params->n_train = 20;
  params->n_test = 10;
  params->seed = 0;
  params->target_overlap = pair.target_overlap;
  params->noise_sigma = pair.noise_sigma;
  params->clutter_fraction = pair.clutter_fraction;
  params->rot_min_deg = pair.rot_min_deg;
  params->rot_max_deg = pair.rot_max_deg;
  params->trans_min = pair.trans_min;
  params->trans_max = pair.trans_max;
  params->points_per_scene = scene.points_per_scene;
}

sgp_status sgp_generate_dataset(const char* out_dir, const sgp_datagen_params* params) {
  if (auto bad = require(out_dir && params, "sgp_generate_dataset: null argument")) return bad;
  return guarded([&] {
    sgp::SceneSpec scene = sgp::default_scene_spec();
    scene.points_per_scene = params->points_per_scene;
    sgp::PairSpec pair = sgp::default_pair_spec();
    pair.target_overlap = params->target_overlap;
    pair.noise_sigma = params->noise_sigma;
    pair.clutter_fraction = params->clutter_fraction;
    pair.rot_min_deg = params->rot_min_deg;
    pair.rot_max_deg = params->rot_max_deg;
    pair.trans_min = params->trans_min;
    pair.trans_max = params->trans_max;
    const std::string dir(out_dir);
    sgp::make_dataset(params->n_train, params->n_test, scene, pair, params->seed, &dir);
  });
}

sgp_status sgp_bootstrap(const char* train_manifest, const sgp_config* config,
                         const char* out_labels_csv) {
  if (auto bad = require(train_manifest && out_labels_csv, "sgp_bootstrap: null argument")) return bad;
  return guarded([&] { sgp::bootstrap_files(train_manifest, effective_config(config), out_labels_csv); });
}

sgp_status sgp_run(const char* train_manifest, const char* test_manifest,
                   const char* validation_manifest, const sgp_config* config, const char* run_dir) {
  if (auto bad = require(train_manifest && run_dir, "sgp_run: null argument")) return bad;
  return guarded([&] {
    sgp::run_sgp_files(train_manifest, test_manifest ? test_manifest : "",
                       validation_manifest ? validation_manifest : "", effective_config(config),
                       run_dir);
  });
}

sgp_status sgp_register_pair(const char* ply_a, const char* ply_b, const char* model_path,
                             const sgp_config* config, double transform_out[12],
                             double* inlier_rate_out) {
  if (auto bad = require(ply_a && ply_b && transform_out, "sgp_register_pair: null argument"))
    return bad;
  return guarded([&] {
    const sgp::RegisterOutcome outcome = sgp::register_pair_files(
        ply_a, ply_b, model_path ? model_path : "", effective_config(config));
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) transform_out[3 * r + c] = outcome.transform.rotation(r, c);
    for (int r = 0; r < 3; ++r) transform_out[9 + r] = outcome.transform.translation[r];
    if (inlier_rate_out) *inlier_rate_out = outcome.inlier_rate;
  });
}

sgp_status sgp_evaluate(const char* model_path, const char* manifest, const sgp_config* config,
                        double* recall_out) {
  if (auto bad = require(model_path && manifest && recall_out, "sgp_evaluate: null argument"))
    return bad;
  return guarded([&] { *recall_out = sgp::evaluate_files(model_path, manifest, effective_config(config)); });
}

sgp_status sgp_export_metrics(const char* run_dir, const char* out_path, char* resolved_path_out,
                              size_t resolved_cap) {
  if (auto bad = require(run_dir && resolved_path_out && resolved_cap > 0,
                         "sgp_export_metrics: null argument"))
    return bad;
  return guarded([&] {
    const std::string resolved = sgp::export_metrics(run_dir, out_path ? out_path : "");
    const std::size_t n = std::min(resolved.size(), resolved_cap - 1);
    std::memcpy(resolved_path_out, resolved.data(), n);
    resolved_path_out[n] = '\0';
  });
}

}  // extern "C"
