#pragma once

#include <filesystem>
#include <string>

#include "casimir/pipeline.hpp"

namespace casimir {

/// Parsed form of the declarative run-config file: a named paper case with
/// any number of per-field overrides. Unknown sections or keys are rejected.
struct RunConfig {
  CaseConfig case_config;
  TrainConfig ae_train = autoencoder_train_defaults();
  double ae_noise_sigma = 0.02;
  std::filesystem::path out_dir = ".";
};

/// Flat `key = value` file with one [section] per module:
///
///   [case]     name
///   [grid]     dmin_nm dmax_nm count
///   [ranges]   t_nm w01 wp1 g1 ...   ("lo hi" | "fixed v" | "scaled src k";
///              t_nm in nm, pole parameters in rad/s)
///   [dataset]  n n_train noise_sigma standardize law threads seed
///   [train]    learning_rate epochs batch_size seed weight_delta_tol
///   [quad]     rel_tol gl_nodes consecutive_small scheme
///   [autoencoder] learning_rate epochs batch_size seed noise_sigma
///   [output]   dir
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(std::istream& is, const std::string& path_for_errors);

/// Defaults for a named case with no file at all.
RunConfig default_run_config(const std::string& case_tag);

}  // namespace casimir
