#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casimir/dataset.hpp"
#include "casimir/neuralnet.hpp"

namespace casimir {

/// Everything needed to run one inverse-problem experiment end to end.
struct CaseConfig {
  std::string tag;
  GapGrid grid;
  SamplingRanges ranges;
  int n_total = 0;
  int n_train = 0;
  MlpArch arch;       // characterizer network
  TrainConfig train;  // characterizer training settings
  double noise_sigma = 0.0;
  QuadratureConfig quad;
  bool standardize = true;
  std::uint64_t dataset_seed = 1;
  int threads = 0;
};

/// Built-in configurations: "two-pole-a", "two-pole-b", "four-pole",
/// "silicon". Throws ConfigError for unknown tags.
CaseConfig builtin_case(const std::string& tag);
std::vector<std::string> builtin_case_tags();

/// Default denoising-autoencoder settings: layers (20,12,4,12,20),
/// learning rate 0.004, batch 200.
MlpArch autoencoder_arch(int feature_count = 20);
TrainConfig autoencoder_train_defaults();

/// Stable digest of a case configuration; stamped into every artifact so a
/// run can be matched to the exact settings that produced it.
std::string case_config_digest(const CaseConfig& cfg);
std::vector<std::pair<std::string, std::string>> manifest_entries(
    const CaseConfig& cfg);

/// Film built from a case's sampling rules with the free parameters pinned
/// to explicit SI values (e.g. {"t": 100e-9, "w02": 1e15} for the two-pole
/// cases); fixed and scaled parameters are filled in from the rules.
FilmSample film_from_free_values(
    const SamplingRanges& ranges,
    const std::map<std::string, double>& free_values);

struct PredictedFilm {
  FilmSample sample;
  int source_incidence = -1;
};

/// Network output -> film parameters: free entries exponentiated back to SI
/// units, fixed and scaled parameters restored from the sampling rules.
PredictedFilm predict_film(const Mlp& mlp, std::span<const double> x,
                           const TargetSchema& schema,
                           const SamplingRanges& ranges);

struct SpectrumTable {
  std::vector<double> omega;  // rad/s, ascending
  std::vector<std::complex<double>> eps;
};

SpectrumTable predict_spectrum(const LorentzDrudeModel& film,
                               std::span<const double> omega_grid);

/// 400 log-spaced points on [1e14, 1e17] rad/s.
std::vector<double> default_spectrum_grid();

void write_spectrum_csv(std::ostream& os, const SpectrumTable& table,
                        const std::vector<std::string>& comment_lines = {});

struct RunArtifacts {
  std::filesystem::path dataset;
  std::filesystem::path model;
  std::filesystem::path report;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> scatter;
};

struct RunResult {
  Dataset dataset;
  DatasetSplit split;
  Mlp model;
  EvalReport report;
  RunArtifacts artifacts;
};

/// Generate (or load) the case dataset, train the characterizer, evaluate on
/// the test split, and write dataset/model/report/scatter/manifest files
/// under out_dir. Partial artifacts are removed when a step fails.
RunResult run_case(const CaseConfig& cfg, const std::filesystem::path& out_dir,
                   const std::optional<std::filesystem::path>& dataset_in =
                       std::nullopt);

/// Train the denoising autoencoder on clean features: inputs are noised
/// fresh at every presentation (sigma in raw feature units), targets are the
/// clean features; both sides live in standardized coordinates.
Mlp train_denoiser(const std::vector<std::vector<double>>& clean_x,
                   double noise_sigma, const TrainConfig& cfg,
                   const Standardization& st);

/// Autoencoder pass: standardize, forward, de-standardize.
std::vector<double> denoise(const Mlp& autoencoder,
                            std::span<const double> x_noisy);

/// predict_film(mlp, denoise(ae, x)). Throws ConfigError when the two
/// models do not share the feature dimension.
PredictedFilm end_to_end(const Mlp& autoencoder, const Mlp& mlp,
                         std::span<const double> x_noisy,
                         const TargetSchema& schema,
                         const SamplingRanges& ranges);

void write_report_csv(std::ostream& os, const EvalReport& report,
                      const std::vector<std::string>& comment_lines = {});
/// Scatter pairs for one output parameter; thickness is written in nm,
/// frequencies in rad/s.
void write_scatter_csv(std::ostream& os, const EvalReport& report,
                       std::size_t param_index,
                       const std::vector<std::string>& comment_lines = {});
void write_manifest(
    std::ostream& os,
    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace casimir
