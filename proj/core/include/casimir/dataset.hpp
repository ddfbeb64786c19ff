#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "casimir/lifshitz.hpp"
#include "casimir/materials.hpp"
#include "casimir/rng.hpp"

namespace casimir {

/// Geometric gap grid: d_i = d_min r^(i-1), r = (d_max/d_min)^(1/(count-1)).
struct GapGrid {
  double d_min = 0.0;  // m
  double d_max = 0.0;  // m
  int count = 0;

  std::vector<double> gaps() const;
};

GapGrid gap_grid(double d_min, double d_max, int count);

/// Which parameters enter the target vector, in canonical order
/// (t, w01, wp1, g1, w02, ...). Free parameters are stored as natural logs
/// of values in schema units: rad/s for rates, 1e3 m for the thickness.
struct TargetSchema {
  std::vector<std::string> names;  // 1 + 3*Np entries
  std::vector<bool> is_free;

  int n_free() const;
  std::vector<std::string> free_names() const;
};

TargetSchema schema_from_ranges(const SamplingRanges& ranges);

/// Log-space target vector of the free parameters. Throws std::domain_error
/// when a free parameter is not strictly positive.
std::vector<double> target_vector(const FilmSample& sample,
                                  const TargetSchema& schema);

/// Inverse of target_vector: free parameters are exponentiated from y,
/// fixed and scaled parameters are reconstructed from the sampling rules.
FilmSample film_from_target(std::span<const double> y,
                            const TargetSchema& schema,
                            const SamplingRanges& ranges);

/// Feature vector: dP~/dz (per micrometer) at every grid gap for the
/// gold / film / gold stack of the sample.
std::vector<double> feature_vector(const FilmSample& sample,
                                   const GapGrid& grid,
                                   const QuadratureConfig& quad = {});

/// One record: features X, log-targets Y, and the film that produced them.
struct Incidence {
  std::vector<double> x;
  std::vector<double> y;
  FilmSample sample;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::string case_tag;
  std::uint64_t master_seed = 0;
  GapGrid grid;
  SamplingRanges ranges;
  TargetSchema schema;
  double noise_sigma = 0.0;  // recorded metadata; x rows stay clean
  QuadratureConfig quad;
  std::vector<Incidence> incidences;
};

struct GenerationConfig {
  std::string case_tag;
  GapGrid grid;
  SamplingRanges ranges;
  int count = 0;
  std::uint64_t master_seed = 0;
  double noise_sigma = 0.0;
  QuadratureConfig quad;
  int threads = 0;  // 0 = hardware concurrency
};

/// Seeded dataset generation. Incidences are independent (per-incidence seed
/// mixed from the master seed and index), generated in parallel, ordered by
/// index. Numeric failures are logged to stderr and redrawn with a fresh
/// derived seed.
Dataset generate_dataset(const GenerationConfig& config);

struct DatasetSplit {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

/// Deterministic seeded shuffle split; disjoint and exhaustive.
DatasetSplit split_dataset(const Dataset& ds, int n_train, std::uint64_t seed);

/// Split seed derived from the dataset's master seed, so a dataset file alone
/// determines its train/test partition.
std::uint64_t default_split_seed(const Dataset& ds);

/// X + Gaussian noise, N(0, sigma^2) per entry.
std::vector<double> add_noise(std::span<const double> x, double sigma,
                              Rng& rng);

/// Per-feature affine normalization fitted on training features.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> stddev;  // floored at 1e-12
};

Standardization fit_standardization(const Dataset& ds,
                                    std::span<const int> indices);

void write_dataset(std::ostream& os, const Dataset& ds,
                   const std::vector<std::string>& comment_lines = {});
void write_dataset(const std::filesystem::path& path, const Dataset& ds,
                   const std::vector<std::string>& comment_lines = {});

/// Parses a dataset file; throws ParseError with the offending line number.
Dataset read_dataset(std::istream& is, const std::string& path_for_errors);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace casimir
