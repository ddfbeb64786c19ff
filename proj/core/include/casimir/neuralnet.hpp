#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casimir/dataset.hpp"

namespace casimir {

/// Fully connected architecture: layer_sizes = (input, hidden..., output).
/// Hidden units are sigmoid, the output layer is affine; log-space targets
/// are unbounded, so a sigmoid output could not represent them.
struct MlpArch {
  std::vector<int> layer_sizes;

  void validate() const;  // >= 1 hidden layer, all sizes >= 1
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::string to_string() const;
  bool operator==(const MlpArch&) const = default;
};

struct Mlp {
  MlpArch arch;
  // weights[l] is row-major (to x from) for the map from layer l to l+1
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  // input standardization applied inside forward()
  std::vector<double> x_mean;
  std::vector<double> x_std;

  std::size_t parameter_count() const;
};

/// Glorot-uniform weights, zero biases, standardization set to identity.
Mlp mlp_init(const MlpArch& arch, std::uint64_t seed);

/// Per-layer activations kept for back-propagation; activations[0] is the
/// standardized input, activations.back() the network output.
struct ForwardCache {
  std::vector<std::vector<double>> activations;
};

std::vector<double> forward(const Mlp& mlp, std::span<const double> x);
void forward(const Mlp& mlp, std::span<const double> x, ForwardCache& cache);

/// Both cost kinds are a sum of squares between network output and target;
/// they differ only in what the target is (log parameters vs clean features).
enum class CostKind { LogTargetSse, ReconstructionSse };

struct SampleRef {
  std::span<const double> x;
  std::span<const double> y;
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

/// Gradient of E = sum_m sum_l (yhat - y)^2 over the batch, for every weight
/// and bias. Shapes mirror the model.
Gradients backprop_grad(const Mlp& mlp, std::span<const SampleRef> batch,
                        CostKind cost);

/// Same, writing into a reusable Gradients buffer (reshaped and zeroed as
/// needed) and returning the batch's summed squared error.
double backprop_grad_with_loss(const Mlp& mlp, std::span<const SampleRef> batch,
                               CostKind cost, Gradients& out);

/// One SGD step: w -= eta/batch_size * grad.
void sgd_update(Mlp& mlp, const Gradients& grad, double learning_rate,
                std::size_t batch_size);

struct TrainConfig {
  double learning_rate = 0.1;
  long epochs = 1;
  int batch_size = 200;
  std::uint64_t seed = 0;
  CostKind cost = CostKind::LogTargetSse;
  /// Optional early stop: finish when the max absolute weight change over an
  /// epoch drops below this.
  std::optional<double> weight_delta_tol;

  void validate(std::size_t n_train) const;
};

struct TrainResult {
  Mlp model;
  std::vector<double> epoch_loss;  // mean per-sample SSE of each epoch
  long epochs_run = 0;
};

/// Plain SGD: floor(N/M) updates per epoch, batches drawn by a seeded
/// shuffle without replacement within each epoch pass. Deterministic for a
/// given (data, config). Throws NumericError when the loss goes non-finite.
TrainResult train(Mlp mlp, std::span<const SampleRef> data,
                  const TrainConfig& cfg);

struct EvalReport {
  std::vector<std::string> param_names;
  std::vector<double> rmse;  // per output, natural-log space
  // per output: (true, predicted) in natural schema units (exponentiated)
  std::vector<std::vector<std::pair<double, double>>> scatter;
};

/// Per-output RMSE sqrt(sum_j (y - yhat)^2 / N) on a test set of log-space
/// targets, plus exponentiated scatter pairs.
EvalReport evaluate_rmse(const Mlp& mlp, std::span<const SampleRef> test,
                         const std::vector<std::string>& param_names);

/// Line-oriented text model file (17 significant digits): magic + version,
/// arch, standardization, config digest, then per-layer weight rows and the
/// bias row. Round-trips bit-exactly.
void save_model(std::ostream& os, const Mlp& mlp,
                const std::string& config_digest);
void save_model(const std::filesystem::path& path, const Mlp& mlp,
                const std::string& config_digest);
struct LoadedModel {
  Mlp mlp;
  std::string config_digest;
};
LoadedModel load_model(std::istream& is, const std::string& path_for_errors);
LoadedModel load_model(const std::filesystem::path& path);

/// Throws ConfigError naming both architectures when they differ.
void require_arch(const Mlp& mlp, const MlpArch& expected,
                  const std::string& context);

}  // namespace casimir
