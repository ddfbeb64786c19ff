#include "casimir/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "casimir/errors.hpp"
#include "casimir/rng.hpp"
#include "casimir/textio.hpp"

namespace casimir {

void MlpArch::validate() const {
  if (layer_sizes.size() < 3) {
    throw ConfigError("MlpArch: need at least one hidden layer");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw ConfigError("MlpArch: layer sizes must be >= 1");
  }
}

std::string MlpArch::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(layer_sizes[i]);
  }
  return s + ")";
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    const std::size_t from = static_cast<std::size_t>(arch.layer_sizes[l]);
    const std::size_t to = static_cast<std::size_t>(arch.layer_sizes[l + 1]);
    n += to * from + to;
  }
  return n;
}

Mlp mlp_init(const MlpArch& arch, std::uint64_t seed) {
  arch.validate();
  Mlp mlp;
  mlp.arch = arch;
  Rng rng(seed);
  const std::size_t n_layers = arch.layer_sizes.size();
  mlp.weights.resize(n_layers - 1);
  mlp.biases.resize(n_layers - 1);
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    const std::size_t from = static_cast<std::size_t>(arch.layer_sizes[l]);
    const std::size_t to = static_cast<std::size_t>(arch.layer_sizes[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(from + to));
    mlp.weights[l].resize(to * from);
    for (double& w : mlp.weights[l]) w = rng.uniform(-limit, limit);
    mlp.biases[l].assign(to, 0.0);
  }
  mlp.x_mean.assign(static_cast<std::size_t>(arch.input_size()), 0.0);
  mlp.x_std.assign(static_cast<std::size_t>(arch.input_size()), 1.0);
  return mlp;
}

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void forward_into(const Mlp& mlp, std::span<const double> x,
                  ForwardCache& cache) {
  const auto& sizes = mlp.arch.layer_sizes;
  if (x.size() != static_cast<std::size_t>(sizes.front())) {
    throw std::domain_error("forward: input size " + std::to_string(x.size()) +
                            " does not match arch " + mlp.arch.to_string());
  }
  cache.activations.resize(sizes.size());
  auto& a0 = cache.activations[0];
  a0.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    a0[i] = (x[i] - mlp.x_mean[i]) / mlp.x_std[i];
  }
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t from = static_cast<std::size_t>(sizes[l]);
    const std::size_t to = static_cast<std::size_t>(sizes[l + 1]);
    const bool is_output = (l + 2 == sizes.size());
    const std::vector<double>& in = cache.activations[l];
    std::vector<double>& out = cache.activations[l + 1];
    out.resize(to);
    const double* w = mlp.weights[l].data();
    for (std::size_t t = 0; t < to; ++t) {
      double z = mlp.biases[l][t];
      const double* row = w + t * from;
      for (std::size_t f = 0; f < from; ++f) z += row[f] * in[f];
      out[t] = is_output ? z : sigmoid(z);
    }
  }
}

/// Accumulates the gradient of sum_l (yhat - y)^2 for one sample into grad,
/// returning the sample's squared error. Workspaces avoid reallocation.
double accumulate_sample(const Mlp& mlp, const SampleRef& s, Gradients& grad,
                         ForwardCache& cache, std::vector<double>& delta,
                         std::vector<double>& delta_prev) {
  const auto& sizes = mlp.arch.layer_sizes;
  forward_into(mlp, s.x, cache);
  const std::vector<double>& out = cache.activations.back();
  if (s.y.size() != out.size()) {
    throw std::domain_error("backprop_grad: target size mismatch");
  }
  double loss = 0.0;
  delta.resize(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double err = out[i] - s.y[i];
    loss += err * err;
    delta[i] = 2.0 * err;  // output layer is affine
  }
  for (std::size_t l = sizes.size() - 1; l-- > 0;) {
    const std::size_t from = static_cast<std::size_t>(sizes[l]);
    const std::size_t to = static_cast<std::size_t>(sizes[l + 1]);
    const std::vector<double>& in = cache.activations[l];
    double* gw = grad.weights[l].data();
    double* gb = grad.biases[l].data();
    for (std::size_t t = 0; t < to; ++t) {
      const double d = delta[t];
      gb[t] += d;
      double* row = gw + t * from;
      for (std::size_t f = 0; f < from; ++f) row[f] += d * in[f];
    }
    if (l == 0) break;
    delta_prev.assign(from, 0.0);
    const double* w = mlp.weights[l].data();
    for (std::size_t t = 0; t < to; ++t) {
      const double d = delta[t];
      const double* row = w + t * from;
      for (std::size_t f = 0; f < from; ++f) delta_prev[f] += row[f] * d;
    }
    // sigmoid' = a (1 - a) on the hidden activation
    for (std::size_t f = 0; f < from; ++f) {
      const double a = in[f];
      delta_prev[f] *= a * (1.0 - a);
    }
    std::swap(delta, delta_prev);
  }
  return loss;
}

Gradients zero_gradients(const Mlp& mlp) {
  Gradients g;
  g.weights.resize(mlp.weights.size());
  g.biases.resize(mlp.biases.size());
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    g.weights[l].assign(mlp.weights[l].size(), 0.0);
    g.biases[l].assign(mlp.biases[l].size(), 0.0);
  }
  return g;
}

void zero_out(Gradients& g) {
  for (auto& v : g.weights) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : g.biases) std::fill(v.begin(), v.end(), 0.0);
}

}  // namespace

std::vector<double> forward(const Mlp& mlp, std::span<const double> x) {
  ForwardCache cache;
  forward_into(mlp, x, cache);
  return cache.activations.back();
}

void forward(const Mlp& mlp, std::span<const double> x, ForwardCache& cache) {
  forward_into(mlp, x, cache);
}

Gradients backprop_grad(const Mlp& mlp, std::span<const SampleRef> batch,
                        CostKind cost) {
  Gradients grad;
  backprop_grad_with_loss(mlp, batch, cost, grad);
  return grad;
}

double backprop_grad_with_loss(const Mlp& mlp, std::span<const SampleRef> batch,
                               CostKind /*cost*/, Gradients& out) {
  // Targets already carry the cost semantics (log parameters or clean
  // features); the gradient math is a plain SSE either way.
  if (batch.empty()) {
    throw std::domain_error("backprop_grad: empty batch");
  }
  if (out.weights.size() != mlp.weights.size()) {
    out = zero_gradients(mlp);
  } else {
    zero_out(out);
  }
  ForwardCache cache;
  std::vector<double> delta, delta_prev;
  double loss = 0.0;
  for (const SampleRef& s : batch) {
    loss += accumulate_sample(mlp, s, out, cache, delta, delta_prev);
  }
  return loss;
}

void sgd_update(Mlp& mlp, const Gradients& grad, double learning_rate,
                std::size_t batch_size) {
  const double scale = learning_rate / static_cast<double>(batch_size);
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    for (std::size_t i = 0; i < mlp.weights[l].size(); ++i) {
      mlp.weights[l][i] -= scale * grad.weights[l][i];
    }
    for (std::size_t i = 0; i < mlp.biases[l].size(); ++i) {
      mlp.biases[l][i] -= scale * grad.biases[l][i];
    }
  }
}

void TrainConfig::validate(std::size_t n_train) const {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("TrainConfig: learning rate must be > 0");
  }
  if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
  if (batch_size < 1 || static_cast<std::size_t>(batch_size) > n_train) {
    throw ConfigError("TrainConfig: need 1 <= batch_size <= training size");
  }
}

TrainResult train(Mlp mlp, std::span<const SampleRef> data,
                  const TrainConfig& cfg) {
  if (data.empty()) throw std::domain_error("train: empty training set");
  cfg.validate(data.size());

  const std::size_t n = data.size();
  const std::size_t m = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t updates_per_epoch = n / m;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  TrainResult result;
  result.epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));
  Gradients grad = zero_gradients(mlp);
  ForwardCache cache;
  std::vector<double> delta, delta_prev;
  std::vector<double> w_snapshot;

  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.weight_delta_tol) {
      w_snapshot.clear();
      for (const auto& w : mlp.weights)
        w_snapshot.insert(w_snapshot.end(), w.begin(), w.end());
    }
    // without-replacement pass: shuffle, then consume consecutive batches
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng.next_u64() % (i + 1));
      std::swap(order[i], order[j]);
    }
    double epoch_sse = 0.0;
    for (std::size_t b = 0; b < updates_per_epoch; ++b) {
      zero_out(grad);
      double batch_sse = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        batch_sse += accumulate_sample(mlp, data[order[b * m + k]], grad,
                                       cache, delta, delta_prev);
      }
      if (!std::isfinite(batch_sse)) {
        throw NumericError(
            "train: non-finite loss at epoch " + std::to_string(epoch) +
            "; the learning rate is likely too high");
      }
      epoch_sse += batch_sse;
      sgd_update(mlp, grad, cfg.learning_rate, m);
    }
    result.epoch_loss.push_back(
        epoch_sse / static_cast<double>(updates_per_epoch * m));
    result.epochs_run = epoch + 1;
    if (cfg.weight_delta_tol) {
      double max_delta = 0.0;
      std::size_t k = 0;
      for (const auto& w : mlp.weights) {
        for (double v : w) {
          max_delta = std::max(max_delta, std::abs(v - w_snapshot[k++]));
        }
      }
      if (max_delta < *cfg.weight_delta_tol) break;
    }
  }
  result.model = std::move(mlp);
  return result;
}

EvalReport evaluate_rmse(const Mlp& mlp, std::span<const SampleRef> test,
                         const std::vector<std::string>& param_names) {
  if (test.empty()) throw std::domain_error("evaluate_rmse: empty test set");
  const std::size_t n_out = static_cast<std::size_t>(mlp.arch.output_size());
  if (param_names.size() != n_out) {
    throw ConfigError("evaluate_rmse: parameter names do not match outputs");
  }
  EvalReport report;
  report.param_names = param_names;
  report.rmse.assign(n_out, 0.0);
  report.scatter.assign(n_out, {});
  for (auto& s : report.scatter) s.reserve(test.size());
  for (const SampleRef& s : test) {
    const std::vector<double> yhat = forward(mlp, s.x);
    if (s.y.size() != n_out) {
      throw std::domain_error("evaluate_rmse: target size mismatch");
    }
    for (std::size_t l = 0; l < n_out; ++l) {
      const double err = yhat[l] - s.y[l];
      report.rmse[l] += err * err;
      report.scatter[l].emplace_back(std::exp(s.y[l]), std::exp(yhat[l]));
    }
  }
  for (double& v : report.rmse) {
    v = std::sqrt(v / static_cast<double>(test.size()));
  }
  return report;
}

void save_model(std::ostream& os, const Mlp& mlp,
                const std::string& config_digest) {
  os << "casimir-mlp v1\n";
  os << "arch";
  for (int s : mlp.arch.layer_sizes) os << ' ' << s;
  os << "\nxmean";
  for (double v : mlp.x_mean) os << ' ' << g17(v);
  os << "\nxstd";
  for (double v : mlp.x_std) os << ' ' << g17(v);
  os << "\nconfig " << (config_digest.empty() ? "-" : config_digest) << "\n";
  for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
    os << "layer " << l + 1 << "\n";
    const std::size_t from =
        static_cast<std::size_t>(mlp.arch.layer_sizes[l]);
    const std::size_t to =
        static_cast<std::size_t>(mlp.arch.layer_sizes[l + 1]);
    for (std::size_t t = 0; t < to; ++t) {
      os << "w";
      for (std::size_t f = 0; f < from; ++f) {
        os << ' ' << g17(mlp.weights[l][t * from + f]);
      }
      os << "\n";
    }
    os << "b";
    for (std::size_t t = 0; t < to; ++t) os << ' ' << g17(mlp.biases[l][t]);
    os << "\n";
  }
  os << "end\n";
}

void save_model(const std::filesystem::path& path, const Mlp& mlp,
                const std::string& config_digest) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  save_model(os, mlp, config_digest);
  if (!os) throw ConfigError("write failed: " + path.string());
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

LoadedModel load_model(std::istream& is, const std::string& path) {
  long lineno = 0;
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(is, line)) {
      throw ParseError(path, lineno + 1, "truncated model file");
    }
    ++lineno;
    return line;
  };

  if (trim(next_line()) != "casimir-mlp v1") {
    throw ParseError(path, lineno, "not a casimir model file");
  }
  LoadedModel loaded;
  Mlp& mlp = loaded.mlp;
  try {
    std::vector<std::string> tok = tokens_of(next_line());
    if (tok.size() < 4 || tok[0] != "arch") {
      throw ParseError(path, lineno, "expected arch line");
    }
    for (std::size_t i = 1; i < tok.size(); ++i) {
      mlp.arch.layer_sizes.push_back(static_cast<int>(parse_long(tok[i])));
    }
    mlp.arch.validate();
    const std::size_t n_in =
        static_cast<std::size_t>(mlp.arch.input_size());

    tok = tokens_of(next_line());
    if (tok.size() != n_in + 1 || tok[0] != "xmean") {
      throw ParseError(path, lineno, "expected xmean line with " +
                                         std::to_string(n_in) + " values");
    }
    for (std::size_t i = 1; i < tok.size(); ++i) {
      mlp.x_mean.push_back(parse_double(tok[i]));
    }
    tok = tokens_of(next_line());
    if (tok.size() != n_in + 1 || tok[0] != "xstd") {
      throw ParseError(path, lineno, "expected xstd line");
    }
    for (std::size_t i = 1; i < tok.size(); ++i) {
      mlp.x_std.push_back(parse_double(tok[i]));
    }
    tok = tokens_of(next_line());
    if (tok.size() != 2 || tok[0] != "config") {
      throw ParseError(path, lineno, "expected config line");
    }
    loaded.config_digest = tok[1] == "-" ? "" : tok[1];

    const std::size_t n_layers = mlp.arch.layer_sizes.size();
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
      const std::size_t from =
          static_cast<std::size_t>(mlp.arch.layer_sizes[l]);
      const std::size_t to =
          static_cast<std::size_t>(mlp.arch.layer_sizes[l + 1]);
      tok = tokens_of(next_line());
      if (tok.size() != 2 || tok[0] != "layer" ||
          parse_long(tok[1]) != static_cast<long>(l + 1)) {
        throw ParseError(path, lineno,
                         "expected 'layer " + std::to_string(l + 1) + "'");
      }
      std::vector<double> w(to * from);
      for (std::size_t t = 0; t < to; ++t) {
        tok = tokens_of(next_line());
        if (tok.size() != from + 1 || tok[0] != "w") {
          throw ParseError(path, lineno,
                           "expected weight row with " +
                               std::to_string(from) + " values");
        }
        for (std::size_t f = 0; f < from; ++f) {
          w[t * from + f] = parse_double(tok[f + 1]);
        }
      }
      mlp.weights.push_back(std::move(w));
      tok = tokens_of(next_line());
      if (tok.size() != to + 1 || tok[0] != "b") {
        throw ParseError(path, lineno, "expected bias row");
      }
      std::vector<double> b(to);
      for (std::size_t t = 0; t < to; ++t) b[t] = parse_double(tok[t + 1]);
      mlp.biases.push_back(std::move(b));
    }
    if (trim(next_line()) != "end") {
      throw ParseError(path, lineno, "missing end marker");
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, lineno, e.what());
  }
  return loaded;
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  return load_model(is, path.string());
}

void require_arch(const Mlp& mlp, const MlpArch& expected,
                  const std::string& context) {
  if (!(mlp.arch == expected)) {
    throw ConfigError(context + ": model architecture " +
                      mlp.arch.to_string() + " does not match expected " +
                      expected.to_string());
  }
}

}  // namespace casimir
