#include "casimir/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "casimir/errors.hpp"
#include "casimir/textio.hpp"
#include "casimir/version.hpp"

namespace casimir {

namespace {

SamplingRanges two_pole_ranges(double t_lo, double t_hi, const Pole& pole1,
                               double w02_lo, double w02_hi, double wp2_factor,
                               double g2_factor) {
  SamplingRanges r;
  r.thickness = ParamRule::range(t_lo, t_hi);
  r.pole_rules.resize(2);
  r.pole_rules[0] = {ParamRule::fixed(pole1.omega0),
                     ParamRule::fixed(pole1.omegap),
                     ParamRule::fixed(pole1.gamma)};
  // flat index 4 is w02
  r.pole_rules[1] = {ParamRule::range(w02_lo, w02_hi),
                     ParamRule::scaled(4, wp2_factor),
                     ParamRule::scaled(4, g2_factor)};
  return r;
}

SamplingRanges four_pole_ranges(double t_lo, double t_hi,
                                const double bounds[12][2], bool w01_fixed) {
  SamplingRanges r;
  r.thickness = ParamRule::range(t_lo, t_hi);
  r.pole_rules.resize(4);
  for (int p = 0; p < 4; ++p) {
    for (int f = 0; f < 3; ++f) {
      const int k = 3 * p + f;
      r.pole_rules[static_cast<std::size_t>(p)][static_cast<std::size_t>(f)] =
          ParamRule::range(bounds[k][0], bounds[k][1]);
    }
  }
  if (w01_fixed) r.pole_rules[0][0] = ParamRule::fixed(0.0);
  return r;
}

MlpArch characterizer_arch(int n_outputs) {
  return MlpArch{{20, 20, 20, 20, n_outputs}};
}

TrainConfig paper_train(long epochs) {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = epochs;
  cfg.batch_size = 200;
  cfg.seed = 1;
  cfg.cost = CostKind::LogTargetSse;
  return cfg;
}

}  // namespace

CaseConfig builtin_case(const std::string& tag) {
  CaseConfig cfg;
  cfg.tag = tag;
  cfg.quad = QuadratureConfig{};
  if (tag == "two-pole-a") {
    cfg.grid = gap_grid(5e-9, 2500e-9, 20);
    cfg.ranges = two_pole_ranges(10e-9, 500e-9, {0.0, 1e15, 1e14}, 3e14,
                                 1.25e16, 4.0, 0.4);
    cfg.n_total = 1000;
    cfg.n_train = 800;
    cfg.arch = characterizer_arch(2);
    cfg.train = paper_train(5000000);
  } else if (tag == "two-pole-b") {
    cfg.grid = gap_grid(5e-9, 2500e-9, 20);
    cfg.ranges = two_pole_ranges(20e-9, 300e-9, {0.0, 5e14, 2e14}, 3e14,
                                 2.5e16, 2.0, 0.8);
    cfg.n_total = 1000;
    cfg.n_train = 800;
    cfg.arch = characterizer_arch(2);
    cfg.train = paper_train(5000000);
  } else if (tag == "four-pole") {
    static const double kBounds[12][2] = {
        {0.0, 0.0},        // w01 (fixed)
        {0.316e15, 5e15},  // wp1
        {0.034e15, 6.05e15},
        {0.316e15, 5e15},  // w02
        {0.657e15, 21.3e15},
        {0.131e15, 23.3e15},
        {1.33e15, 13.9e15},  // w03
        {2.47e15, 39.8e15},
        {0.893e15, 57.5e15},
        {6.96e15, 41.6e15},  // w04
        {7.49e15, 48.9e15},
        {5.32e15, 198e15},
    };
    cfg.grid = gap_grid(5e-9, 2500e-9, 20);
    cfg.ranges = four_pole_ranges(10e-9, 500e-9, kBounds, true);
    cfg.n_total = 2000;
    cfg.n_train = 1600;
    cfg.arch = characterizer_arch(12);
    cfg.train = paper_train(400000);
  } else if (tag == "silicon") {
    static const double kBounds[12][2] = {
        {0.5e15, 12.5e15},  // w01
        {0.33e15, 33.4e15},
        {0.029e15, 2.24e15},
        {0.719e15, 13.3e15},  // w02
        {0.462e15, 33.2e15},
        {0.04e15, 4.07e15},
        {1.01e15, 23.6e15},  // w03
        {1.09e15, 46.5e15},
        {0.067e15, 5.79e15},
        {1.84e15, 31.2e15},  // w04
        {1.08e15, 36.7e15},
        {0.159e15, 6.89e15},
    };
    cfg.grid = gap_grid(50e-9, 2500e-9, 20);
    cfg.ranges = four_pole_ranges(100e-9, 500e-9, kBounds, false);
    cfg.n_total = 2000;
    cfg.n_train = 1600;
    cfg.arch = characterizer_arch(13);
    cfg.train = paper_train(800000);
  } else {
    throw ConfigError("unknown case '" + tag +
                      "' (expected one of: two-pole-a, two-pole-b, "
                      "four-pole, silicon)");
  }
  return cfg;
}

std::vector<std::string> builtin_case_tags() {
  return {"two-pole-a", "two-pole-b", "four-pole", "silicon"};
}

MlpArch autoencoder_arch(int feature_count) {
  return MlpArch{{feature_count, 12, 4, 12, feature_count}};
}

TrainConfig autoencoder_train_defaults() {
  TrainConfig cfg;
  cfg.learning_rate = 0.004;
  cfg.epochs = 1000000;
  cfg.batch_size = 200;
  cfg.seed = 1;
  cfg.cost = CostKind::ReconstructionSse;
  return cfg;
}

namespace {

std::string rule_string(const SamplingRanges& r, std::size_t i) {
  const ParamRule& rule = r.rule(i);
  switch (rule.kind) {
    case ParamRule::Kind::Fixed:
      return "fixed " + g17(rule.lo);
    case ParamRule::Kind::Range:
      return "range " + g17(rule.lo) + " " + g17(rule.hi);
    case ParamRule::Kind::Scaled:
      return "scaled " + param_name(static_cast<std::size_t>(rule.source)) +
             " " + g17(rule.factor);
  }
  return {};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> manifest_entries(
    const CaseConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("tool", std::string(kToolName) + " " + kToolVersion);
  kv.emplace_back("case", cfg.tag);
  kv.emplace_back("grid_dmin_m", g17(cfg.grid.d_min));
  kv.emplace_back("grid_dmax_m", g17(cfg.grid.d_max));
  kv.emplace_back("grid_count", std::to_string(cfg.grid.count));
  for (std::size_t i = 0; i < cfg.ranges.n_params(); ++i) {
    kv.emplace_back("range_" + param_name(i), rule_string(cfg.ranges, i));
  }
  kv.emplace_back("law", cfg.ranges.law == SamplingLaw::LogUniform
                             ? "log-uniform"
                             : "uniform");
  kv.emplace_back("n_total", std::to_string(cfg.n_total));
  kv.emplace_back("n_train", std::to_string(cfg.n_train));
  kv.emplace_back("arch", cfg.arch.to_string());
  kv.emplace_back("learning_rate", g17(cfg.train.learning_rate));
  kv.emplace_back("epochs", std::to_string(cfg.train.epochs));
  kv.emplace_back("batch_size", std::to_string(cfg.train.batch_size));
  kv.emplace_back("train_seed", std::to_string(cfg.train.seed));
  kv.emplace_back("dataset_seed", std::to_string(cfg.dataset_seed));
  kv.emplace_back("noise_sigma", g17(cfg.noise_sigma));
  kv.emplace_back("standardize", cfg.standardize ? "true" : "false");
  kv.emplace_back("quad_rel_tol", g17(cfg.quad.rel_tol));
  kv.emplace_back("quad_gl_nodes", std::to_string(cfg.quad.gl_nodes));
  kv.emplace_back("quad_consecutive_small",
                  std::to_string(cfg.quad.matsubara_consecutive_small));
  return kv;
}

std::string case_config_digest(const CaseConfig& cfg) {
  std::string blob;
  for (const auto& [k, v] : manifest_entries(cfg)) {
    blob += k;
    blob += '=';
    blob += v;
    blob += '\n';
  }
  return fnv1a64_hex(blob);
}

FilmSample film_from_free_values(
    const SamplingRanges& ranges,
    const std::map<std::string, double>& free_values) {
  ranges.validate();
  const std::size_t n = ranges.n_params();
  std::vector<double> flat(n, 0.0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const ParamRule& r = ranges.rule(i);
    if (r.is_free()) {
      auto it = free_values.find(param_name(i));
      if (it == free_values.end()) {
        throw ConfigError("film_from_free_values: missing value for free "
                          "parameter " +
                          param_name(i));
      }
      flat[i] = it->second;
      ++used;
    } else if (r.kind != ParamRule::Kind::Scaled) {
      flat[i] = r.lo;
    }
  }
  if (used != free_values.size()) {
    throw ConfigError(
        "film_from_free_values: a supplied parameter is not free in this "
        "case");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ParamRule& r = ranges.rule(i);
    if (r.kind == ParamRule::Kind::Scaled) {
      flat[i] = r.factor * flat[static_cast<std::size_t>(r.source)];
    }
  }
  return unflatten_params(flat);
}

PredictedFilm predict_film(const Mlp& mlp, std::span<const double> x,
                           const TargetSchema& schema,
                           const SamplingRanges& ranges) {
  const std::vector<double> y = forward(mlp, x);
  PredictedFilm out;
  out.sample = film_from_target(y, schema, ranges);
  return out;
}

SpectrumTable predict_spectrum(const LorentzDrudeModel& film,
                               std::span<const double> omega_grid) {
  SpectrumTable table;
  table.omega.reserve(omega_grid.size());
  table.eps.reserve(omega_grid.size());
  double prev = 0.0;
  for (double w : omega_grid) {
    if (!(w > 0.0) || w <= prev) {
      throw std::domain_error(
          "predict_spectrum: grid must be positive ascending");
    }
    prev = w;
    table.omega.push_back(w);
    table.eps.push_back(eval_eps_real_freq(film, w));
  }
  return table;
}

std::vector<double> default_spectrum_grid() {
  const int n = 400;
  std::vector<double> grid(n);
  const double lo = std::log(1e14), hi = std::log(1e17);
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(lo + (hi - lo) * i / (n - 1));
  }
  return grid;
}

void write_spectrum_csv(std::ostream& os, const SpectrumTable& table,
                        const std::vector<std::string>& comment_lines) {
  for (const std::string& line : comment_lines) os << "# " << line << "\n";
  os << "omega_radps,re_eps,im_eps\n";
  for (std::size_t i = 0; i < table.omega.size(); ++i) {
    os << g17(table.omega[i]) << ',' << g17(table.eps[i].real()) << ','
       << g17(table.eps[i].imag()) << '\n';
  }
}

namespace {

std::vector<SampleRef> make_refs(const Dataset& ds,
                                 std::span<const int> indices) {
  std::vector<SampleRef> refs;
  refs.reserve(indices.size());
  for (int i : indices) {
    const Incidence& inc = ds.incidences.at(static_cast<std::size_t>(i));
    refs.push_back({inc.x, inc.y});
  }
  return refs;
}

void write_text_file(const std::filesystem::path& path,
                     const std::function<void(std::ostream&)>& fn) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  fn(os);
  if (!os) throw ConfigError("write failed: " + path.string());
}

}  // namespace

RunResult run_case(const CaseConfig& cfg, const std::filesystem::path& out_dir,
                   const std::optional<std::filesystem::path>& dataset_in) {
  cfg.arch.validate();
  std::filesystem::create_directories(out_dir);
  const std::string digest = case_config_digest(cfg);
  const std::vector<std::string> comments = {
      std::string("tool=") + kToolName + " " + kToolVersion,
      "config_digest=" + digest};

  RunResult result;
  std::vector<std::filesystem::path> written;
  try {
    if (dataset_in) {
      result.dataset = read_dataset(*dataset_in);
      result.artifacts.dataset = *dataset_in;
    } else {
      GenerationConfig gen;
      gen.case_tag = cfg.tag;
      gen.grid = cfg.grid;
      gen.ranges = cfg.ranges;
      gen.count = cfg.n_total;
      gen.master_seed = cfg.dataset_seed;
      gen.noise_sigma = cfg.noise_sigma;
      gen.quad = cfg.quad;
      gen.threads = cfg.threads;
      result.dataset = generate_dataset(gen);
      result.artifacts.dataset = out_dir / "dataset.csv";
      write_dataset(result.artifacts.dataset, result.dataset, comments);
      written.push_back(result.artifacts.dataset);
    }
    const Dataset& ds = result.dataset;
    if (static_cast<int>(ds.schema.n_free()) != cfg.arch.output_size()) {
      throw ConfigError("run_case: schema has " +
                        std::to_string(ds.schema.n_free()) +
                        " free parameters but the network outputs " +
                        std::to_string(cfg.arch.output_size()));
    }

    result.split = split_dataset(ds, cfg.n_train, default_split_seed(ds));
    Mlp mlp = mlp_init(cfg.arch, mix_seed(cfg.train.seed, 1));
    if (cfg.standardize) {
      const Standardization st =
          fit_standardization(ds, result.split.train_indices);
      mlp.x_mean = st.mean;
      mlp.x_std = st.stddev;
    }
    const std::vector<SampleRef> train_refs =
        make_refs(ds, result.split.train_indices);
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = mix_seed(cfg.train.seed, 2);
    TrainResult trained = train(std::move(mlp), train_refs, train_cfg);
    result.model = std::move(trained.model);

    const std::vector<SampleRef> test_refs =
        make_refs(ds, result.split.test_indices);
    result.report =
        evaluate_rmse(result.model, test_refs, ds.schema.free_names());

    result.artifacts.model = out_dir / "model.txt";
    save_model(result.artifacts.model, result.model, digest);
    written.push_back(result.artifacts.model);

    result.artifacts.report = out_dir / "report.csv";
    write_text_file(result.artifacts.report, [&](std::ostream& os) {
      write_report_csv(os, result.report, comments);
    });
    written.push_back(result.artifacts.report);

    for (std::size_t p = 0; p < result.report.param_names.size(); ++p) {
      const std::filesystem::path path =
          out_dir / ("scatter_" + result.report.param_names[p] + ".csv");
      write_text_file(path, [&](std::ostream& os) {
        write_scatter_csv(os, result.report, p, comments);
      });
      result.artifacts.scatter.push_back(path);
      written.push_back(path);
    }

    result.artifacts.manifest = out_dir / "manifest";
    write_text_file(result.artifacts.manifest, [&](std::ostream& os) {
      auto entries = manifest_entries(cfg);
      entries.emplace_back("split_seed", std::to_string(default_split_seed(ds)));
      entries.emplace_back("config_digest", digest);
      write_manifest(os, entries);
    });
    written.push_back(result.artifacts.manifest);
  } catch (...) {
    std::error_code ec;
    for (const auto& path : written) std::filesystem::remove(path, ec);
    throw;
  }
  return result;
}

Mlp train_denoiser(const std::vector<std::vector<double>>& clean_x,
                   double noise_sigma, const TrainConfig& cfg,
                   const Standardization& st) {
  if (clean_x.empty()) throw std::domain_error("train_denoiser: no data");
  const int dim = static_cast<int>(clean_x.front().size());
  cfg.validate(clean_x.size());
  if (noise_sigma < 0.0) {
    throw std::domain_error("train_denoiser: sigma must be >= 0");
  }

  Mlp ae = mlp_init(autoencoder_arch(dim), mix_seed(cfg.seed, 1));
  ae.x_mean = st.mean;
  ae.x_std = st.stddev;

  // Standardized clean targets are fixed; noisy inputs are drawn fresh at
  // every presentation.
  std::vector<std::vector<double>> targets(clean_x.size());
  for (std::size_t i = 0; i < clean_x.size(); ++i) {
    targets[i].resize(clean_x[i].size());
    for (std::size_t j = 0; j < clean_x[i].size(); ++j) {
      targets[i][j] = (clean_x[i][j] - st.mean[j]) / st.stddev[j];
    }
  }

  const std::size_t n = clean_x.size();
  const std::size_t m = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t updates_per_epoch = n / m;
  Rng shuffle_rng(mix_seed(cfg.seed, 2));
  Rng noise_rng(mix_seed(cfg.seed, 3));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<std::vector<double>> noisy(m);
  std::vector<SampleRef> batch(m);
  Gradients grad;
  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(shuffle_rng.next_u64() % (i + 1));
      std::swap(order[i], order[j]);
    }
    for (std::size_t b = 0; b < updates_per_epoch; ++b) {
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t idx = order[b * m + k];
        noisy[k] = add_noise(clean_x[idx], noise_sigma, noise_rng);
        batch[k] = {noisy[k], targets[idx]};
      }
      const double loss = backprop_grad_with_loss(
          ae, batch, CostKind::ReconstructionSse, grad);
      if (!std::isfinite(loss)) {
        throw NumericError("train_denoiser: non-finite loss at epoch " +
                           std::to_string(epoch));
      }
      sgd_update(ae, grad, cfg.learning_rate, m);
    }
  }
  return ae;
}

std::vector<double> denoise(const Mlp& autoencoder,
                            std::span<const double> x_noisy) {
  if (static_cast<int>(x_noisy.size()) != autoencoder.arch.input_size()) {
    throw std::domain_error("denoise: feature length mismatch");
  }
  std::vector<double> out = forward(autoencoder, x_noisy);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = out[i] * autoencoder.x_std[i] + autoencoder.x_mean[i];
  }
  return out;
}

PredictedFilm end_to_end(const Mlp& autoencoder, const Mlp& mlp,
                         std::span<const double> x_noisy,
                         const TargetSchema& schema,
                         const SamplingRanges& ranges) {
  if (autoencoder.arch.input_size() != autoencoder.arch.output_size() ||
      autoencoder.arch.output_size() != mlp.arch.input_size()) {
    throw ConfigError(
        "end_to_end: autoencoder and characterizer feature dimensions do "
        "not match (" +
        autoencoder.arch.to_string() + " vs " + mlp.arch.to_string() + ")");
  }
  return predict_film(mlp, denoise(autoencoder, x_noisy), schema, ranges);
}

void write_report_csv(std::ostream& os, const EvalReport& report,
                      const std::vector<std::string>& comment_lines) {
  for (const std::string& line : comment_lines) os << "# " << line << "\n";
  os << "parameter,rmse\n";
  for (std::size_t i = 0; i < report.param_names.size(); ++i) {
    os << report.param_names[i] << ',' << g17(report.rmse[i]) << '\n';
  }
}

void write_scatter_csv(std::ostream& os, const EvalReport& report,
                       std::size_t param_index,
                       const std::vector<std::string>& comment_lines) {
  for (const std::string& line : comment_lines) os << "# " << line << "\n";
  // schema units: thickness carries 1e3 m, frequencies rad/s
  const bool is_thickness = report.param_names.at(param_index) == "t";
  const double scale = is_thickness ? 1e12 : 1.0;  // 1e3 m -> nm
  os << (is_thickness ? "true_nm,predicted_nm" : "true_radps,predicted_radps")
     << '\n';
  for (const auto& [t, p] : report.scatter.at(param_index)) {
    os << g17(t * scale) << ',' << g17(p * scale) << '\n';
  }
}

void write_manifest(
    std::ostream& os,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
}

}  // namespace casimir
