// Command-line front end. Every subcommand is a thin wrapper over the core
// library; no numeric logic lives here.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casimir/dataset.hpp"
#include "casimir/errors.hpp"
#include "casimir/neuralnet.hpp"
#include "casimir/pipeline.hpp"
#include "casimir/runconfig.hpp"
#include "casimir/textio.hpp"
#include "casimir/version.hpp"

namespace {

using namespace casimir;

std::vector<std::string> standard_comments(const std::string& digest) {
  return {std::string("tool=") + kToolName + " " + kToolVersion,
          "config_digest=" + digest};
}

std::string args_digest(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string blob;
  for (const auto& [k, v] : kv) blob += k + "=" + v + "\n";
  return fnv1a64_hex(blob);
}

/// Shared --config / --case resolution. Flags override file values.
struct CaseSelection {
  std::string config_path;
  std::string case_tag;

  RunConfig resolve() const {
    if (!config_path.empty()) {
      RunConfig rc = load_run_config(config_path);
      if (!case_tag.empty() && case_tag != rc.case_config.tag) {
        throw ConfigError("--case '" + case_tag +
                          "' conflicts with config file case '" +
                          rc.case_config.tag + "'");
      }
      return rc;
    }
    if (case_tag.empty()) {
      throw ConfigError("either --case or --config is required");
    }
    return default_run_config(case_tag);
  }
};

Pole parse_pole(const std::string& text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 3) {
    throw ConfigError("--pole expects 'w0,wp,g' in rad/s, got '" + text + "'");
  }
  return {parse_double(parts[0]), parse_double(parts[1]),
          parse_double(parts[2])};
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot open " + path + " for writing");
  return file;
}

std::vector<double> features_from_string(const std::string& text) {
  std::vector<double> x;
  for (const std::string& tok : split(text, ',')) x.push_back(parse_double(tok));
  return x;
}

int cmd_gen(const CaseSelection& sel, std::uint64_t seed,
            const std::string& out, std::optional<int> n,
            std::optional<double> noise_sigma, std::optional<int> threads) {
  RunConfig rc = sel.resolve();
  CaseConfig& cc = rc.case_config;
  cc.dataset_seed = seed;
  if (n) cc.n_total = *n;
  if (noise_sigma) cc.noise_sigma = *noise_sigma;
  if (threads) cc.threads = *threads;

  GenerationConfig gen;
  gen.case_tag = cc.tag;
  gen.grid = cc.grid;
  gen.ranges = cc.ranges;
  gen.count = cc.n_total;
  gen.master_seed = seed;
  gen.noise_sigma = cc.noise_sigma;
  gen.quad = cc.quad;
  gen.threads = cc.threads;
  const Dataset ds = generate_dataset(gen);
  write_dataset(std::filesystem::path(out), ds,
                {"config_digest=" + case_config_digest(cc)});
  std::cerr << "wrote " << ds.incidences.size() << " incidences to " << out
            << "\n";
  return 0;
}

/// Reconstructs the effective case settings for a dataset that is about to
/// be trained on, so the stamped digest matches what actually ran.
CaseConfig case_for_dataset(const Dataset& ds, int n_train) {
  CaseConfig cc;
  try {
    cc = builtin_case(ds.case_tag);
  } catch (const ConfigError&) {
    cc.tag = ds.case_tag;
    cc.train = TrainConfig{};
  }
  cc.grid = ds.grid;
  cc.ranges = ds.ranges;
  cc.n_total = static_cast<int>(ds.incidences.size());
  if (n_train > 0) cc.n_train = n_train;
  cc.noise_sigma = ds.noise_sigma;
  cc.quad = ds.quad;
  cc.dataset_seed = ds.master_seed;
  cc.arch = MlpArch{{ds.grid.count, 20, 20, 20, ds.schema.n_free()}};
  return cc;
}

int cmd_train(const std::string& dataset_path, std::uint64_t seed,
              const std::string& out, std::optional<long> epochs,
              std::optional<double> lr, std::optional<int> batch,
              std::optional<int> n_train, bool no_standardize,
              std::optional<double> weight_delta_tol,
              const std::string& loss_out) {
  const Dataset ds = read_dataset(std::filesystem::path(dataset_path));
  CaseConfig cc = case_for_dataset(ds, n_train.value_or(0));
  if (cc.n_train <= 0) {
    throw ConfigError("dataset case '" + ds.case_tag +
                      "' has no default split; pass --n-train");
  }
  cc.train.seed = seed;
  if (epochs) cc.train.epochs = *epochs;
  if (lr) cc.train.learning_rate = *lr;
  if (batch) cc.train.batch_size = *batch;
  if (weight_delta_tol) cc.train.weight_delta_tol = *weight_delta_tol;
  cc.standardize = !no_standardize;

  const DatasetSplit split = split_dataset(ds, cc.n_train, default_split_seed(ds));
  Mlp mlp = mlp_init(cc.arch, mix_seed(seed, 1));
  if (cc.standardize) {
    const Standardization st = fit_standardization(ds, split.train_indices);
    mlp.x_mean = st.mean;
    mlp.x_std = st.stddev;
  }
  std::vector<SampleRef> train_refs;
  train_refs.reserve(split.train_indices.size());
  for (int i : split.train_indices) {
    const Incidence& inc = ds.incidences[static_cast<std::size_t>(i)];
    train_refs.push_back({inc.x, inc.y});
  }
  TrainConfig tc = cc.train;
  tc.seed = mix_seed(seed, 2);
  const TrainResult result = train(std::move(mlp), train_refs, tc);
  save_model(std::filesystem::path(out), result.model, case_config_digest(cc));
  if (!loss_out.empty()) {
    std::ofstream os(loss_out);
    if (!os) throw ConfigError("cannot open " + loss_out + " for writing");
    os << "epoch,mean_sse\n";
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
      os << e + 1 << ',' << g17(result.epoch_loss[e]) << '\n';
    }
  }
  std::cerr << "trained " << result.epochs_run << " epochs; model saved to "
            << out << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& dataset_path,
             const std::string& out_dir, std::optional<int> n_train) {
  const LoadedModel loaded = load_model(std::filesystem::path(model_path));
  const Dataset ds = read_dataset(std::filesystem::path(dataset_path));
  const CaseConfig cc = case_for_dataset(ds, n_train.value_or(0));
  if (cc.n_train <= 0) {
    throw ConfigError("dataset case '" + ds.case_tag +
                      "' has no default split; pass --n-train");
  }
  if (loaded.mlp.arch.input_size() != ds.grid.count ||
      loaded.mlp.arch.output_size() != ds.schema.n_free()) {
    throw ConfigError("model " + loaded.mlp.arch.to_string() +
                      " does not fit dataset with " +
                      std::to_string(ds.grid.count) + " features and " +
                      std::to_string(ds.schema.n_free()) + " free parameters");
  }
  const DatasetSplit split = split_dataset(ds, cc.n_train, default_split_seed(ds));
  std::vector<SampleRef> test_refs;
  test_refs.reserve(split.test_indices.size());
  for (int i : split.test_indices) {
    const Incidence& inc = ds.incidences[static_cast<std::size_t>(i)];
    test_refs.push_back({inc.x, inc.y});
  }
  const EvalReport report =
      evaluate_rmse(loaded.mlp, test_refs, ds.schema.free_names());

  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const std::vector<std::string> comments = standard_comments(
      loaded.config_digest.empty() ? "unrecorded" : loaded.config_digest);
  {
    std::ofstream os(dir / "report.csv");
    if (!os) throw ConfigError("cannot write report.csv");
    write_report_csv(os, report, comments);
  }
  for (std::size_t p = 0; p < report.param_names.size(); ++p) {
    std::ofstream os(dir / ("scatter_" + report.param_names[p] + ".csv"));
    if (!os) throw ConfigError("cannot write scatter file");
    write_scatter_csv(os, report, p, comments);
  }
  for (std::size_t p = 0; p < report.param_names.size(); ++p) {
    std::cerr << "rmse[" << report.param_names[p] << "] = " << report.rmse[p]
              << "\n";
  }
  std::cerr << "report written to " << (dir / "report.csv").string() << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& dataset_path,
                std::optional<int> index, const std::string& features,
                const std::string& out) {
  const LoadedModel loaded = load_model(std::filesystem::path(model_path));
  const Dataset ds = read_dataset(std::filesystem::path(dataset_path));
  std::vector<double> x;
  if (!features.empty()) {
    x = features_from_string(features);
  } else if (index) {
    const std::size_t i = static_cast<std::size_t>(*index);
    if (i >= ds.incidences.size()) {
      throw ConfigError("--index out of range (dataset has " +
                        std::to_string(ds.incidences.size()) + " incidences)");
    }
    x = ds.incidences[i].x;
  } else {
    throw ConfigError("predict needs --index or --features");
  }
  const PredictedFilm predicted =
      predict_film(loaded.mlp, x, ds.schema, ds.ranges);

  std::ofstream file;
  std::ostream& os = open_output(file, out);
  for (const std::string& line :
       standard_comments(loaded.config_digest.empty() ? "unrecorded"
                                                      : loaded.config_digest)) {
    os << "# " << line << "\n";
  }
  os << "parameter,value\n";
  os << "t_nm," << g17(predicted.sample.thickness * 1e9) << "\n";
  const std::vector<double> flat = flatten_params(predicted.sample);
  for (std::size_t i = 1; i < flat.size(); ++i) {
    os << param_name(i) << ',' << g17(flat[i]) << "\n";
  }
  return 0;
}

int cmd_denoise_train(const std::string& dataset_path, std::uint64_t seed,
                      const std::string& out, double noise_sigma,
                      std::optional<long> epochs, std::optional<double> lr,
                      std::optional<int> batch, std::optional<int> n_train) {
  const Dataset ds = read_dataset(std::filesystem::path(dataset_path));
  const CaseConfig cc = case_for_dataset(ds, n_train.value_or(0));
  if (cc.n_train <= 0) {
    throw ConfigError("dataset case '" + ds.case_tag +
                      "' has no default split; pass --n-train");
  }
  const DatasetSplit split = split_dataset(ds, cc.n_train, default_split_seed(ds));
  std::vector<std::vector<double>> clean;
  clean.reserve(split.train_indices.size());
  for (int i : split.train_indices) {
    clean.push_back(ds.incidences[static_cast<std::size_t>(i)].x);
  }
  const Standardization st = fit_standardization(ds, split.train_indices);
  TrainConfig tc = autoencoder_train_defaults();
  tc.seed = seed;
  if (epochs) tc.epochs = *epochs;
  if (lr) tc.learning_rate = *lr;
  if (batch) tc.batch_size = *batch;
  const Mlp ae = train_denoiser(clean, noise_sigma, tc, st);

  std::vector<std::pair<std::string, std::string>> kv = {
      {"dataset", dataset_path},
      {"noise_sigma", g17(noise_sigma)},
      {"learning_rate", g17(tc.learning_rate)},
      {"epochs", std::to_string(tc.epochs)},
      {"batch_size", std::to_string(tc.batch_size)},
      {"seed", std::to_string(seed)}};
  save_model(std::filesystem::path(out), ae, args_digest(kv));
  std::cerr << "autoencoder saved to " << out << "\n";
  return 0;
}

int cmd_denoise(const std::string& model_path, const std::string& dataset_path,
                const std::string& out, double noise_sigma,
                std::uint64_t noise_seed) {
  const LoadedModel loaded = load_model(std::filesystem::path(model_path));
  Dataset ds = read_dataset(std::filesystem::path(dataset_path));
  if (loaded.mlp.arch.input_size() != ds.grid.count ||
      loaded.mlp.arch.output_size() != ds.grid.count) {
    throw ConfigError("autoencoder " + loaded.mlp.arch.to_string() +
                      " does not fit " + std::to_string(ds.grid.count) +
                      "-point feature vectors");
  }
  for (std::size_t i = 0; i < ds.incidences.size(); ++i) {
    std::vector<double> x = ds.incidences[i].x;
    if (noise_sigma > 0.0) {
      Rng rng(mix_seed(noise_seed, i));
      x = add_noise(x, noise_sigma, rng);
    }
    ds.incidences[i].x = denoise(loaded.mlp, x);
  }
  write_dataset(std::filesystem::path(out), ds,
                {"denoised_with=" + model_path,
                 "applied_noise_sigma=" + g17(noise_sigma),
                 "applied_noise_seed=" + std::to_string(noise_seed)});
  std::cerr << "denoised dataset written to " << out << "\n";
  return 0;
}

int cmd_force_curve(const CaseSelection& sel, std::optional<double> t_nm,
                    std::optional<double> w02,
                    const std::vector<std::string>& pole_args,
                    std::optional<double> dmin_nm, std::optional<double> dmax_nm,
                    std::optional<int> points, const std::string& out) {
  RunConfig rc = sel.resolve();
  CaseConfig& cc = rc.case_config;
  GapGrid grid = cc.grid;
  if (dmin_nm || dmax_nm || points) {
    grid = gap_grid(dmin_nm ? *dmin_nm * 1e-9 : grid.d_min,
                    dmax_nm ? *dmax_nm * 1e-9 : grid.d_max,
                    points ? *points : grid.count);
  }
  FilmSample sample;
  if (!pole_args.empty()) {
    if (!t_nm) throw ConfigError("--t-nm is required with --pole");
    sample.thickness = *t_nm * 1e-9;
    for (const std::string& p : pole_args) {
      sample.film.poles.push_back(parse_pole(p));
    }
  } else {
    std::map<std::string, double> values;
    if (t_nm) values["t"] = *t_nm * 1e-9;
    if (w02) values["w02"] = *w02;
    sample = film_from_free_values(cc.ranges, values);
  }
  const ForceCurve curve =
      force_curve(gold_film_stack(sample), grid.gaps(), cc.quad);

  std::vector<std::pair<std::string, std::string>> kv = {
      {"case", cc.tag}, {"t_m", g17(sample.thickness)}};
  const std::vector<double> flat = flatten_params(sample);
  for (std::size_t i = 1; i < flat.size(); ++i) {
    kv.emplace_back(param_name(i), g17(flat[i]));
  }
  std::ofstream file;
  std::ostream& os = open_output(file, out);
  write_force_curve_csv(os, curve, standard_comments(args_digest(kv)));
  return 0;
}

int cmd_spectrum(const std::vector<std::string>& pole_args, double omega_min,
                 double omega_max, int points, const std::string& out) {
  LorentzDrudeModel film;
  for (const std::string& p : pole_args) film.poles.push_back(parse_pole(p));
  if (!(omega_min > 0.0) || !(omega_max > omega_min) || points < 1) {
    throw ConfigError("spectrum: need 0 < omega-min < omega-max, points >= 1");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = omega_min;
  } else {
    const double lo = std::log(omega_min), hi = std::log(omega_max);
    for (int i = 0; i < points; ++i) {
      grid[static_cast<std::size_t>(i)] =
          std::exp(lo + (hi - lo) * i / (points - 1));
    }
  }
  const SpectrumTable table = predict_spectrum(film, grid);
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 0; i < film.poles.size(); ++i) {
    kv.emplace_back("pole" + std::to_string(i + 1),
                    g17(film.poles[i].omega0) + "," + g17(film.poles[i].omegap) +
                        "," + g17(film.poles[i].gamma));
  }
  std::ofstream file;
  std::ostream& os = open_output(file, out);
  write_spectrum_csv(os, table, standard_comments(args_digest(kv)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolName) + " " + kToolVersion +
               " - Casimir pressure curves and neural-network film "
               "characterization"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded dataset");
  CaseSelection gen_sel;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::optional<int> gen_n, gen_threads;
  std::optional<double> gen_sigma;
  gen->add_option("--case", gen_sel.case_tag, "Built-in case tag");
  gen->add_option("--config", gen_sel.config_path, "Run-config file");
  gen->add_option("--seed", gen_seed, "Master seed")->required();
  gen->add_option("--out", gen_out, "Output dataset CSV")->required();
  gen->add_option("--n", gen_n, "Number of incidences");
  gen->add_option("--noise-sigma", gen_sigma, "Recorded noise sigma");
  gen->add_option("--threads", gen_threads, "Generation threads (0 = auto)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a characterizer network");
  std::string train_ds, train_out, train_loss_out;
  std::uint64_t train_seed = 0;
  std::optional<long> train_epochs;
  std::optional<double> train_lr, train_wtol;
  std::optional<int> train_batch, train_ntrain;
  bool train_nostd = false;
  train_cmd->add_option("--dataset", train_ds, "Dataset CSV")->required();
  train_cmd->add_option("--seed", train_seed, "Training seed")->required();
  train_cmd->add_option("--out", train_out, "Model file")->required();
  train_cmd->add_option("--epochs", train_epochs, "Epoch budget");
  train_cmd->add_option("--lr", train_lr, "Learning rate");
  train_cmd->add_option("--batch", train_batch, "Batch size");
  train_cmd->add_option("--n-train", train_ntrain, "Training split size");
  train_cmd->add_flag("--no-standardize", train_nostd,
                      "Disable input standardization");
  train_cmd->add_option("--weight-delta-tol", train_wtol,
                        "Early-stop weight tolerance");
  train_cmd->add_option("--loss-out", train_loss_out, "Loss history CSV");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on a test split");
  std::string eval_model, eval_ds, eval_out;
  std::optional<int> eval_ntrain;
  eval_cmd->add_option("--model", eval_model, "Model file")->required();
  eval_cmd->add_option("--dataset", eval_ds, "Dataset CSV")->required();
  eval_cmd->add_option("--out-dir", eval_out, "Report directory")->required();
  eval_cmd->add_option("--n-train", eval_ntrain, "Training split size");

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "Predict film parameters from features");
  std::string pred_model, pred_ds, pred_features, pred_out;
  std::optional<int> pred_index;
  predict_cmd->add_option("--model", pred_model, "Model file")->required();
  predict_cmd->add_option("--dataset", pred_ds, "Dataset CSV (schema source)")
      ->required();
  predict_cmd->add_option("--index", pred_index, "Incidence index");
  predict_cmd->add_option("--features", pred_features,
                          "Comma-separated feature vector");
  predict_cmd->add_option("--out", pred_out, "Output CSV (default stdout)");

  // denoise-train
  auto* dt_cmd =
      app.add_subcommand("denoise-train", "Train the denoising autoencoder");
  std::string dt_ds, dt_out;
  std::uint64_t dt_seed = 0;
  double dt_sigma = 0.02;
  std::optional<long> dt_epochs;
  std::optional<double> dt_lr;
  std::optional<int> dt_batch, dt_ntrain;
  dt_cmd->add_option("--dataset", dt_ds, "Dataset CSV")->required();
  dt_cmd->add_option("--seed", dt_seed, "Training seed")->required();
  dt_cmd->add_option("--out", dt_out, "Autoencoder model file")->required();
  dt_cmd->add_option("--noise-sigma", dt_sigma, "Training noise sigma");
  dt_cmd->add_option("--epochs", dt_epochs, "Epoch budget");
  dt_cmd->add_option("--lr", dt_lr, "Learning rate");
  dt_cmd->add_option("--batch", dt_batch, "Batch size");
  dt_cmd->add_option("--n-train", dt_ntrain, "Training split size");

  // denoise
  auto* dn_cmd = app.add_subcommand("denoise", "Run features through the autoencoder");
  std::string dn_model, dn_ds, dn_out;
  double dn_sigma = 0.0;
  std::uint64_t dn_seed = 0;
  dn_cmd->add_option("--model", dn_model, "Autoencoder model file")->required();
  dn_cmd->add_option("--dataset", dn_ds, "Dataset CSV")->required();
  dn_cmd->add_option("--out", dn_out, "Output dataset CSV")->required();
  dn_cmd->add_option("--noise-sigma", dn_sigma,
                     "Noise added before denoising (default 0)");
  dn_cmd->add_option("--noise-seed", dn_seed, "Seed for the added noise");

  // force-curve
  auto* fc_cmd = app.add_subcommand(
      "force-curve", "Pressure, normalized pressure and derivative vs gap");
  CaseSelection fc_sel;
  std::optional<double> fc_tnm, fc_w02, fc_dmin, fc_dmax;
  std::optional<int> fc_points;
  std::vector<std::string> fc_poles;
  std::string fc_out;
  fc_cmd->add_option("--case", fc_sel.case_tag, "Built-in case tag");
  fc_cmd->add_option("--config", fc_sel.config_path, "Run-config file");
  fc_cmd->add_option("--t-nm", fc_tnm, "Film thickness in nm");
  fc_cmd->add_option("--w02", fc_w02, "Second-pole resonance (rad/s)");
  fc_cmd->add_option("--pole", fc_poles, "Explicit pole 'w0,wp,g' (repeatable)");
  fc_cmd->add_option("--dmin-nm", fc_dmin, "Grid start (nm)");
  fc_cmd->add_option("--dmax-nm", fc_dmax, "Grid end (nm)");
  fc_cmd->add_option("--points", fc_points, "Grid point count");
  fc_cmd->add_option("--out", fc_out, "Output CSV (default stdout)");

  // spectrum
  auto* sp_cmd = app.add_subcommand(
      "spectrum", "Permittivity spectrum of a Lorentz-Drude model");
  std::vector<std::string> sp_poles;
  double sp_omin = 1e14, sp_omax = 1e17;
  int sp_points = 400;
  std::string sp_out;
  sp_cmd->add_option("--pole", sp_poles, "Pole 'w0,wp,g' (repeatable)");
  sp_cmd->add_option("--omega-min", sp_omin, "Grid start (rad/s)");
  sp_cmd->add_option("--omega-max", sp_omax, "Grid end (rad/s)");
  sp_cmd->add_option("--points", sp_points, "Grid point count");
  sp_cmd->add_option("--out", sp_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help lands here too; keep its conventional zero exit
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      return cmd_gen(gen_sel, gen_seed, gen_out, gen_n, gen_sigma, gen_threads);
    }
    if (*train_cmd) {
      return cmd_train(train_ds, train_seed, train_out, train_epochs, train_lr,
                       train_batch, train_ntrain, train_nostd, train_wtol,
                       train_loss_out);
    }
    if (*eval_cmd) return cmd_eval(eval_model, eval_ds, eval_out, eval_ntrain);
    if (*predict_cmd) {
      return cmd_predict(pred_model, pred_ds, pred_index, pred_features,
                         pred_out);
    }
    if (*dt_cmd) {
      return cmd_denoise_train(dt_ds, dt_seed, dt_out, dt_sigma, dt_epochs,
                               dt_lr, dt_batch, dt_ntrain);
    }
    if (*dn_cmd) return cmd_denoise(dn_model, dn_ds, dn_out, dn_sigma, dn_seed);
    if (*fc_cmd) {
      return cmd_force_curve(fc_sel, fc_tnm, fc_w02, fc_poles, fc_dmin,
                             fc_dmax, fc_points, fc_out);
    }
    if (*sp_cmd) {
      return cmd_spectrum(sp_poles, sp_omin, sp_omax, sp_points, sp_out);
    }
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
