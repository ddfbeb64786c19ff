// Acceptance suite: runs every gate criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero when a hard criterion fails;
// warning-level physics checks report WARN without failing the run.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/dataset.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/neuralnet.hpp"
#include "casimir/pipeline.hpp"
#include "casimir/rng.hpp"
#include "casimir/textio.hpp"

using namespace casimir;

namespace {

struct Outcome {
  bool pass = false;
  bool warn_only = false;
  std::string detail;
};

std::filesystem::path g_out_dir = "acceptance_out";

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

FilmStack stack_for(const LorentzDrudeModel& film, double t) {
  FilmStack s;
  s.plate = gold_drude();
  s.film = film;
  s.substrate = gold_drude();
  s.thickness = t;
  s.temperature = 300.0;
  return s;
}

// --- criterion 1: forced perfect-conductor limit ---------------------------

Outcome criterion_pec() {
  QuadratureConfig quad;
  quad.pec_override = true;
  LorentzDrudeModel dummy;
  dummy.poles.push_back({1e15, 1e15, 1e14});
  const FilmStack stack = stack_for(dummy, 100e-9);
  Outcome out;
  out.pass = true;
  for (double d_nm : {50.0, 100.0, 200.0, 500.0}) {
    const double pn = normalized_pressure(stack, d_nm * 1e-9, quad);
    // the interval [0.99, 1.00] is stated to two decimals; the exact thermal
    // value exceeds 1 by up to 1e-4 at 500 nm, so the bound is applied at
    // that precision: |P~ - 1| <= 0.01
    if (std::abs(pn - 1.0) > 0.01) out.pass = false;
    out.detail += "P~(" + fmt(d_nm) + "nm)=" + fmt(pn) + " ";
  }
  return out;
}

// --- criterion 2: film composition identity at t -> 0 ----------------------

Outcome criterion_composition() {
  Rng rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    LorentzDrudeModel film, substrate;
    film.poles.push_back({rng.log_uniform(1e14, 1e16),
                          rng.log_uniform(1e14, 3e16),
                          rng.log_uniform(1e13, 1e16)});
    substrate.poles.push_back({rng.log_uniform(1e14, 1e16),
                               rng.log_uniform(1e14, 3e16),
                               rng.log_uniform(1e13, 1e16)});
    FilmStack stack;
    stack.plate = gold_drude();
    stack.film = film;
    stack.substrate = substrate;
    stack.thickness = 1e-30;
    const double xi = rng.log_uniform(1e13, 1e17);
    const double kpar = rng.log_uniform(1e4, 1e9);
    const double eps3 = eval_eps_imag_axis(substrate, xi);
    for (Polarization pol : {Polarization::P, Polarization::S}) {
      const double direct = fresnel_r(1.0, eps3, xi, kpar, pol);
      const double composed = film_reflection(stack, xi, kpar, pol);
      const double scale = std::max(std::abs(direct), 1e-12);
      worst = std::max(worst, std::abs(composed - direct) / scale);
    }
  }
  Outcome out;
  out.pass = worst <= 1e-12;
  out.detail = "max relative deviation " + fmt(worst) + " over 1000 tuples";
  return out;
}

// --- criterion 3: analytic derivative vs finite differences ----------------

Outcome criterion_derivative() {
  QuadratureConfig quad;
  quad.rel_tol = 1e-10;
  Rng rng(1003);
  double worst = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    LorentzDrudeModel film;
    const int np = 1 + static_cast<int>(rng.next_u64() % 4);
    for (int p = 0; p < np; ++p) {
      const double w0 =
          (p == 0 && rng.uniform01() < 0.5) ? 0.0 : rng.log_uniform(3e14, 2e16);
      film.poles.push_back(
          {w0, rng.log_uniform(3e14, 2e16), rng.log_uniform(1e13, 5e15)});
    }
    if (oscillator_strength(film) > oscillator_strength_cap()) {
      --trial;  // stay within the physical family the pipeline samples
      continue;
    }
    const FilmStack stack = stack_for(film, rng.log_uniform(10e-9, 500e-9));
    const double d = rng.log_uniform(5e-9, 2500e-9);
    const double analytic = dpnorm_dz(stack, d, quad);
    const double h = 1e-4 * d;
    const double fd = (normalized_pressure(stack, d + h, quad) -
                       normalized_pressure(stack, d - h, quad)) /
                      (2.0 * h) * 1e-6;
    const double err = std::abs(analytic - fd);
    const double scale = std::max(std::abs(analytic), std::abs(fd));
    if (err > 1e-10) {  // absolute floor guards exact zero crossings
      worst = std::max(worst, err / scale);
    }
    ++checked;
  }
  Outcome out;
  out.pass = worst <= 1e-4;
  out.detail = "max relative deviation " + fmt(worst) + " over " +
               std::to_string(checked) + " (stack, gap) pairs";
  return out;
}

// --- criterion 4: back-propagation gradient oracle --------------------------

Outcome criterion_gradients() {
  struct Case {
    MlpArch arch;
    int y_dim;
    CostKind cost;
  };
  const std::vector<Case> cases = {
      {MlpArch{{20, 20, 20, 20, 13}}, 13, CostKind::LogTargetSse},
      {MlpArch{{20, 12, 4, 12, 20}}, 20, CostKind::ReconstructionSse},
  };
  Rng rng(1004);
  double worst = 0.0;
  for (const Case& c : cases) {
    Mlp mlp = mlp_init(c.arch, rng.next_u64());
    std::vector<std::vector<double>> xs(4), ys(4);
    for (int i = 0; i < 4; ++i) {
      xs[i].resize(20);
      ys[i].resize(static_cast<std::size_t>(c.y_dim));
      for (double& v : xs[i]) v = rng.normal();
      for (double& v : ys[i]) v = 2.0 * rng.normal();
    }
    std::vector<SampleRef> batch;
    for (int i = 0; i < 4; ++i) batch.push_back({xs[i], ys[i]});
    const Gradients grad = backprop_grad(mlp, batch, c.cost);

    auto cost_of = [&]() {
      double e = 0.0;
      for (const SampleRef& s : batch) {
        const std::vector<double> out = forward(mlp, s.x);
        for (std::size_t l = 0; l < out.size(); ++l) {
          e += (out[l] - s.y[l]) * (out[l] - s.y[l]);
        }
      }
      return e;
    };
    const double h = 1e-6;
    for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
      for (int which = 0; which < 2; ++which) {
        std::vector<double>& params =
            which == 0 ? mlp.weights[l] : mlp.biases[l];
        const std::vector<double>& g =
            which == 0 ? grad.weights[l] : grad.biases[l];
        for (std::size_t i = 0; i < params.size(); ++i) {
          if (std::abs(g[i]) <= 1e-8) continue;
          const double keep = params[i];
          params[i] = keep + h;
          const double ep = cost_of();
          params[i] = keep - h;
          const double em = cost_of();
          params[i] = keep;
          const double fd = (ep - em) / (2.0 * h);
          worst = std::max(worst, std::abs(fd - g[i]) / std::abs(g[i]));
        }
      }
    }
  }
  Outcome out;
  out.pass = worst < 1e-5;
  out.detail = "max relative gradient deviation " + fmt(worst) +
               " (both architectures, both cost kinds)";
  return out;
}

// --- criteria 5 and 6: two-pole inverse problem ------------------------------

struct TwoPoleRun {
  RunResult result;
  CaseConfig cfg;
};

TwoPoleRun run_two_pole() {
  CaseConfig cfg = builtin_case("two-pole-b");
  cfg.train.epochs = 120000;  // reduced desk-scale budget (paper: 5e6)
  cfg.train.seed = 2025;
  cfg.dataset_seed = 42;
  TwoPoleRun run{run_case(cfg, g_out_dir / "two-pole-b"), cfg};
  return run;
}

Outcome criterion_two_pole(const TwoPoleRun& run) {
  const EvalReport& report = run.result.report;
  std::vector<double> truth, pred;
  const std::size_t w02_index = 1;  // order: t, w02
  for (const auto& [t, p] : report.scatter[w02_index]) {
    truth.push_back(std::log(t));
    pred.push_back(std::log(p));
  }
  const double corr = pearson(truth, pred);
  Outcome out;
  out.pass = report.rmse[0] <= 0.2 && report.rmse[1] <= 0.2 && corr >= 0.95;
  out.detail = "rmse(t)=" + fmt(report.rmse[0]) +
               " rmse(w02)=" + fmt(report.rmse[1]) +
               " pearson(ln w02)=" + fmt(corr) +
               " epochs=" + std::to_string(run.cfg.train.epochs);
  return out;
}

Outcome criterion_table_s3(const TwoPoleRun& run) {
  // the (63 nm, 8.74e15 rad/s) test point of the second two-pole dataset
  const FilmSample truth = film_from_free_values(
      run.cfg.ranges, {{"t", 63e-9}, {"w02", 8.74e15}});
  const std::vector<double> x =
      feature_vector(truth, run.cfg.grid, run.cfg.quad);
  const PredictedFilm predicted = predict_film(
      run.result.model, x, run.result.dataset.schema, run.cfg.ranges);
  const double t_err =
      std::abs(predicted.sample.thickness / truth.thickness - 1.0);
  const double w_err =
      std::abs(predicted.sample.film.poles[1].omega0 / truth.film.poles[1].omega0 -
               1.0);
  Outcome out;
  out.pass = t_err <= 0.15 && w_err <= 0.15;
  out.detail = "t=" + fmt(predicted.sample.thickness * 1e9) + "nm (true 63, " +
               fmt(100.0 * t_err) + "%), w02=" +
               fmt(predicted.sample.film.poles[1].omega0) + " (true 8.74e15, " +
               fmt(100.0 * w_err) + "%)";
  return out;
}

// --- criterion 7: four-pole damping rates are the hard ones -----------------

Outcome criterion_four_pole() {
  CaseConfig cfg = builtin_case("four-pole");
  cfg.train.epochs = 20000;  // reduced budget (paper: 4e5)
  cfg.train.seed = 7;
  cfg.dataset_seed = 2024;
  const RunResult result = run_case(cfg, g_out_dir / "four-pole");

  double gamma_sum = 0.0, freq_sum = 0.0;
  int gamma_n = 0, freq_n = 0;
  for (std::size_t i = 0; i < result.report.param_names.size(); ++i) {
    const std::string& name = result.report.param_names[i];
    if (name[0] == 'g') {
      gamma_sum += result.report.rmse[i];
      ++gamma_n;
    } else if (name[0] == 'w' && name != "t") {
      freq_sum += result.report.rmse[i];
      ++freq_n;
    }
  }
  const double gamma_mean = gamma_sum / gamma_n;
  const double freq_mean = freq_sum / freq_n;
  Outcome out;
  out.warn_only = true;  // physics property, seed sensitive
  out.pass = gamma_mean > freq_mean;
  out.detail = "mean rmse: damping " + fmt(gamma_mean) + " vs frequencies " +
               fmt(freq_mean) + " (epochs " +
               std::to_string(cfg.train.epochs) + ")";
  return out;
}

// --- criterion 8: denoiser efficacy -----------------------------------------

Outcome criterion_denoiser() {
  CaseConfig cfg = builtin_case("silicon");
  GenerationConfig gen;
  gen.case_tag = cfg.tag;
  gen.grid = cfg.grid;
  gen.ranges = cfg.ranges;
  gen.count = cfg.n_total;
  gen.master_seed = 321;
  gen.quad = cfg.quad;
  const Dataset ds = generate_dataset(gen);
  const DatasetSplit split =
      split_dataset(ds, cfg.n_train, default_split_seed(ds));

  std::vector<std::vector<double>> clean;
  for (int i : split.train_indices) {
    clean.push_back(ds.incidences[static_cast<std::size_t>(i)].x);
  }
  const Standardization st = fit_standardization(ds, split.train_indices);
  TrainConfig ae_cfg = autoencoder_train_defaults();
  ae_cfg.epochs = 30000;  // reduced budget (paper: 1e6)
  ae_cfg.seed = 5150;
  const double sigma = 0.02;
  const Mlp ae = train_denoiser(clean, sigma, ae_cfg, st);

  double noisy_err = 0.0, denoised_err = 0.0;
  for (std::size_t j = 0; j < split.test_indices.size(); ++j) {
    const Incidence& inc = ds.incidences[static_cast<std::size_t>(
        split.test_indices[j])];
    Rng rng(mix_seed(999, j));
    const std::vector<double> noisy = add_noise(inc.x, sigma, rng);
    const std::vector<double> denoised = denoise(ae, noisy);
    for (std::size_t k = 0; k < inc.x.size(); ++k) {
      noisy_err += (noisy[k] - inc.x[k]) * (noisy[k] - inc.x[k]);
      denoised_err += (denoised[k] - inc.x[k]) * (denoised[k] - inc.x[k]);
    }
  }
  const double n_test = static_cast<double>(split.test_indices.size());
  noisy_err /= n_test;
  denoised_err /= n_test;
  Outcome out;
  out.pass = denoised_err <= 0.5 * noisy_err;
  out.detail = "avg |X^-X|^2 = " + fmt(denoised_err) + " vs noisy " +
               fmt(noisy_err) + " (ratio " + fmt(denoised_err / noisy_err) +
               ", epochs " + std::to_string(ae_cfg.epochs) + ")";
  return out;
}

// --- criterion 9: cutoff insensitivity --------------------------------------

Outcome criterion_cutoff() {
  const CaseConfig cfg = builtin_case("two-pole-a");
  const std::vector<double> gaps = cfg.grid.gaps();
  auto curve = [&](double w02) {
    LorentzDrudeModel film;
    film.poles.push_back({0.0, 1e15, 1e14});
    film.poles.push_back({w02, 4.0 * w02, 0.4 * w02});
    std::vector<double> pn;
    for (double d : gaps) {
      pn.push_back(normalized_pressure(stack_for(film, 100e-9), d, cfg.quad));
    }
    return pn;
  };
  const std::vector<double> hi_a = curve(1e16);
  const std::vector<double> hi_b = curve(1e21);
  const std::vector<double> lo_a = curve(3e14);
  const std::vector<double> lo_b = curve(1e15);

  double worst_hi = 0.0, best_lo = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    worst_hi = std::max(worst_hi, std::abs(hi_b[i] / hi_a[i] - 1.0));
    best_lo = std::max(best_lo, std::abs(lo_b[i] / lo_a[i] - 1.0));
  }
  Outcome out;
  const bool above_cutoff_flat = worst_hi < 0.01;
  const bool in_band_sensitive = best_lo > 0.05;
  out.pass = above_cutoff_flat && in_band_sensitive;
  out.detail = "max |P~(1e21)/P~(1e16)-1| = " + fmt(worst_hi) +
               " (< 0.01 required); max |P~(1e15)/P~(3e14)-1| = " +
               fmt(best_lo) + " (> 0.05 required)";
  return out;
}

// --- criterion 10: byte-level determinism through the CLI -------------------

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(CASIMIR_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  if (!is) return "<missing " + p.string() + ">";
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Outcome criterion_determinism() {
  const std::filesystem::path base = g_out_dir / "determinism";
  std::filesystem::create_directories(base);
  const std::filesystem::path cfg_path = base / "cfg.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << "[case]\nname = two-pole-a\n"
        << "[grid]\ndmin_nm = 20\ndmax_nm = 2500\ncount = 10\n"
        << "[dataset]\nn = 40\nn_train = 32\n"
        << "[quad]\nrel_tol = 1e-7\n";
  }
  Outcome out;
  out.pass = true;
  std::vector<std::string> blobs;
  for (int round = 0; round < 2; ++round) {
    const std::filesystem::path dir = base / ("round" + std::to_string(round));
    std::filesystem::create_directories(dir);
    const std::string ds = (dir / "ds.csv").string();
    const std::string model = (dir / "model.txt").string();
    if (run_cli("gen --config " + cfg_path.string() + " --seed 99 --out " +
                ds) != 0 ||
        run_cli("train --dataset " + ds + " --seed 7 --out " + model +
                " --epochs 400 --n-train 32 --batch 8") != 0 ||
        run_cli("eval --model " + model + " --dataset " + ds +
                " --out-dir " + dir.string() + " --n-train 32") != 0) {
      out.pass = false;
      out.detail = "CLI pipeline failed on round " + std::to_string(round);
      return out;
    }
    blobs.push_back(slurp(dir / "ds.csv") + slurp(dir / "model.txt") +
                    slurp(dir / "report.csv") + slurp(dir / "scatter_t.csv") +
                    slurp(dir / "scatter_w02.csv"));
  }
  out.pass = blobs[0] == blobs[1];
  out.detail = out.pass ? "dataset, model and report files byte-identical"
                        : "byte difference between repeated runs";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--out-dir" && i + 1 < argc) {
      g_out_dir = argv[++i];
    }
  }
  std::filesystem::create_directories(g_out_dir);

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };

  // criteria 5 and 6 share one trained model
  std::optional<TwoPoleRun> two_pole;
  auto ensure_two_pole = [&]() -> TwoPoleRun& {
    if (!two_pole) two_pole = run_two_pole();
    return *two_pole;
  };

  const std::vector<Criterion> criteria = {
      {1, "forced perfect-conductor limit", criterion_pec},
      {2, "film composition identity", criterion_composition},
      {3, "analytic gap derivative vs finite differences",
       criterion_derivative},
      {4, "back-propagation gradient oracle", criterion_gradients},
      {5, "two-pole inverse problem",
       [&]() { return criterion_two_pole(ensure_two_pole()); }},
      {6, "two-pole roundtrip at the published test point",
       [&]() { return criterion_table_s3(ensure_two_pole()); }},
      {7, "four-pole damping rates predicted worst", criterion_four_pole},
      {8, "denoising autoencoder efficacy", criterion_denoiser},
      {9, "cutoff insensitivity of the force curves", criterion_cutoff},
      {10, "byte-identical gen/train/eval reruns", criterion_determinism},
  };

  bool all_pass = true;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const char* tag = outcome.pass          ? "PASS"
                      : outcome.warn_only   ? "WARN"
                                            : "FAIL";
    std::cout << "[" << tag << "] criterion " << c.id << ": " << c.name
              << " — " << outcome.detail << " (" << fmt(seconds) << " s)"
              << std::endl;
    if (!outcome.pass && !outcome.warn_only) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
