#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "casimir/errors.hpp"
#include "casimir/pipeline.hpp"
#include "doctest.h"

using namespace casimir;

TEST_SUITE_BEGIN("pipeline");

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("casimir-pipe-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

CaseConfig quick_case(const std::string& tag, int n, int n_train) {
  CaseConfig cfg = builtin_case(tag);
  cfg.n_total = n;
  cfg.n_train = n_train;
  cfg.quad.rel_tol = 1e-6;
  cfg.grid = gap_grid(50e-9, 2500e-9, 8);
  cfg.arch = MlpArch{{8, 10, 10, cfg.arch.output_size()}};
  cfg.train.epochs = 40;
  cfg.train.batch_size = n_train;
  cfg.train.seed = 9;
  cfg.dataset_seed = 77;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  REQUIRE(is);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("builtin cases expose the paper protocol shapes") {
  const CaseConfig a = builtin_case("two-pole-a");
  CHECK(a.n_total == 1000);
  CHECK(a.n_train == 800);
  CHECK(a.arch.layer_sizes == std::vector<int>{20, 20, 20, 20, 2});
  CHECK(a.train.learning_rate == 0.1);
  CHECK(a.train.batch_size == 200);
  CHECK(schema_from_ranges(a.ranges).n_free() == 2);

  const CaseConfig four = builtin_case("four-pole");
  CHECK(four.n_total == 2000);
  CHECK(four.n_train == 1600);
  CHECK(schema_from_ranges(four.ranges).n_free() == 12);
  CHECK(four.arch.output_size() == 12);

  const CaseConfig si = builtin_case("silicon");
  CHECK(schema_from_ranges(si.ranges).n_free() == 13);
  CHECK(si.grid.d_min == 50e-9);
  CHECK(si.ranges.thickness.lo == 100e-9);

  CHECK(autoencoder_arch().layer_sizes ==
        std::vector<int>{20, 12, 4, 12, 20});
  CHECK(autoencoder_train_defaults().learning_rate == 0.004);
  CHECK(autoencoder_train_defaults().batch_size == 200);

  CHECK_THROWS_AS(builtin_case("no-such-case"), ConfigError);
}

TEST_CASE("predict_film restores units") {
  const CaseConfig cfg = builtin_case("two-pole-a");
  const TargetSchema schema = schema_from_ranges(cfg.ranges);
  // identity-free network: all-zero outputs
  Mlp mlp = mlp_init(MlpArch{{20, 4, 2}}, 1);
  for (auto& w : mlp.weights) std::fill(w.begin(), w.end(), 0.0);
  const std::vector<double> x(20, 0.0);
  const PredictedFilm p = predict_film(mlp, x, schema, cfg.ranges);
  // exp(0) in schema units: thickness 1e3 m, frequencies 1 rad/s
  CHECK(p.sample.thickness == doctest::Approx(1e3).epsilon(1e-12));
  CHECK(p.sample.film.poles[1].omega0 == doctest::Approx(1.0).epsilon(1e-12));
  // fixed first pole and scaled second-pole parameters are reconstructed
  CHECK(p.sample.film.poles[0].omegap == 1e15);
  CHECK(p.sample.film.poles[1].omegap == doctest::Approx(4.0).epsilon(1e-12));

  // determinism
  const PredictedFilm q = predict_film(mlp, x, schema, cfg.ranges);
  CHECK(q.sample.thickness == p.sample.thickness);
}

TEST_CASE("film_from_free_values") {
  const CaseConfig cfg = builtin_case("two-pole-a");
  const FilmSample s =
      film_from_free_values(cfg.ranges, {{"t", 100e-9}, {"w02", 1e15}});
  CHECK(s.thickness == 100e-9);
  CHECK(s.film.poles[1].omegap == doctest::Approx(4e15));
  CHECK(s.film.poles[0].gamma == 1e14);
  CHECK_THROWS_AS(film_from_free_values(cfg.ranges, {{"t", 1e-7}}),
                  ConfigError);
  CHECK_THROWS_AS(
      film_from_free_values(cfg.ranges, {{"t", 1e-7}, {"wp1", 1.0}}),
      ConfigError);
}

TEST_CASE("predict_spectrum") {
  LorentzDrudeModel vacuum;
  const std::vector<double> grid{1e15};
  const SpectrumTable one = predict_spectrum(vacuum, grid);
  REQUIRE(one.omega.size() == 1);
  CHECK(one.eps[0].real() == 1.0);
  CHECK(one.eps[0].imag() == 0.0);

  const std::vector<double> def = default_spectrum_grid();
  CHECK(def.size() == 400);
  CHECK(def.front() == doctest::Approx(1e14));
  CHECK(def.back() == doctest::Approx(1e17));

  LorentzDrudeModel film;
  film.poles.push_back({2e15, 1e15, 1e14});
  const SpectrumTable table = predict_spectrum(film, def);
  for (std::size_t i = 0; i < table.omega.size(); ++i) {
    CHECK(std::isfinite(table.eps[i].real()));
    CHECK(table.eps[i].imag() > 0.0);
  }
  CHECK_THROWS_AS(predict_spectrum(film, std::vector<double>{2e15, 1e15}),
                  std::domain_error);

  std::ostringstream os;
  write_spectrum_csv(os, one);
  CHECK(os.str() == "omega_radps,re_eps,im_eps\n1e+15,1,0\n");
}

TEST_CASE("run_case produces a complete artifact set") {
  TempDir tmp;
  const CaseConfig cfg = quick_case("two-pole-a", 12, 8);
  const RunResult result = run_case(cfg, tmp.path);

  CHECK(std::filesystem::exists(result.artifacts.dataset));
  CHECK(std::filesystem::exists(result.artifacts.model));
  CHECK(std::filesystem::exists(result.artifacts.report));
  CHECK(std::filesystem::exists(result.artifacts.manifest));
  REQUIRE(result.artifacts.scatter.size() == 2);
  CHECK(result.report.param_names == std::vector<std::string>{"t", "w02"});
  CHECK(result.report.scatter[0].size() == 4);  // N_TS

  const std::string report = slurp(result.artifacts.report);
  CHECK(report.find("parameter,rmse") != std::string::npos);
  CHECK(report.find("config_digest=") != std::string::npos);

  const std::string manifest = slurp(result.artifacts.manifest);
  CHECK(manifest.find("case=two-pole-a") != std::string::npos);
  CHECK(manifest.find("dataset_seed=77") != std::string::npos);
  CHECK(manifest.find("split_seed=") != std::string::npos);

  // predictions on every test incidence are positive and finite
  for (int i : result.split.test_indices) {
    const Incidence& inc =
        result.dataset.incidences[static_cast<std::size_t>(i)];
    const PredictedFilm p = predict_film(result.model, inc.x,
                                         result.dataset.schema, cfg.ranges);
    CHECK(p.sample.thickness > 0.0);
    for (const Pole& pole : p.sample.film.poles) {
      CHECK(std::isfinite(pole.omegap));
      CHECK(pole.omegap > 0.0);
    }
  }
}

TEST_CASE("run_case is reproducible and reusable from its dataset") {
  TempDir tmp1, tmp2, tmp3;
  const CaseConfig cfg = quick_case("two-pole-a", 10, 6);
  const RunResult a = run_case(cfg, tmp1.path);
  const RunResult b = run_case(cfg, tmp2.path);
  CHECK(slurp(a.artifacts.dataset) == slurp(b.artifacts.dataset));
  CHECK(slurp(a.artifacts.model) == slurp(b.artifacts.model));
  CHECK(slurp(a.artifacts.report) == slurp(b.artifacts.report));
  CHECK(slurp(a.artifacts.manifest) == slurp(b.artifacts.manifest));

  // loading the dataset instead of regenerating gives the same model
  const RunResult c = run_case(cfg, tmp3.path, a.artifacts.dataset);
  CHECK(slurp(c.artifacts.model) == slurp(a.artifacts.model));
}

TEST_CASE("run_case rejects inconsistent architectures") {
  TempDir tmp;
  CaseConfig cfg = quick_case("two-pole-a", 10, 6);
  cfg.arch = MlpArch{{8, 10, 5}};  // wrong output count
  CHECK_THROWS_AS(run_case(cfg, tmp.path), ConfigError);
  // aborted runs leave no partial artifacts behind
  CHECK(!std::filesystem::exists(tmp.path / "model.txt"));
  CHECK(!std::filesystem::exists(tmp.path / "report.csv"));
}

TEST_CASE("denoiser learns the identity on clean data") {
  // sigma = 0: the autoencoder reduces to plain reconstruction
  Rng rng(41);
  std::vector<std::vector<double>> clean;
  for (int i = 0; i < 64; ++i) {
    // two latent factors, smooth across 8 features
    const double a = rng.uniform(0.5, 1.5), b = rng.uniform(-1.0, 1.0);
    std::vector<double> x(8);
    for (int j = 0; j < 8; ++j) {
      x[static_cast<std::size_t>(j)] = a * std::sin(0.4 * j) + b * 0.1 * j;
    }
    clean.push_back(x);
  }
  Dataset ds;
  ds.incidences.resize(clean.size());
  std::vector<int> idx;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ds.incidences[i].x = clean[i];
    idx.push_back(static_cast<int>(i));
  }
  const Standardization st = fit_standardization(ds, idx);

  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.epochs = 3000;
  cfg.batch_size = 32;
  cfg.seed = 5;
  cfg.cost = CostKind::ReconstructionSse;
  // narrow autoencoder over 8 features
  Mlp ae = mlp_init(MlpArch{{8, 6, 2, 6, 8}}, 1);
  ae.x_mean = st.mean;
  ae.x_std = st.stddev;
  // train through the library path
  const Mlp trained = [&]() {
    Mlp model = train_denoiser(clean, 0.0, cfg, st);
    return model;
  }();

  double mse = 0.0;
  int count = 0;
  for (const auto& x : clean) {
    const std::vector<double> xhat = denoise(trained, x);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = xhat[j] - x[j];
      mse += diff * diff;
      ++count;
    }
  }
  mse /= count;
  CHECK(mse < 1e-3);

  // applying the autoencoder twice stays near the single pass
  const std::vector<double> once = denoise(trained, clean[0]);
  const std::vector<double> twice = denoise(trained, once);
  double drift = 0.0, residual = 0.0;
  for (std::size_t j = 0; j < once.size(); ++j) {
    drift += (twice[j] - once[j]) * (twice[j] - once[j]);
    residual += (once[j] - clean[0][j]) * (once[j] - clean[0][j]);
  }
  CHECK(drift <= std::max(4.0 * residual, 1e-6));
}

TEST_CASE("train_denoiser is deterministic") {
  std::vector<std::vector<double>> clean;
  Rng rng(50);
  for (int i = 0; i < 16; ++i) {
    std::vector<double> x(5);
    for (double& v : x) v = rng.normal();
    clean.push_back(x);
  }
  Dataset ds;
  ds.incidences.resize(clean.size());
  std::vector<int> idx;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ds.incidences[i].x = clean[i];
    idx.push_back(static_cast<int>(i));
  }
  const Standardization st = fit_standardization(ds, idx);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.epochs = 20;
  cfg.batch_size = 8;
  cfg.seed = 99;
  const Mlp a = train_denoiser(clean, 0.05, cfg, st);
  const Mlp b = train_denoiser(clean, 0.05, cfg, st);
  CHECK(a.weights == b.weights);
}

TEST_CASE("end_to_end validates model compatibility") {
  const CaseConfig cfg = builtin_case("two-pole-a");
  const TargetSchema schema = schema_from_ranges(cfg.ranges);
  const Mlp mlp = mlp_init(MlpArch{{20, 6, 2}}, 1);
  const Mlp bad_ae = mlp_init(MlpArch{{12, 6, 3, 6, 12}}, 2);
  const std::vector<double> x(20, 0.1);
  CHECK_THROWS_AS(end_to_end(bad_ae, mlp, x, schema, cfg.ranges), ConfigError);

  const Mlp ae = mlp_init(MlpArch{{20, 12, 4, 12, 20}}, 3);
  const PredictedFilm p = end_to_end(ae, mlp, x, schema, cfg.ranges);
  CHECK(p.sample.thickness > 0.0);
}

TEST_CASE("scatter export converts thickness to nm") {
  EvalReport report;
  report.param_names = {"t", "w02"};
  report.rmse = {0.1, 0.2};
  report.scatter.resize(2);
  // schema units: t in 1e3 m -> 1e-10 is 100 nm
  report.scatter[0].emplace_back(1e-10, 2e-10);
  report.scatter[1].emplace_back(1e15, 2e15);
  std::ostringstream os;
  write_scatter_csv(os, report, 0);
  CHECK(os.str() == "true_nm,predicted_nm\n100,200\n");
  std::ostringstream os2;
  write_scatter_csv(os2, report, 1);
  CHECK(os2.str() == "true_radps,predicted_radps\n1e+15,2e+15\n");
}

TEST_SUITE_END();
