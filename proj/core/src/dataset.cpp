#include "casimir/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "casimir/errors.hpp"
#include "casimir/textio.hpp"
#include "casimir/version.hpp"

namespace casimir {

std::vector<double> GapGrid::gaps() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log(d_max / d_min) / (count - 1);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = d_min * std::exp(step * i);
  }
  out.front() = d_min;
  out.back() = d_max;
  return out;
}

GapGrid gap_grid(double d_min, double d_max, int count) {
  if (!(d_min > 0.0) || !(d_min < d_max)) {
    throw std::domain_error("gap_grid: need 0 < d_min < d_max");
  }
  if (count < 2) throw std::domain_error("gap_grid: count must be >= 2");
  return {d_min, d_max, count};
}

int TargetSchema::n_free() const {
  int n = 0;
  for (bool f : is_free) n += f ? 1 : 0;
  return n;
}

std::vector<std::string> TargetSchema::free_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (is_free[i]) out.push_back(names[i]);
  }
  return out;
}

TargetSchema schema_from_ranges(const SamplingRanges& ranges) {
  ranges.validate();
  TargetSchema schema;
  const std::size_t n = ranges.n_params();
  schema.names.reserve(n);
  schema.is_free.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    schema.names.push_back(param_name(i));
    schema.is_free.push_back(ranges.rule(i).is_free());
  }
  return schema;
}

namespace {

// Thickness enters the log targets in units of 1e3 m so that its magnitude
// is comparable to the frequency entries.
constexpr double kThicknessUnit = 1e3;

}  // namespace

std::vector<double> target_vector(const FilmSample& sample,
                                  const TargetSchema& schema) {
  const std::vector<double> flat = flatten_params(sample);
  if (flat.size() != schema.names.size()) {
    throw std::domain_error("target_vector: sample does not match schema");
  }
  std::vector<double> y;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (!schema.is_free[i]) continue;
    double v = flat[i];
    if (i == 0) v /= kThicknessUnit;
    if (!(v > 0.0)) {
      throw std::domain_error("target_vector: free parameter " +
                              schema.names[i] + " must be > 0");
    }
    y.push_back(std::log(v));
  }
  return y;
}

FilmSample film_from_target(std::span<const double> y,
                            const TargetSchema& schema,
                            const SamplingRanges& ranges) {
  if (schema.names.size() != ranges.n_params()) {
    throw ConfigError("film_from_target: schema does not match ranges");
  }
  if (static_cast<int>(y.size()) != schema.n_free()) {
    throw std::domain_error("film_from_target: wrong target length");
  }
  const std::size_t n = ranges.n_params();
  std::vector<double> flat(n, 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (schema.is_free[i]) {
      flat[i] = std::exp(y[k++]) * (i == 0 ? kThicknessUnit : 1.0);
    } else if (ranges.rule(i).kind != ParamRule::Kind::Scaled) {
      flat[i] = ranges.rule(i).lo;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ParamRule& r = ranges.rule(i);
    if (r.kind == ParamRule::Kind::Scaled) {
      flat[i] = r.factor * flat[static_cast<std::size_t>(r.source)];
    }
  }
  return unflatten_params(flat);
}

std::vector<double> feature_vector(const FilmSample& sample,
                                   const GapGrid& grid,
                                   const QuadratureConfig& quad) {
  const FilmStack stack = gold_film_stack(sample);
  const ForceCurve curve = force_curve(stack, grid.gaps(), quad);
  for (double v : curve.dpnorm_dz) {
    if (!std::isfinite(v)) {
      throw NumericError("feature_vector: non-finite derivative value");
    }
  }
  return curve.dpnorm_dz;
}

namespace {

Incidence make_incidence(const GenerationConfig& config,
                         const TargetSchema& schema, std::uint64_t base_seed) {
  constexpr int kMaxRetries = 100;
  for (int retry = 0;; ++retry) {
    const std::uint64_t seed =
        retry == 0 ? base_seed : mix_seed(base_seed, static_cast<std::uint64_t>(retry));
    try {
      Rng rng(seed);
      Incidence inc;
      inc.seed = seed;
      inc.sample = sample_film(config.ranges, rng);
      inc.x = feature_vector(inc.sample, config.grid, config.quad);
      inc.y = target_vector(inc.sample, schema);
      return inc;
    } catch (const NumericError& e) {
      if (retry >= kMaxRetries) {
        throw ConfigError(std::string("generate_dataset: incidence failed ") +
                          "repeatedly: " + e.what());
      }
      std::cerr << "generate_dataset: numeric failure (seed " << seed
                << "), redrawing: " << e.what() << "\n";
    }
  }
}

}  // namespace

Dataset generate_dataset(const GenerationConfig& config) {
  if (config.count <= 0) {
    throw ConfigError("generate_dataset: count must be > 0");
  }
  config.ranges.validate();
  config.quad.validate();
  if (config.grid.count < 2) {
    throw ConfigError("generate_dataset: invalid gap grid");
  }

  Dataset ds;
  ds.case_tag = config.case_tag;
  ds.master_seed = config.master_seed;
  ds.grid = config.grid;
  ds.ranges = config.ranges;
  ds.schema = schema_from_ranges(config.ranges);
  ds.noise_sigma = config.noise_sigma;
  ds.quad = config.quad;
  ds.incidences.resize(static_cast<std::size_t>(config.count));

  unsigned n_threads = config.threads > 0
                           ? static_cast<unsigned>(config.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads,
                                 static_cast<unsigned>(config.count));

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= config.count) return;
      try {
        ds.incidences[static_cast<std::size_t>(i)] = make_incidence(
            config, ds.schema,
            mix_seed(config.master_seed, static_cast<std::uint64_t>(i)));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return ds;
}

DatasetSplit split_dataset(const Dataset& ds, int n_train,
                           std::uint64_t seed) {
  const int n = static_cast<int>(ds.incidences.size());
  if (n_train <= 0 || n_train >= n) {
    throw std::domain_error("split_dataset: need 0 < n_train < dataset size");
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  DatasetSplit split;
  split.train_indices.assign(idx.begin(), idx.begin() + n_train);
  split.test_indices.assign(idx.begin() + n_train, idx.end());
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

std::uint64_t default_split_seed(const Dataset& ds) {
  return mix_seed(ds.master_seed, 0x53504C4954ULL);  // "SPLIT"
}

std::vector<double> add_noise(std::span<const double> x, double sigma,
                              Rng& rng) {
  if (sigma < 0.0) throw std::domain_error("add_noise: sigma must be >= 0");
  std::vector<double> out(x.begin(), x.end());
  if (sigma == 0.0) return out;
  for (double& v : out) v += sigma * rng.normal();
  return out;
}

Standardization fit_standardization(const Dataset& ds,
                                    std::span<const int> indices) {
  if (indices.empty()) {
    throw std::domain_error("fit_standardization: empty index set");
  }
  const std::size_t dim = ds.incidences.at(0).x.size();
  Standardization st;
  st.mean.assign(dim, 0.0);
  st.stddev.assign(dim, 0.0);
  for (int i : indices) {
    const auto& x = ds.incidences.at(static_cast<std::size_t>(i)).x;
    for (std::size_t j = 0; j < dim; ++j) st.mean[j] += x[j];
  }
  const double n = static_cast<double>(indices.size());
  for (double& m : st.mean) m /= n;
  for (int i : indices) {
    const auto& x = ds.incidences.at(static_cast<std::size_t>(i)).x;
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = x[j] - st.mean[j];
      st.stddev[j] += d * d;
    }
  }
  for (double& s : st.stddev) s = std::max(std::sqrt(s / n), 1e-12);
  return st;
}

namespace {

std::string law_name(SamplingLaw law) {
  return law == SamplingLaw::LogUniform ? "log-uniform" : "uniform";
}

SamplingLaw law_from_name(const std::string& name, const std::string& path,
                          long line) {
  if (name == "log-uniform") return SamplingLaw::LogUniform;
  if (name == "uniform") return SamplingLaw::Uniform;
  throw ParseError(path, line, "unknown sampling law '" + name + "'");
}

std::string scheme_name(QuadratureConfig::KparScheme s) {
  return s == QuadratureConfig::KparScheme::GaussLegendreY
             ? "gauss-legendre-on-y"
             : "adaptive";
}

std::string rule_text(const SamplingRanges& ranges, std::size_t i) {
  const ParamRule& r = ranges.rule(i);
  switch (r.kind) {
    case ParamRule::Kind::Fixed:
      return "fixed " + g17(r.lo);
    case ParamRule::Kind::Range:
      return "range " + g17(r.lo) + " " + g17(r.hi);
    case ParamRule::Kind::Scaled:
      return "scaled " + param_name(static_cast<std::size_t>(r.source)) + " " +
             g17(r.factor);
  }
  return {};
}

/// Flat index of a canonical parameter name; -1 when unknown.
int param_index(const std::string& name) {
  if (name == "t") return 0;
  if (name.size() < 2) return -1;
  std::string field;
  std::size_t digits;
  if (name.rfind("w0", 0) == 0) {
    field = "w0";
    digits = 2;
  } else if (name.rfind("wp", 0) == 0) {
    field = "wp";
    digits = 2;
  } else if (name[0] == 'g') {
    field = "g";
    digits = 1;
  } else {
    return -1;
  }
  try {
    const long pole = parse_long(name.substr(digits));
    if (pole < 1) return -1;
    const int off = field == "w0" ? 0 : (field == "wp" ? 1 : 2);
    return 1 + 3 * (static_cast<int>(pole) - 1) + off;
  } catch (const std::invalid_argument&) {
    return -1;
  }
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& ds,
                   const std::vector<std::string>& comment_lines) {
  os << "# casimir-dataset v1\n";
  os << "# tool=" << kToolName << " " << kToolVersion << "\n";
  for (const std::string& line : comment_lines) os << "# " << line << "\n";
  os << "# case=" << ds.case_tag << "\n";
  os << "# master_seed=" << ds.master_seed << "\n";
  os << "# count=" << ds.incidences.size() << "\n";
  os << "# grid_dmin_m=" << g17(ds.grid.d_min) << "\n";
  os << "# grid_dmax_m=" << g17(ds.grid.d_max) << "\n";
  os << "# grid_count=" << ds.grid.count << "\n";
  os << "# law=" << law_name(ds.ranges.law) << "\n";
  os << "# noise_sigma=" << g17(ds.noise_sigma) << "\n";
  os << "# quad_rel_tol=" << g17(ds.quad.rel_tol) << "\n";
  os << "# quad_gl_nodes=" << ds.quad.gl_nodes << "\n";
  os << "# quad_consecutive_small=" << ds.quad.matsubara_consecutive_small
     << "\n";
  os << "# quad_scheme=" << scheme_name(ds.quad.kpar_scheme) << "\n";
  const std::size_t np = ds.ranges.n_params();
  for (std::size_t i = 0; i < np; ++i) {
    os << "# range_" << param_name(i) << "=" << rule_text(ds.ranges, i)
       << "\n";
  }
  // column header
  os << "idx";
  for (int i = 1; i <= ds.grid.count; ++i) os << ",x" << i;
  for (const std::string& name : ds.schema.free_names()) os << ",y_" << name;
  os << ",t_nm";
  os << ",t_m";
  for (std::size_t i = 1; i < np; ++i) os << ',' << param_name(i);
  os << ",seed\n";
  for (std::size_t row = 0; row < ds.incidences.size(); ++row) {
    const Incidence& inc = ds.incidences[row];
    os << row;
    for (double v : inc.x) os << ',' << g17(v);
    for (double v : inc.y) os << ',' << g17(v);
    os << ',' << g17(inc.sample.thickness * 1e9);
    const std::vector<double> flat = flatten_params(inc.sample);
    for (double v : flat) os << ',' << g17(v);
    os << ',' << inc.seed << "\n";
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds,
                   const std::vector<std::string>& comment_lines) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  write_dataset(os, ds, comment_lines);
  if (!os) throw ConfigError("write failed: " + path.string());
}

Dataset read_dataset(std::istream& is, const std::string& path) {
  std::map<std::string, std::string> header;
  std::map<int, std::string> range_rules;
  int max_param_index = -1;
  std::string line;
  long lineno = 0;

  // header comments
  std::string column_line;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] != '#') {
      column_line = line;
      break;
    }
    const std::string body = trim(line.substr(1));
    if (lineno == 1) {
      if (body != "casimir-dataset v1") {
        throw ParseError(path, lineno, "not a casimir dataset file");
      }
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) continue;  // free-form comment
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.rfind("range_", 0) == 0) {
      const int idx = param_index(key.substr(6));
      if (idx < 0) {
        throw ParseError(path, lineno, "unknown parameter in '" + key + "'");
      }
      range_rules[idx] = value;
      max_param_index = std::max(max_param_index, idx);
    } else {
      header[key] = value;
    }
  }
  if (lineno == 0) throw ParseError(path, 1, "empty file");

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) {
      throw ParseError(path, lineno, "missing header key '" + key + "'");
    }
    return it->second;
  };

  Dataset ds;
  try {
    ds.case_tag = require("case");
    ds.master_seed = std::stoull(require("master_seed"));
    ds.grid.d_min = parse_double(require("grid_dmin_m"));
    ds.grid.d_max = parse_double(require("grid_dmax_m"));
    ds.grid.count = static_cast<int>(parse_long(require("grid_count")));
    ds.noise_sigma = parse_double(require("noise_sigma"));
    ds.quad.rel_tol = parse_double(require("quad_rel_tol"));
    ds.quad.gl_nodes = static_cast<int>(parse_long(require("quad_gl_nodes")));
    ds.quad.matsubara_consecutive_small =
        static_cast<int>(parse_long(require("quad_consecutive_small")));
    const std::string scheme = require("quad_scheme");
    if (scheme == "gauss-legendre-on-y") {
      ds.quad.kpar_scheme = QuadratureConfig::KparScheme::GaussLegendreY;
    } else if (scheme == "adaptive") {
      ds.quad.kpar_scheme = QuadratureConfig::KparScheme::Adaptive;
    } else {
      throw ParseError(path, lineno, "unknown quad scheme '" + scheme + "'");
    }
    ds.ranges.law = law_from_name(require("law"), path, lineno);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, lineno, std::string("bad header value: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(path, lineno, std::string("header value out of range: ") + e.what());
  }

  if (max_param_index < 0 || (max_param_index - 1) % 3 != 2) {
    throw ParseError(path, lineno, "incomplete range_* header block");
  }
  const std::size_t n_params = static_cast<std::size_t>(max_param_index) + 1;
  ds.ranges.pole_rules.resize((n_params - 1) / 3);
  for (std::size_t i = 0; i < n_params; ++i) {
    auto it = range_rules.find(static_cast<int>(i));
    if (it == range_rules.end()) {
      throw ParseError(path, lineno,
                       "missing range rule for " + param_name(i));
    }
    const std::vector<std::string> tok = split(it->second, ' ');
    ParamRule rule;
    try {
      if (tok.size() == 2 && tok[0] == "fixed") {
        rule = ParamRule::fixed(parse_double(tok[1]));
      } else if (tok.size() == 3 && tok[0] == "range") {
        rule = ParamRule::range(parse_double(tok[1]), parse_double(tok[2]));
      } else if (tok.size() == 3 && tok[0] == "scaled") {
        const int src = param_index(tok[1]);
        if (src < 0) throw std::invalid_argument("unknown source parameter");
        rule = ParamRule::scaled(src, parse_double(tok[2]));
      } else {
        throw std::invalid_argument("unrecognized rule syntax");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno,
                       "bad range rule for " + param_name(i) + ": " + e.what());
    }
    if (i == 0) {
      ds.ranges.thickness = rule;
    } else {
      ds.ranges.pole_rules[(i - 1) / 3][(i - 1) % 3] = rule;
    }
  }
  ds.ranges.validate();
  ds.schema = schema_from_ranges(ds.ranges);

  const std::size_t n_x = static_cast<std::size_t>(ds.grid.count);
  const std::size_t n_y = static_cast<std::size_t>(ds.schema.n_free());
  const std::size_t n_flat = ds.ranges.n_params();
  const std::size_t expect_cols = 1 + n_x + n_y + 1 + n_flat + 1;

  // verify the column header matches the schema before reading rows
  {
    std::ostringstream expected;
    expected << "idx";
    for (std::size_t i = 1; i <= n_x; ++i) expected << ",x" << i;
    for (const std::string& name : ds.schema.free_names())
      expected << ",y_" << name;
    expected << ",t_nm,t_m";
    for (std::size_t i = 1; i < n_flat; ++i) expected << ',' << param_name(i);
    expected << ",seed";
    if (trim(column_line) != expected.str()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": column header does not match the declared schema");
    }
  }

  const long declared_count = parse_long(require("count"));
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != expect_cols) {
      throw ParseError(path, lineno,
                       "expected " + std::to_string(expect_cols) +
                           " columns, found " + std::to_string(cells.size()));
    }
    try {
      Incidence inc;
      std::size_t c = 0;
      const long idx = parse_long(cells[c++]);
      if (idx != static_cast<long>(ds.incidences.size())) {
        throw std::invalid_argument("rows out of order");
      }
      inc.x.reserve(n_x);
      for (std::size_t i = 0; i < n_x; ++i)
        inc.x.push_back(parse_double(cells[c++]));
      inc.y.reserve(n_y);
      for (std::size_t i = 0; i < n_y; ++i)
        inc.y.push_back(parse_double(cells[c++]));
      ++c;  // t_nm is display-only; t_m is authoritative
      std::vector<double> flat(n_flat);
      for (std::size_t i = 0; i < n_flat; ++i)
        flat[i] = parse_double(cells[c++]);
      inc.sample = unflatten_params(flat);
      inc.seed = std::stoull(cells[c++]);
      ds.incidences.push_back(std::move(inc));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, e.what());
    } catch (const std::out_of_range& e) {
      throw ParseError(path, lineno, std::string("value out of range: ") + e.what());
    }
  }
  if (static_cast<long>(ds.incidences.size()) != declared_count) {
    throw ParseError(path, lineno,
                     "header declares " + std::to_string(declared_count) +
                         " incidences, file holds " +
                         std::to_string(ds.incidences.size()));
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  return read_dataset(is, path.string());
}

}  // namespace casimir
