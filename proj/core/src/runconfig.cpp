#include "casimir/runconfig.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "casimir/errors.hpp"
#include "casimir/textio.hpp"

namespace casimir {

namespace {

struct Entry {
  std::string value;
  long line;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections parse_ini(std::istream& is, const std::string& path) {
  Sections sections;
  std::string section;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(path, lineno, "unterminated section");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ParseError(path, lineno, "empty section name");
      sections[section];
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path, lineno, "expected 'key = value'");
    }
    if (section.empty()) {
      throw ParseError(path, lineno, "key outside of any [section]");
    }
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError(path, lineno, "empty key");
    sections[section][key] = {trim(s.substr(eq + 1)), lineno};
  }
  return sections;
}

ParamRule parse_rule(const std::string& text, double unit,
                     const std::string& path, long line) {
  const std::vector<std::string> raw = split(text, ' ');
  std::vector<std::string> tok;
  for (const std::string& t : raw) {
    if (!trim(t).empty()) tok.push_back(trim(t));
  }
  try {
    if (tok.size() == 2 && tok[0] == "fixed") {
      return ParamRule::fixed(parse_double(tok[1]) * unit);
    }
    if (tok.size() == 1) {
      return ParamRule::fixed(parse_double(tok[0]) * unit);
    }
    if (tok.size() == 2) {
      return ParamRule::range(parse_double(tok[0]) * unit,
                              parse_double(tok[1]) * unit);
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, line, e.what());
  }
  throw ParseError(path, line,
                   "expected 'lo hi', 'fixed v', or 'scaled <param> <factor>'");
}

}  // namespace

RunConfig default_run_config(const std::string& case_tag) {
  RunConfig rc;
  rc.case_config = builtin_case(case_tag);
  return rc;
}

RunConfig parse_run_config(std::istream& is, const std::string& path) {
  const Sections sections = parse_ini(is, path);

  static const std::map<std::string, std::set<std::string>> kKnown = {
      {"case", {"name"}},
      {"grid", {"dmin_nm", "dmax_nm", "count"}},
      {"ranges", {}},  // validated against canonical parameter names below
      {"dataset",
       {"n", "n_train", "noise_sigma", "standardize", "law", "threads",
        "seed"}},
      {"train",
       {"learning_rate", "epochs", "batch_size", "seed", "weight_delta_tol"}},
      {"quad", {"rel_tol", "gl_nodes", "consecutive_small", "scheme"}},
      {"autoencoder",
       {"learning_rate", "epochs", "batch_size", "seed", "noise_sigma"}},
      {"output", {"dir"}},
  };
  for (const auto& [section, entries] : sections) {
    auto it = kKnown.find(section);
    if (it == kKnown.end()) {
      throw ConfigError(path + ": unknown section [" + section + "]");
    }
    if (section == "ranges") continue;
    for (const auto& [key, entry] : entries) {
      if (!it->second.count(key)) {
        throw ConfigError(path + ":" + std::to_string(entry.line) +
                          ": unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  auto get = [&](const std::string& section,
                 const std::string& key) -> const Entry* {
    auto sit = sections.find(section);
    if (sit == sections.end()) return nullptr;
    auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
  };

  const Entry* name = get("case", "name");
  if (!name) throw ConfigError(path + ": missing [case] name");
  RunConfig rc;
  rc.case_config = builtin_case(name->value);
  CaseConfig& cc = rc.case_config;

  try {
    if (const Entry* e = get("grid", "dmin_nm")) {
      cc.grid.d_min = parse_double(e->value) * 1e-9;
    }
    if (const Entry* e = get("grid", "dmax_nm")) {
      cc.grid.d_max = parse_double(e->value) * 1e-9;
    }
    if (const Entry* e = get("grid", "count")) {
      cc.grid.count = static_cast<int>(parse_long(e->value));
    }
    cc.grid = gap_grid(cc.grid.d_min, cc.grid.d_max, cc.grid.count);

    if (auto sit = sections.find("ranges"); sit != sections.end()) {
      for (const auto& [key, entry] : sit->second) {
        const bool is_thickness = key == "t_nm";
        const std::string pname = is_thickness ? "t" : key;
        int idx = -1;
        for (std::size_t i = 0; i < cc.ranges.n_params(); ++i) {
          if (param_name(i) == pname) {
            idx = static_cast<int>(i);
            break;
          }
        }
        if (idx < 0) {
          throw ConfigError(path + ":" + std::to_string(entry.line) +
                            ": unknown parameter '" + key + "' in [ranges]");
        }
        // "scaled <param> <factor>" needs name resolution, so it is handled
        // here rather than in parse_rule.
        std::vector<std::string> tok;
        for (const std::string& t : split(entry.value, ' ')) {
          if (!trim(t).empty()) tok.push_back(trim(t));
        }
        ParamRule rule;
        if (tok.size() == 3 && tok[0] == "scaled") {
          int src = -1;
          for (std::size_t i = 0; i < cc.ranges.n_params(); ++i) {
            if (param_name(i) == tok[1]) {
              src = static_cast<int>(i);
              break;
            }
          }
          if (src < 0) {
            throw ConfigError(path + ":" + std::to_string(entry.line) +
                              ": unknown scale source '" + tok[1] + "'");
          }
          rule = ParamRule::scaled(src, parse_double(tok[2]));
        } else {
          rule = parse_rule(entry.value, is_thickness ? 1e-9 : 1.0, path,
                            entry.line);
        }
        if (idx == 0) {
          cc.ranges.thickness = rule;
        } else {
          cc.ranges.pole_rules[static_cast<std::size_t>(idx - 1) / 3]
                              [static_cast<std::size_t>(idx - 1) % 3] = rule;
        }
      }
      cc.ranges.validate();
      // free-parameter set may have changed; resize the network output
      cc.arch.layer_sizes.back() = schema_from_ranges(cc.ranges).n_free();
    }

    if (const Entry* e = get("dataset", "n")) {
      cc.n_total = static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("dataset", "n_train")) {
      cc.n_train = static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("dataset", "noise_sigma")) {
      cc.noise_sigma = parse_double(e->value);
    }
    if (const Entry* e = get("dataset", "standardize")) {
      if (e->value == "true") {
        cc.standardize = true;
      } else if (e->value == "false") {
        cc.standardize = false;
      } else {
        throw ConfigError(path + ": standardize must be true or false");
      }
    }
    if (const Entry* e = get("dataset", "law")) {
      if (e->value == "log-uniform") {
        cc.ranges.law = SamplingLaw::LogUniform;
      } else if (e->value == "uniform") {
        cc.ranges.law = SamplingLaw::Uniform;
      } else {
        throw ConfigError(path + ": law must be log-uniform or uniform");
      }
    }
    if (const Entry* e = get("dataset", "threads")) {
      cc.threads = static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("dataset", "seed")) {
      cc.dataset_seed = std::stoull(e->value);
    }

    if (const Entry* e = get("train", "learning_rate")) {
      cc.train.learning_rate = parse_double(e->value);
    }
    if (const Entry* e = get("train", "epochs")) {
      cc.train.epochs = parse_long(e->value);
    }
    if (const Entry* e = get("train", "batch_size")) {
      cc.train.batch_size = static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("train", "seed")) {
      cc.train.seed = std::stoull(e->value);
    }
    if (const Entry* e = get("train", "weight_delta_tol")) {
      cc.train.weight_delta_tol = parse_double(e->value);
    }

    if (const Entry* e = get("quad", "rel_tol")) {
      cc.quad.rel_tol = parse_double(e->value);
    }
    if (const Entry* e = get("quad", "gl_nodes")) {
      cc.quad.gl_nodes = static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("quad", "consecutive_small")) {
      cc.quad.matsubara_consecutive_small =
          static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("quad", "scheme")) {
      if (e->value == "gauss-legendre-on-y") {
        cc.quad.kpar_scheme = QuadratureConfig::KparScheme::GaussLegendreY;
      } else if (e->value == "adaptive") {
        cc.quad.kpar_scheme = QuadratureConfig::KparScheme::Adaptive;
      } else {
        throw ConfigError(path + ": unknown quad scheme '" + e->value + "'");
      }
    }
    cc.quad.validate();

    if (const Entry* e = get("autoencoder", "learning_rate")) {
      rc.ae_train.learning_rate = parse_double(e->value);
    }
    if (const Entry* e = get("autoencoder", "epochs")) {
      rc.ae_train.epochs = parse_long(e->value);
    }
    if (const Entry* e = get("autoencoder", "batch_size")) {
      rc.ae_train.batch_size = static_cast<int>(parse_long(e->value));
    }
    if (const Entry* e = get("autoencoder", "seed")) {
      rc.ae_train.seed = std::stoull(e->value);
    }
    if (const Entry* e = get("autoencoder", "noise_sigma")) {
      rc.ae_noise_sigma = parse_double(e->value);
    }
    if (const Entry* e = get("output", "dir")) {
      rc.out_dir = e->value;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(path + ": value out of range: " + e.what());
  }
  if (cc.n_train <= 0 || cc.n_train >= cc.n_total) {
    throw ConfigError(path + ": need 0 < n_train < n");
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(is, path.string());
}

}  // namespace casimir
