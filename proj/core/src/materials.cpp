#include "casimir/materials.hpp"

#include <cmath>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

LorentzDrudeModel gold_drude() {
  LorentzDrudeModel m;
  m.poles.push_back({0.0, ev_to_radps(9.0), ev_to_radps(0.035)});
  return m;
}

double eval_eps_imag_axis(const LorentzDrudeModel& model, double xi) {
  if (xi < 0.0) throw std::domain_error("eval_eps_imag_axis: xi < 0");
  double eps = 1.0;
  for (const Pole& p : model.poles) {
    const double den = p.omega0 * p.omega0 + xi * xi + p.gamma * xi;
    if (den == 0.0) {
      throw std::domain_error(
          "eval_eps_imag_axis: divergent at xi = 0 (Drude pole); use "
          "eps_zero_limit for the zero-frequency term");
    }
    eps += p.omegap * p.omegap / den;
  }
  return eps;
}

std::optional<double> eps_zero_limit(const LorentzDrudeModel& model) {
  if (model.has_drude_pole()) return std::nullopt;
  double eps = 1.0;
  for (const Pole& p : model.poles) {
    eps += (p.omegap * p.omegap) / (p.omega0 * p.omega0);
  }
  return eps;
}

std::complex<double> eval_eps_real_freq(const LorentzDrudeModel& model,
                                        double omega) {
  if (omega <= 0.0) throw std::domain_error("eval_eps_real_freq: omega <= 0");
  std::complex<double> eps(1.0, 0.0);
  for (const Pole& p : model.poles) {
    const std::complex<double> den(p.omega0 * p.omega0 - omega * omega,
                                   -omega * p.gamma);
    eps += p.omegap * p.omegap / den;
  }
  return eps;
}

double oscillator_strength(const LorentzDrudeModel& model) {
  double s = 0.0;
  for (const Pole& p : model.poles) s += p.omegap * p.omegap;
  return std::sqrt(s);
}

double oscillator_strength_cap() { return ev_to_radps(33.0); }

const ParamRule& SamplingRanges::rule(std::size_t flat_index) const {
  if (flat_index == 0) return thickness;
  const std::size_t pole = (flat_index - 1) / 3;
  return pole_rules.at(pole)[(flat_index - 1) % 3];
}

void SamplingRanges::validate() const {
  const std::size_t n = n_params();
  for (std::size_t i = 0; i < n; ++i) {
    const ParamRule& r = rule(i);
    switch (r.kind) {
      case ParamRule::Kind::Fixed:
        break;
      case ParamRule::Kind::Range:
        if (!(r.lo <= r.hi)) {
          throw ConfigError("sampling range for " + param_name(i) +
                            " has lo > hi");
        }
        break;
      case ParamRule::Kind::Scaled:
        if (r.source < 0 || static_cast<std::size_t>(r.source) >= n) {
          throw ConfigError("scaled parameter " + param_name(i) +
                            " references an invalid source index");
        }
        if (rule(r.source).kind == ParamRule::Kind::Scaled) {
          throw ConfigError("scaled parameter " + param_name(i) +
                            " may not chain to another scaled parameter");
        }
        break;
    }
  }
}

std::string param_name(std::size_t flat_index) {
  if (flat_index == 0) return "t";
  const std::size_t pole = (flat_index - 1) / 3 + 1;  // 1-based
  static const char* kField[3] = {"w0", "wp", "g"};
  return std::string(kField[(flat_index - 1) % 3]) + std::to_string(pole);
}

namespace {

double draw_param(const ParamRule& r, SamplingLaw law, Rng& rng) {
  if (r.kind == ParamRule::Kind::Fixed) return r.lo;
  if (r.lo == r.hi) return r.lo;
  if (law == SamplingLaw::LogUniform) return rng.log_uniform(r.lo, r.hi);
  return rng.uniform(r.lo, r.hi);
}

}  // namespace

FilmSample sample_film(const SamplingRanges& ranges, Rng& rng) {
  ranges.validate();
  const std::size_t n = ranges.n_params();
  const double cap = oscillator_strength_cap();
  std::vector<double> v(n);
  constexpr long kMaxRejections = 1000000;
  for (long attempt = 0;; ++attempt) {
    if (attempt >= kMaxRejections) {
      throw ConfigError(
          "sample_film: sampling ranges incompatible with the oscillator "
          "strength sum rule (10^6 consecutive rejections)");
    }
    // sample free and fixed parameters, then resolve derived ones
    for (std::size_t i = 0; i < n; ++i) {
      const ParamRule& r = ranges.rule(i);
      if (r.kind != ParamRule::Kind::Scaled) {
        v[i] = draw_param(r, ranges.law, rng);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const ParamRule& r = ranges.rule(i);
      if (r.kind == ParamRule::Kind::Scaled) {
        v[i] = r.factor * v[static_cast<std::size_t>(r.source)];
      }
    }
    FilmSample s = unflatten_params(v);
    if (oscillator_strength(s.film) <= cap) return s;
  }
}

std::vector<double> flatten_params(const FilmSample& sample) {
  std::vector<double> v;
  v.reserve(1 + 3 * sample.film.poles.size());
  v.push_back(sample.thickness);
  for (const Pole& p : sample.film.poles) {
    v.push_back(p.omega0);
    v.push_back(p.omegap);
    v.push_back(p.gamma);
  }
  return v;
}

FilmSample unflatten_params(const std::vector<double>& params) {
  if (params.empty() || (params.size() - 1) % 3 != 0) {
    throw std::domain_error("unflatten_params: size must be 1 + 3*Np");
  }
  FilmSample s;
  s.thickness = params[0];
  for (std::size_t i = 1; i + 2 < params.size(); i += 3) {
    s.film.poles.push_back({params[i], params[i + 1], params[i + 2]});
  }
  return s;
}

}  // namespace casimir
