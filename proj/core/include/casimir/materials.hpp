#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "casimir/rng.hpp"

namespace casimir {

/// One damped-oscillator pole of the permittivity model. omega0 == 0 is a
/// Drude (free-carrier) term. All rates in rad/s.
struct Pole {
  double omega0 = 0.0;  // resonance frequency, >= 0
  double omegap = 0.0;  // plasma frequency, > 0
  double gamma = 0.0;   // damping rate, > 0
};

struct LorentzDrudeModel {
  std::vector<Pole> poles;  // canonical order; index n = 1..Np

  bool has_drude_pole() const {
    for (const Pole& p : poles) {
      if (p.omega0 == 0.0) return true;
    }
    return false;
  }
};

/// Gold: Drude model with plasma frequency 9 eV and damping rate 0.035 eV.
LorentzDrudeModel gold_drude();

/// Permittivity on the imaginary frequency axis,
///   eps(i xi) = 1 + sum_n wp_n^2 / (w0_n^2 + xi^2 + g_n xi),
/// real and >= 1 for xi > 0. Throws std::domain_error for xi < 0 and for
/// xi == 0 when the model contains a Drude pole (the value diverges; callers
/// handle the zero-frequency Matsubara term through eps_zero_limit).
double eval_eps_imag_axis(const LorentzDrudeModel& model, double xi);

/// Limit of eval_eps_imag_axis at xi -> 0+. Empty optional when the model
/// contains a Drude pole (the limit is +infinity).
std::optional<double> eps_zero_limit(const LorentzDrudeModel& model);

/// Complex permittivity on the real frequency axis,
///   eps(w) = 1 + sum_n wp_n^2 / (w0_n^2 - w^2 - i w g_n),
/// Im(eps) > 0 for any passive model. Throws std::domain_error for w <= 0.
std::complex<double> eval_eps_real_freq(const LorentzDrudeModel& model,
                                        double omega);

/// Aggregate dipole oscillator strength sqrt(sum_n wp_n^2) in rad/s.
double oscillator_strength(const LorentzDrudeModel& model);

/// Sum-rule cap: 33 eV (diamond) converted to rad/s.
double oscillator_strength_cap();

/// A sampled film: thickness in meters plus its permittivity model.
struct FilmSample {
  double thickness = 0.0;  // m
  LorentzDrudeModel film;
};

enum class SamplingLaw { LogUniform, Uniform };

/// Sampling rule for one scalar parameter. Scaled parameters are derived
/// from another parameter after sampling (e.g. wp2 = 4 * w02) and are never
/// free outputs.
struct ParamRule {
  enum class Kind { Fixed, Range, Scaled };
  Kind kind = Kind::Fixed;
  double lo = 0.0;
  double hi = 0.0;
  int source = -1;      // flat parameter index the Scaled rule reads
  double factor = 1.0;  // value = factor * value[source]

  static ParamRule fixed(double v) { return {Kind::Fixed, v, v, -1, 1.0}; }
  static ParamRule range(double lo, double hi) {
    return {Kind::Range, lo, hi, -1, 1.0};
  }
  static ParamRule scaled(int source, double factor) {
    return {Kind::Scaled, 0.0, 0.0, source, factor};
  }
  bool is_free() const { return kind == Kind::Range && lo < hi; }
};

/// Flat parameter order: index 0 is the thickness (meters); pole n (0-based)
/// contributes indices 1+3n (omega0), 2+3n (omegap), 3+3n (gamma), matching
/// the canonical target order.
struct SamplingRanges {
  ParamRule thickness;  // meters
  std::vector<std::array<ParamRule, 3>> pole_rules;
  SamplingLaw law = SamplingLaw::LogUniform;

  std::size_t n_params() const { return 1 + 3 * pole_rules.size(); }
  const ParamRule& rule(std::size_t flat_index) const;
  void validate() const;  // throws ConfigError on inconsistent rules
};

/// Canonical parameter name for a flat index: "t", "w01", "wp1", "g1", ...
std::string param_name(std::size_t flat_index);

/// Draw a film from the given ranges. Rejection-samples the whole draw until
/// the oscillator-strength sum rule holds; throws ConfigError after 10^6
/// consecutive rejections. Deterministic for a given stream state.
FilmSample sample_film(const SamplingRanges& ranges, Rng& rng);

/// Flat parameter vector (thickness first) of a sample; inverse of the
/// layout documented on SamplingRanges.
std::vector<double> flatten_params(const FilmSample& sample);
FilmSample unflatten_params(const std::vector<double>& params);

}  // namespace casimir
