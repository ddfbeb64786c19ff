#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "casimir/materials.hpp"

namespace casimir {

enum class Polarization { P, S };

/// Planar system: bare plate (layer 1) | vacuum gap (layer 0) | film
/// (layer 2, thickness t) | substrate (layer 3). Plate and substrate are
/// gold in every standard configuration, but any model is accepted.
struct FilmStack {
  LorentzDrudeModel plate;      // layer 1
  LorentzDrudeModel film;       // layer 2
  LorentzDrudeModel substrate;  // layer 3
  double thickness = 0.0;       // m, > 0
  double temperature = 300.0;   // K, > 0
};

/// Gold plate and gold substrate around the sampled film, at temperature T.
FilmStack gold_film_stack(const FilmSample& sample, double temperature = 300.0);

struct QuadratureConfig {
  double rel_tol = 1e-8;
  int matsubara_consecutive_small = 3;
  enum class KparScheme { GaussLegendreY, Adaptive };
  KparScheme kpar_scheme = KparScheme::GaussLegendreY;
  int gl_nodes = 64;
  long max_matsubara_terms = 200000;
  int max_bisect_depth = 48;
  /// Test hook: force r01 and the film reflection to the perfect-conductor
  /// values (+1 for p, -1 for s) at every frequency.
  bool pec_override = false;

  void validate() const;  // 0 < rel_tol < 1e-2, gl_nodes >= 16
};

/// Matsubara angular frequency xi_u = 2 pi u kB T / hbar.
double matsubara_xi(long u, double temperature);

/// Perpendicular decay constant q = sqrt(eps (xi/c)^2 + kpar^2) on the
/// imaginary axis. Pass eps = 1 for vacuum.
double q_perp(double eps_ixi, double xi, double kpar);

/// Single-interface Fresnel reflection coefficient at imaginary frequency,
/// going from medium a into medium b:
///   r_p = (eps_b q_a - eps_a q_b) / (eps_b q_a + eps_a q_b)
///   r_s = (q_a - q_b) / (q_a + q_b)
/// Real-valued, |r| <= 1. Throws std::domain_error when xi == kpar == 0.
double fresnel_r(double eps_a, double eps_b, double xi, double kpar,
                 Polarization pol);

/// Effective reflection coefficient of the film-coated plate seen from the
/// vacuum gap:
///   r~02 = (r02 + r23 e^{-2 q2 t}) / (1 + r02 r23 e^{-2 q2 t}),
/// the two-interface composition with r20 = -r02. At xi == 0 the Drude
/// zero-frequency limits apply: a metal-backed or metallic layer reflects
/// with r_p -> 1, and every r_s -> 0.
double film_reflection(const FilmStack& stack, double xi, double kpar,
                       Polarization pol);

/// Ideal-plate pressure P_P = hbar c pi^2 / (240 d^4). Throws for d <= 0.
double pec_pressure(double gap);

/// Equilibrium Casimir pressure (attraction reported as a positive
/// magnitude) between the bare plate and the coated plate at gap d:
/// Matsubara sum (u = 0 term halved) over a kpar quadrature of
///   kpar (kB T / pi) sum_pol q0 x / (1 - x),  x = r01 r~02 e^{-2 q0 d}.
double casimir_pressure(const FilmStack& stack, double gap,
                        const QuadratureConfig& quad = {});

struct PressurePoint {
  double pressure = 0.0;       // Pa
  double dpressure_dgap = 0.0;  // Pa / m, analytic
};

/// Pressure and its analytic gap derivative in one pass; the derivative of
/// each summand is -2 q0 x / (1 - x)^2.
PressurePoint pressure_with_gap_derivative(const FilmStack& stack, double gap,
                                           const QuadratureConfig& quad = {});

/// P~ = P / P_P, in (0, 1) for metal-backed stacks at 5 nm .. 2500 nm.
double normalized_pressure(const FilmStack& stack, double gap,
                           const QuadratureConfig& quad = {});

/// Spatial derivative of the normalized pressure, d P~ / dz with z in
/// micrometers: (dP/dd + 4 P / d) / P_P * 1e-6.
double dpnorm_dz(const FilmStack& stack, double gap,
                 const QuadratureConfig& quad = {});

struct ForceCurve {
  std::vector<double> gaps;        // m, ascending
  std::vector<double> pressure;    // Pa
  std::vector<double> p_norm;      // dimensionless
  std::vector<double> dpnorm_dz;   // per micrometer
};

ForceCurve force_curve(const FilmStack& stack, const std::vector<double>& gaps,
                       const QuadratureConfig& quad = {});

/// CSV with header `d_nm,P_Pa,P_norm,dPnorm_dz_per_um`, 17 significant
/// digits. `comment_lines` are emitted first, prefixed with "# ".
void write_force_curve_csv(std::ostream& os, const ForceCurve& curve,
                           const std::vector<std::string>& comment_lines = {});

}  // namespace casimir
