#include "casimir/lifshitz.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/textio.hpp"

namespace casimir {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// One medium evaluated at a single Matsubara frequency. `pec` marks the
/// xi = 0 limit of a model with a Drude pole, where eps(i xi) diverges and
/// the p-polarized interface reflects like an ideal conductor.
struct LayerEps {
  double eps = 1.0;
  bool pec = false;
};

LayerEps layer_at(const LorentzDrudeModel& model, double xi) {
  if (xi > 0.0) return {eval_eps_imag_axis(model, xi), false};
  const auto limit = eps_zero_limit(model);
  if (!limit) return {0.0, true};
  return {*limit, false};
}

/// Interface coefficient from medium a into medium b with precomputed
/// (xi/c)^2 and kpar^2. pec flags only occur at xi == 0, where every q
/// collapses to kpar, so r_s vanishes and r_p takes its eps -> inf limit.
inline double interface_r(const LayerEps& a, const LayerEps& b, double xi_c2,
                          double kpar2, Polarization pol) {
  if (b.pec) return pol == Polarization::P ? 1.0 : 0.0;
  if (a.pec) return pol == Polarization::P ? -1.0 : 0.0;
  const double qa = std::sqrt(a.eps * xi_c2 + kpar2);
  const double qb = std::sqrt(b.eps * xi_c2 + kpar2);
  if (pol == Polarization::P) {
    return (b.eps * qa - a.eps * qb) / (b.eps * qa + a.eps * qb);
  }
  return (qa - qb) / (qa + qb);
}

/// All frequency-dependent state of one Matsubara term.
struct TermContext {
  double xi = 0.0;
  double xi_c2 = 0.0;  // (xi/c)^2
  double y0 = 0.0;     // 2 xi d / c, lower edge of the y integral
  LayerEps plate, film, substrate;
  double gap = 0.0;
  double thickness = 0.0;
  bool pec_override = false;
};

/// Two-interface composition with r20 = -r02:
///   (r02 + r23 e) / (1 + r02 r23 e)
inline double compose_film(double r02, double r23, double e2) {
  return (r02 + r23 * e2) / (1.0 + r02 * r23 * e2);
}

/// Film-backed reflection for one (kpar, pol) within a term context.
inline double film_r(const TermContext& c, double kpar2, Polarization pol) {
  if (c.film.pec) {
    // xi = 0 with a metallic film: r02 -> 1 for p, and the composition is
    // saturated regardless of the back interface.
    return pol == Polarization::P ? 1.0 : 0.0;
  }
  static const LayerEps vacuum{1.0, false};
  const double r02 = interface_r(vacuum, c.film, c.xi_c2, kpar2, pol);
  const double r23 = interface_r(c.film, c.substrate, c.xi_c2, kpar2, pol);
  const double q2 = std::sqrt(c.film.eps * c.xi_c2 + kpar2);
  return compose_film(r02, r23, std::exp(-2.0 * q2 * c.thickness));
}

struct Integrals {
  double f = 0.0;  // y^2 sum_pol x/(1-x)            -> pressure
  double g = 0.0;  // y^2 (-y/d) sum_pol x/(1-x)^2   -> gap derivative
};

/// x/(1-x) and x/(1-x)^2 for x = rho e^{-y}, with the denominator evaluated
/// as (1 - rho) - rho expm1(-y) to avoid cancellation when rho -> 1, y -> 0.
inline void accumulate_pol(double rho, double ey, double em1, double& f,
                           double& g) {
  if (rho * ey >= 1.0) {
    throw NumericError(
        "casimir_pressure: reflection product >= 1 (invariant violation)");
  }
  const double den = (1.0 - rho) - rho * em1;
  const double x_over = rho * ey / den;
  f += x_over;
  g += x_over / den;
}

/// Integrand at offset s from y0 (so kpar^2 = s (s + 2 y0) / (2d)^2 exactly).
inline Integrals summand(const TermContext& c, double s) {
  const double y = c.y0 + s;
  const double kpar2 = s * (s + 2.0 * c.y0) / (4.0 * c.gap * c.gap);
  const double ey = std::exp(-y);
  const double em1 = std::expm1(-y);

  double f = 0.0, g = 0.0;
  if (c.pec_override) {
    // rho = (+1)(+1) for p and (-1)(-1) for s
    accumulate_pol(1.0, ey, em1, f, g);
    accumulate_pol(1.0, ey, em1, f, g);
  } else if (c.xi == 0.0) {
    // Zero-frequency term: every r_s vanishes, only p contributes.
    const double r01 =
        c.plate.pec ? 1.0 : (c.plate.eps - 1.0) / (c.plate.eps + 1.0);
    double rt02;
    if (c.film.pec) {
      rt02 = 1.0;
    } else {
      const double r02 = (c.film.eps - 1.0) / (c.film.eps + 1.0);
      const double r23 = c.substrate.pec
                             ? 1.0
                             : (c.substrate.eps - c.film.eps) /
                                   (c.substrate.eps + c.film.eps);
      const double kpar = y / (2.0 * c.gap);  // q2 = kpar at xi = 0
      rt02 = compose_film(r02, r23, std::exp(-2.0 * kpar * c.thickness));
    }
    accumulate_pol(r01 * rt02, ey, em1, f, g);
  } else {
    // Perpendicular decay constants are polarization independent.
    const double q0 = y / (2.0 * c.gap);
    const double q1 = std::sqrt(c.plate.eps * c.xi_c2 + kpar2);
    const double q2 = std::sqrt(c.film.eps * c.xi_c2 + kpar2);
    const double q3 = std::sqrt(c.substrate.eps * c.xi_c2 + kpar2);
    const double e2 = std::exp(-2.0 * q2 * c.thickness);
    const double e1 = c.plate.eps, ef = c.film.eps, es = c.substrate.eps;

    const double r01p = (e1 * q0 - q1) / (e1 * q0 + q1);
    const double r02p = (ef * q0 - q2) / (ef * q0 + q2);
    const double r23p = (es * q2 - ef * q3) / (es * q2 + ef * q3);
    accumulate_pol(r01p * compose_film(r02p, r23p, e2), ey, em1, f, g);

    const double r01s = (q0 - q1) / (q0 + q1);
    const double r02s = (q0 - q2) / (q0 + q2);
    const double r23s = (q2 - q3) / (q2 + q3);
    accumulate_pol(r01s * compose_film(r02s, r23s, e2), ey, em1, f, g);
  }
  const double y2 = y * y;
  return {y2 * f, y2 * (-y / c.gap) * g};
}

Integrals gl_panel(const TermContext& c, double a, double b, std::size_t n) {
  const GaussLegendreRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Integrals acc;
  for (std::size_t i = 0; i < n; ++i) {
    const Integrals v = summand(c, mid + half * rule.nodes[i]);
    acc.f += rule.weights[i] * v.f;
    acc.g += rule.weights[i] * v.g;
  }
  acc.f *= half;
  acc.g *= half;
  return acc;
}

/// kpar integral of one Matsubara term, as an integral over s = y - y0 on
/// [0, ymax]. Fixed-order Gauss-Legendre checked against the half-order
/// rule; panels where the two disagree are bisected. Throws NumericError
/// when the refinement budget is exhausted.
Integrals kpar_integral(const TermContext& c, const QuadratureConfig& quad,
                        double ymax) {
  const std::size_t n = static_cast<std::size_t>(quad.gl_nodes);
  const std::size_t nc = std::max<std::size_t>(8, n / 2);

  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack;
  if (quad.kpar_scheme == QuadratureConfig::KparScheme::Adaptive) {
    const double mid = 0.5 * ymax;
    stack.push_back({mid, ymax, 1});
    stack.push_back({0.0, mid, 1});
  } else {
    stack.push_back({0.0, ymax, 0});
  }

  // Tolerance scale from a first coarse look at the whole interval.
  const Integrals rough = gl_panel(c, 0.0, ymax, nc);
  const double tol_f = quad.rel_tol * std::max(std::abs(rough.f), 1e-300);
  const double tol_g = quad.rel_tol * std::max(std::abs(rough.g), 1e-300);

  Integrals total;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const Integrals fine = gl_panel(c, p.a, p.b, n);
    const Integrals coarse = gl_panel(c, p.a, p.b, nc);
    const double frac = (p.b - p.a) / ymax;
    const bool ok = std::abs(fine.f - coarse.f) <= tol_f * frac &&
                    std::abs(fine.g - coarse.g) <= tol_g * frac;
    // Panels this narrow contribute below roundoff; keep them rather than
    // chasing a disagreement that can no longer be resolved in doubles.
    const bool negligible = (p.b - p.a) < ymax * 1e-10;
    if (ok || negligible) {
      total.f += fine.f;
      total.g += fine.g;
      continue;
    }
    if (p.depth >= quad.max_bisect_depth) {
      throw NumericError("casimir_pressure: kpar quadrature failed to converge",
                         total.f);
    }
    const double mid = 0.5 * (p.a + p.b);
    stack.push_back({mid, p.b, p.depth + 1});
    stack.push_back({p.a, mid, p.depth + 1});
  }
  return total;
}

void validate_stack(const FilmStack& stack, double gap) {
  if (!(gap > 0.0)) throw std::domain_error("casimir_pressure: gap must be > 0");
  if (!(stack.thickness > 0.0)) {
    throw std::domain_error("casimir_pressure: film thickness must be > 0");
  }
  if (!(stack.temperature > 0.0)) {
    throw std::domain_error("casimir_pressure: temperature must be > 0");
  }
}

PressurePoint evaluate(const FilmStack& stack, double gap,
                       const QuadratureConfig& quad) {
  validate_stack(stack, gap);
  quad.validate();
  const double ymax =
      std::max(60.0, -std::log(quad.rel_tol * 1e-3) + 20.0);
  const double prefactor = PhysConstants::kB * stack.temperature /
                           (8.0 * kPi * gap * gap * gap);

  Integrals sum;
  int small_run = 0;
  bool converged = false;
  for (long u = 0; u <= quad.max_matsubara_terms; ++u) {
    TermContext c;
    c.xi = matsubara_xi(u, stack.temperature);
    c.xi_c2 = (c.xi / PhysConstants::c) * (c.xi / PhysConstants::c);
    c.y0 = 2.0 * c.xi * gap / PhysConstants::c;
    c.gap = gap;
    c.thickness = stack.thickness;
    c.pec_override = quad.pec_override;
    if (!quad.pec_override) {
      c.plate = layer_at(stack.plate, c.xi);
      c.film = layer_at(stack.film, c.xi);
      c.substrate = layer_at(stack.substrate, c.xi);
    }
    const Integrals term = kpar_integral(c, quad, ymax);
    const double w = u == 0 ? 0.5 : 1.0;
    sum.f += w * term.f;
    sum.g += w * term.g;
    if (u > 0) {
      if (std::abs(term.f) <= quad.rel_tol * std::abs(sum.f)) {
        if (++small_run >= quad.matsubara_consecutive_small) {
          converged = true;
          break;
        }
      } else {
        small_run = 0;
      }
    }
  }
  if (!converged) {
    throw NumericError("casimir_pressure: Matsubara sum not converged",
                       prefactor * sum.f);
  }
  return {prefactor * sum.f, prefactor * sum.g};
}

}  // namespace

FilmStack gold_film_stack(const FilmSample& sample, double temperature) {
  FilmStack s;
  s.plate = gold_drude();
  s.film = sample.film;
  s.substrate = gold_drude();
  s.thickness = sample.thickness;
  s.temperature = temperature;
  return s;
}

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1e-2)) {
    throw ConfigError("QuadratureConfig: rel_tol must be in (0, 1e-2)");
  }
  if (gl_nodes < 16) {
    throw ConfigError("QuadratureConfig: gl_nodes must be >= 16");
  }
  if (matsubara_consecutive_small < 1) {
    throw ConfigError(
        "QuadratureConfig: matsubara_consecutive_small must be >= 1");
  }
}

double matsubara_xi(long u, double temperature) {
  if (u < 0) throw std::domain_error("matsubara_xi: u must be >= 0");
  if (!(temperature > 0.0)) {
    throw std::domain_error("matsubara_xi: temperature must be > 0");
  }
  return 2.0 * kPi * static_cast<double>(u) * PhysConstants::kB * temperature /
         PhysConstants::hbar;
}

double q_perp(double eps_ixi, double xi, double kpar) {
  const double xic = xi / PhysConstants::c;
  return std::sqrt(eps_ixi * xic * xic + kpar * kpar);
}

double fresnel_r(double eps_a, double eps_b, double xi, double kpar,
                 Polarization pol) {
  if (xi == 0.0 && kpar == 0.0) {
    throw std::domain_error("fresnel_r: xi and kpar cannot both vanish");
  }
  if (xi < 0.0 || kpar < 0.0) {
    throw std::domain_error("fresnel_r: xi and kpar must be >= 0");
  }
  const double xic2 = (xi / PhysConstants::c) * (xi / PhysConstants::c);
  const LayerEps a{eps_a, false}, b{eps_b, false};
  return interface_r(a, b, xic2, kpar * kpar, pol);
}

double film_reflection(const FilmStack& stack, double xi, double kpar,
                       Polarization pol) {
  if (xi == 0.0 && kpar == 0.0) {
    throw std::domain_error("film_reflection: xi and kpar cannot both vanish");
  }
  if (xi < 0.0 || kpar < 0.0) {
    throw std::domain_error("film_reflection: xi and kpar must be >= 0");
  }
  TermContext c;
  c.xi = xi;
  c.xi_c2 = (xi / PhysConstants::c) * (xi / PhysConstants::c);
  c.film = layer_at(stack.film, xi);
  c.substrate = layer_at(stack.substrate, xi);
  c.thickness = stack.thickness;
  return film_r(c, kpar * kpar, pol);
}

double pec_pressure(double gap) {
  if (!(gap > 0.0)) throw std::domain_error("pec_pressure: gap must be > 0");
  const double d2 = gap * gap;
  return PhysConstants::hbar * PhysConstants::c * kPi * kPi /
         (240.0 * d2 * d2);
}

double casimir_pressure(const FilmStack& stack, double gap,
                        const QuadratureConfig& quad) {
  return evaluate(stack, gap, quad).pressure;
}

PressurePoint pressure_with_gap_derivative(const FilmStack& stack, double gap,
                                           const QuadratureConfig& quad) {
  return evaluate(stack, gap, quad);
}

double normalized_pressure(const FilmStack& stack, double gap,
                           const QuadratureConfig& quad) {
  return casimir_pressure(stack, gap, quad) / pec_pressure(gap);
}

double dpnorm_dz(const FilmStack& stack, double gap,
                 const QuadratureConfig& quad) {
  const PressurePoint p = evaluate(stack, gap, quad);
  const double dpnorm_dd =
      (p.dpressure_dgap + 4.0 * p.pressure / gap) / pec_pressure(gap);
  return dpnorm_dd * 1e-6;  // z in micrometers
}

ForceCurve force_curve(const FilmStack& stack, const std::vector<double>& gaps,
                       const QuadratureConfig& quad) {
  if (gaps.empty()) throw std::domain_error("force_curve: empty gap grid");
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!(gaps[i] > 0.0) || (i > 0 && gaps[i] <= gaps[i - 1])) {
      throw std::domain_error("force_curve: gaps must be positive ascending");
    }
  }
  ForceCurve curve;
  curve.gaps = gaps;
  curve.pressure.reserve(gaps.size());
  curve.p_norm.reserve(gaps.size());
  curve.dpnorm_dz.reserve(gaps.size());
  for (double d : gaps) {
    const PressurePoint p = evaluate(stack, d, quad);
    const double pp = pec_pressure(d);
    curve.pressure.push_back(p.pressure);
    curve.p_norm.push_back(p.pressure / pp);
    curve.dpnorm_dz.push_back(
        (p.dpressure_dgap + 4.0 * p.pressure / d) / pp * 1e-6);
  }
  return curve;
}

void write_force_curve_csv(std::ostream& os, const ForceCurve& curve,
                           const std::vector<std::string>& comment_lines) {
  for (const std::string& line : comment_lines) os << "# " << line << "\n";
  os << "d_nm,P_Pa,P_norm,dPnorm_dz_per_um\n";
  for (std::size_t i = 0; i < curve.gaps.size(); ++i) {
    os << g17(curve.gaps[i] * 1e9) << ',' << g17(curve.pressure[i]) << ','
       << g17(curve.p_norm[i]) << ',' << g17(curve.dpnorm_dz[i]) << '\n';
  }
}

}  // namespace casimir
