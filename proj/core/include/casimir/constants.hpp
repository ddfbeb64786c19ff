#pragma once

namespace casimir {

/// CODATA values, fixed by contract. Not configurable.
struct PhysConstants {
  static constexpr double hbar = 1.054571817e-34;      // J s
  static constexpr double c = 299792458.0;             // m / s
  static constexpr double kB = 1.380649e-23;           // J / K
  static constexpr double e_charge = 1.602176634e-19;  // C
};

/// Photon energy in eV -> angular frequency in rad/s.
/// Throws std::domain_error for negative input.
double ev_to_radps(double energy_ev);

}  // namespace casimir
