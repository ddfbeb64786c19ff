#include "casimir/constants.hpp"

#include <stdexcept>

namespace casimir {

double ev_to_radps(double energy_ev) {
  if (energy_ev < 0.0) {
    throw std::domain_error("ev_to_radps: negative energy");
  }
  return energy_ev * PhysConstants::e_charge / PhysConstants::hbar;
}

}  // namespace casimir
