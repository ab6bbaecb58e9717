#pragma once

#include <vector>

#include "vnsf/physics.hpp"

namespace vnsf {

struct DiagnosticsSample {
  double time = 0.0;
  double mass = 0.0;
  double entropy = 0.0;
  double energy = 0.0;
  double boundary_heat = 0.0;   // power entering through the boundary
  double heat_source = 0.0;     // sum Omega D R
  double energy_residual = 0.0; // (E - E_prev)/dt - boundary_heat - heat_source; 0 on the first sample
  double entropy_production = 0.0;
};

double total_energy(const Domain& d, const GasModel& gas, const FluidState& s);
DiagnosticsSample sample(const Domain& d, const PhysicsParams& p, const FluidState& s, double time);
// two-sample form of the energy balance residual
void set_energy_residual(DiagnosticsSample& current, const DiagnosticsSample& previous);

Vec vorticity_field(const Domain& d, const Mat& A);
// sum over consecutive loop cells of A_flat_ij / Dbar_ij; the loop closes back to its first cell
double kelvin_circulation(const Domain& d, const Mat& A, const Vec& D, const std::vector<int>& loop);

}  // namespace vnsf
