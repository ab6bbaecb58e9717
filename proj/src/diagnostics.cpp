#include "vnsf/diagnostics.hpp"

#include <fmt/format.h>

#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"

namespace vnsf {

double total_energy(const Domain& d, const GasModel& gas, const FluidState& s) {
  const Mat L = s.D.asDiagonal() * flat_adjacent(d, s.A);
  return pairing1(d, L, s.A) - lagrangian(d, gas, s.A, s.D, s.S);
}

DiagnosticsSample sample(const Domain& d, const PhysicsParams& p, const FluidState& s, double time) {
  const int n = d.n();
  const Vec& w = d.area();
  DiagnosticsSample out;
  out.time = time;
  out.mass = pairing0(d, Vec::Ones(n), s.D);
  out.entropy = pairing0(d, Vec::Ones(n), s.S);
  out.energy = total_energy(d, p.gas, s);

  const Vec theta = temperature(d, p, s.D, s.S);
  const Mat J = entropy_flux(d, p, theta);
  for (int i = 0; i < n; ++i)
    if (J(i, n) != 0.0) out.boundary_heat += w[i] * (theta[i] + theta[n]) * J(i, n);
  out.heat_source = w.dot(p.heat.power(d, s.D, time));

  const Vec tj = act_fn(theta, J).head(n);
  const Vec rate = (friction_power(d, p, s.A) - tj).cwiseQuotient(theta.head(n));
  out.entropy_production = w.dot(rate);
  return out;
}

void set_energy_residual(DiagnosticsSample& current, const DiagnosticsSample& previous) {
  const double dt = current.time - previous.time;
  if (!(dt > 0.0)) throw DomainError("set_energy_residual: samples are not increasing in time");
  current.energy_residual = (current.energy - previous.energy) / dt - current.boundary_heat - current.heat_source;
}

Vec vorticity_field(const Domain& d, const Mat& A) { return total_vorticity(d, flat_adjacent(d, A)); }

double kelvin_circulation(const Domain& d, const Mat& A, const Vec& D, const std::vector<int>& loop) {
  if (loop.size() < 2) throw DomainError("kelvin_circulation: loop needs at least two cells");
  double c = 0.0;
  for (std::size_t t = 0; t < loop.size(); ++t) {
    const int i = loop[t], j = loop[(t + 1) % loop.size()];
    const int k = d.mesh().local_edge(i, j);
    if (k < 0) throw DomainError(fmt::format("kelvin_circulation: cells {} and {} are not adjacent", i, j));
    c += d.flat_coef(i, k) * A(i, j) / (0.5 * (D[i] + D[j]));
  }
  return c;
}

}  // namespace vnsf
