#include "vnsf/physics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"

namespace vnsf {

Vec HeatSource::power(const Domain& d, const Vec& D, double) const {
  Vec r = Vec::Zero(d.n());
  if (kind == HeatKind::zero) return r;
  for (int i = 0; i < d.n(); ++i) {
    double rate = amplitude;
    if (kind == HeatKind::gaussian) {
      const Vec2 x = d.geo().circumcenter[i] - center;
      rate *= std::exp(-x.squaredNorm() / (2.0 * width * width));
    }
    r[i] = D[i] * rate;
  }
  return r;
}

void PhysicsParams::check() const {
  if (!(gas.gamma > 1.0)) throw DomainError("gas.gamma must exceed 1");
  if (!(gas.cv > 0.0) || !(gas.K > 0.0)) throw DomainError("gas.cv and gas.K must be positive");
  if (mu < 0 || lambda < 0) throw DomainError("viscosity and conductivity must be nonnegative");
  if (!(theta_env > 0.0)) throw DomainError("environment temperature must be positive");
}

InternalEnergy internal_energy(const GasModel& gas, double D, double S) {
  if (!(D > 0.0)) throw DomainError(fmt::format("nonpositive density {}", D));
  const double e = gas.K * std::pow(D, gas.gamma) * std::exp(S / (gas.cv * D));
  return {e, e * (gas.gamma / D - S / (gas.cv * D * D)), e / (gas.cv * D)};
}

double pressure(const GasModel& gas, double D, double S) { return (gas.gamma - 1.0) * internal_energy(gas, D, S).value; }

double entropy_for_temperature(const GasModel& gas, double D, double theta) {
  if (!(D > 0.0) || !(theta > 0.0)) throw DomainError("entropy_for_temperature needs positive D and theta");
  return gas.cv * D * std::log(gas.cv * theta / (gas.K * std::pow(D, gas.gamma - 1.0)));
}

Vec kinetic_density(const Domain& d, const Mat& A) {
  Vec k = Vec::Zero(d.n());
  for (const auto& e : d.pairs()) {
    k[e.i] += d.flat_coef(e.i, e.ki) * A(e.i, e.j) * A(e.i, e.j);
    k[e.j] += d.flat_coef(e.j, e.kj) * A(e.j, e.i) * A(e.j, e.i);
  }
  return k;
}

double lagrangian(const Domain& d, const GasModel& gas, const Mat& A, const Vec& D, const Vec& S) {
  const Vec k = kinetic_density(d, A);
  double l = 0.0;
  for (int i = 0; i < d.n(); ++i) l += d.area()[i] * (0.5 * D[i] * k[i] - internal_energy(gas, D[i], S[i]).value);
  return l;
}

Vec dl_dD(const Domain& d, const GasModel& gas, const Mat& A, const Vec& D, const Vec& S) {
  Vec out = 0.5 * kinetic_density(d, A);
  for (int i = 0; i < d.n(); ++i) out[i] -= internal_energy(gas, D[i], S[i]).dD;
  return out;
}

Vec temperature(const Domain& d, const PhysicsParams& p, const Vec& D, const Vec& S) {
  Vec t(d.n() + 1);
  for (int i = 0; i < d.n(); ++i) {
    t[i] = internal_energy(p.gas, D[i], S[i]).dS;
    if (!(t[i] > 0.0) || !std::isfinite(t[i])) throw DomainError(fmt::format("nonpositive temperature in cell {}", i));
  }
  t[d.n()] = p.theta_env;
  return t;
}

Mat entropy_flux(const Domain& d, const PhysicsParams& p, const Vec& theta) {
  const int n = d.n();
  if (theta.size() != n + 1) throw SizeError("entropy_flux: temperature must be extended");
  for (Eigen::Index i = 0; i <= n; ++i)
    if (!(theta[i] > 0.0)) throw DomainError("entropy_flux: nonpositive temperature");
  const double s = p.sign == ConductionSign::physical ? -1.0 : 1.0;
  const Vec& w = d.area();
  Mat J = Mat::Zero(n + 1, n + 1);
  for (const auto& e : d.pairs()) {
    const double g = s * p.lambda * (theta[e.i] - theta[e.j]) / (theta[e.i] + theta[e.j]) * d.conductance(e.i, e.ki);
    J(e.i, e.j) = g / w[e.i];
    J(e.j, e.i) = -g / w[e.j];
  }
  if (!p.insulated) {
    for (auto [i, k] : d.boundary_edges()) {
      const double g = s * p.lambda * (theta[i] - theta[n]) / (theta[i] + theta[n]) * d.conductance(i, k);
      J(i, n) += g / w[i];
      J(n, i) -= g / d.geo().area_env;
    }
  }
  J.diagonal() = -J.rowwise().sum();
  return J;
}

Vec conduction_heating(const Domain& d, const Mat& J, const Vec& theta) {
  const int n = d.n();
  const Vec div = divergence(J);
  const Vec act = act_fn(theta, J);
  return -(theta.head(n).cwiseProduct(div.head(n)) + act.head(n));
}

Mat nabla_AA(const Domain& d, const Mat& A) {
  const Mat F = lie_deriv_oneform(A, flat(d, A)) - 0.5 * d0(kinetic_density(d, A));
  return sharp(d, F);
}

Vec friction_power(const Domain& d, const PhysicsParams& p, const Mat& A) {
  const Vec div = divergence(A);
  const Mat Af = flat(d, A);
  Vec out = p.mu_tilde() * div.cwiseProduct(div) + p.mu * wedge_star(d, Af, Af);
  if (p.mu != 0.0) out += 2.0 * p.mu * (divergence(nabla_AA(d, A)) - act_den(d, div, A));
  return out;
}

Mat pressure_gradient_form(const Domain& d, const GasModel& gas, const Vec& D, const Vec& S) {
  const int n = d.n();
  std::vector<InternalEnergy> e(n);
  for (int i = 0; i < n; ++i) e[i] = internal_energy(gas, D[i], S[i]);
  Mat out = Mat::Zero(n, n);
  for (const auto& pr : d.pairs()) {
    const int i = pr.i, j = pr.j;
    const double v = 0.5 * (D[i] + D[j]) * (e[i].dD - e[j].dD) + 0.5 * (S[i] + S[j]) * (e[i].dS - e[j].dS);
    out(i, j) = v;
    out(j, i) = -v;
  }
  return out;
}

Mat viscous_form(const Domain& d, const PhysicsParams& p, const Mat& A) {
  // pairs with A to minus the friction power: -mu_tilde d(div A) - mu Lambda(A_flat)
  const Vec div = divergence(A);
  Mat out = -p.mu * lambda_op(d, flat_adjacent(d, A));
  const double c = p.mu_tilde();
  for (const auto& e : d.pairs()) {
    out(e.i, e.j) -= c * (div[e.j] - div[e.i]);
    out(e.j, e.i) -= c * (div[e.i] - div[e.j]);
  }
  return out;
}

}  // namespace vnsf
