#pragma once

#include "vnsf/mesh.hpp"

namespace vnsf {

// eps(rho, s) = K rho^gamma exp(s / (cv rho))
struct GasModel {
  double gamma = 1.4;
  double cv = 1.0;
  double K = 1.0;
};

// physical: heat runs hot -> cold. printed: the flux sign exactly as the
// scheme is usually written, which is anti-diffusive with this Laplacian.
enum class ConductionSign { physical, printed };

enum class HeatKind { zero, constant, gaussian };

struct HeatSource {
  HeatKind kind = HeatKind::zero;
  double amplitude = 0.0;   // R, energy per mass per time
  Vec2 center{0.5, 0.5};
  double width = 0.1;
  // D_i R_i
  Vec power(const Domain& d, const Vec& D, double time) const;
};

struct PhysicsParams {
  GasModel gas;
  double mu = 0.0;
  double zeta = 0.0;
  double lambda = 0.0;
  double theta_env = 1.0;
  bool insulated = true;
  ConductionSign sign = ConductionSign::physical;
  HeatSource heat;

  double mu_tilde() const { return zeta + 4.0 * mu / 3.0; }
  void check() const;
};

struct FluidState {
  Mat A;   // tangential, in S, V and d0
  Vec D;
  Vec S;
};

struct InternalEnergy {
  double value, dD, dS;
};

InternalEnergy internal_energy(const GasModel& gas, double D, double S);
double pressure(const GasModel& gas, double D, double S);
// S giving temperature theta at density D
double entropy_for_temperature(const GasModel& gas, double D, double theta);

// K_i = sum_j A_flat_ij A_ij
Vec kinetic_density(const Domain& d, const Mat& A);
double lagrangian(const Domain& d, const GasModel& gas, const Mat& A, const Vec& D, const Vec& S);
Vec dl_dD(const Domain& d, const GasModel& gas, const Mat& A, const Vec& D, const Vec& S);
// length N+1, environment last
Vec temperature(const Domain& d, const PhysicsParams& p, const Vec& D, const Vec& S);
Mat entropy_flux(const Domain& d, const PhysicsParams& p, const Vec& theta);
// -(Theta_i (div J)_i + (Theta . J)_i), the conduction heating of each cell
Vec conduction_heating(const Domain& d, const Mat& J, const Vec& theta);

Mat nabla_AA(const Domain& d, const Mat& A);
Vec friction_power(const Domain& d, const PhysicsParams& p, const Mat& A);
Mat pressure_gradient_form(const Domain& d, const GasModel& gas, const Vec& D, const Vec& S);
Mat viscous_form(const Domain& d, const PhysicsParams& p, const Mat& A);

}  // namespace vnsf
