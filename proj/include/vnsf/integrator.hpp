#pragma once

#include <functional>
#include <memory>

#include "vnsf/groups.hpp"
#include "vnsf/physics.hpp"

namespace vnsf {

enum class JacobianKind { finite_difference, fixed_point };
enum class BoundaryTemperature { insulated, dirichlet };
// How the missing step -1 is filled on the first momentum solve.
enum class ColdStart { backward, frozen };

struct StepperConfig {
  double h = 1e-3;
  double tol = 1e-10;
  int max_iter = 50;
  int max_entropy_iter = 100;
  GroupMap group;
  JacobianKind jacobian = JacobianKind::finite_difference;
  BoundaryTemperature boundary = BoundaryTemperature::insulated;
  ColdStart cold_start = ColdStart::backward;

  void check() const;
};

struct StepRecord {
  int momentum_iters = 0;
  int entropy_iters = 0;
  int jacobian_builds = 0;
  double momentum_residual = 0.0;
  double entropy_residual = 0.0;
  double wall_seconds = 0.0;
};

// One flux per free pair (both cells off the boundary); the result is in S, V and d0.
Mat assemble_free_field(const Domain& d, const Vec& free_flux);
Vec free_fluxes(const Domain& d, const Mat& A);

struct Rates {
  Vec momentum;   // d/dt of Dbar_ij A_flat_ij on free pairs
  Vec D;
  Vec S;
};

Rates semi_discrete_rhs(const Domain& d, const PhysicsParams& p, const FluidState& s, double time = 0.0);
FluidState rk4_step(const Domain& d, const PhysicsParams& p, const FluidState& s, double h, double time = 0.0);

class VariationalIntegrator {
 public:
  VariationalIntegrator(const Domain& d, PhysicsParams p, StepperConfig c);
  ~VariationalIntegrator();

  void start(const FluidState& s0, double time = 0.0);
  StepRecord step();

  // (A^k, D^{k+1}, S^{k+1}) after k+1 steps; the initial state before any step
  const FluidState& state() const { return state_; }
  double time() const { return time_; }
  int steps() const { return steps_; }
  const PhysicsParams& params() const { return params_; }
  const StepperConfig& config() const { return config_; }

  // momentum residual of the next step at a trial flux vector
  Vec momentum_residual(const Vec& free_flux) const;

 private:
  struct Solver;
  const Domain& d_;
  PhysicsParams params_;
  StepperConfig config_;
  FluidState state_;
  Mat A_prev_;
  Vec D_prev_, D_, S_;
  double time_ = 0.0;
  int steps_ = 0;
  std::unique_ptr<Solver> solver_;

  void prepare();
};

using Observer = std::function<void(int step, const VariationalIntegrator&, const StepRecord&)>;

// Steps 1..n_steps, calling every observer after each. Failures are rethrown as StepError.
void run(VariationalIntegrator& vi, int n_steps, const std::vector<Observer>& observers);

}  // namespace vnsf
