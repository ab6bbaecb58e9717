#include "vnsf/integrator.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"

namespace vnsf {

void StepperConfig::check() const {
  if (!(h > 0.0)) throw DomainError("time step must be positive");
  if (!(tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (max_iter < 1 || max_entropy_iter < 1) throw DomainError("iteration caps must be at least 1");
}

Mat assemble_free_field(const Domain& d, const Vec& free_flux) {
  const auto& fp = d.free_pairs();
  if (free_flux.size() != static_cast<Eigen::Index>(fp.size()))
    throw SizeError(fmt::format("assemble_free_field: {} fluxes for {} free pairs", free_flux.size(), fp.size()));
  Vec all = Vec::Zero(d.pairs().size());
  for (std::size_t q = 0; q < fp.size(); ++q) all[fp[q]] = free_flux[q];
  return assemble_field(d, all);
}

Vec free_fluxes(const Domain& d, const Mat& A) {
  const Vec all = pair_fluxes(d, A);
  const auto& fp = d.free_pairs();
  Vec f(fp.size());
  for (std::size_t q = 0; q < fp.size(); ++q) f[q] = all[fp[q]];
  return f;
}

namespace {

double sup(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// D-bar weighted |*h|/|h| per free pair: m = coef * f
Vec momentum_coef(const Domain& d, const Vec& D) {
  Vec c(d.free_pairs().size());
  for (std::size_t q = 0; q < d.free_pairs().size(); ++q) {
    const auto& e = d.pairs()[d.free_pairs()[q]];
    c[q] = 0.5 * (D[e.i] + D[e.j]) / d.conductance(e.i, e.ki);
  }
  return c;
}

// entropy source without transport: (friction - Theta . J + D R) / Theta, length N
Vec entropy_source(const Domain& d, const PhysicsParams& p, const Mat& A, const Vec& D, const Vec& theta,
                   const Mat& J, double time) {
  const int n = d.n();
  const Vec tj = act_fn(theta, J).head(n);
  return (friction_power(d, p, A) - tj + p.heat.power(d, D, time)).cwiseQuotient(theta.head(n));
}

}  // namespace

Rates semi_discrete_rhs(const Domain& d, const PhysicsParams& p, const FluidState& s, double time) {
  const int n = d.n();
  const Vec theta = temperature(d, p, s.D, s.S);
  const Mat J = entropy_flux(d, p, theta);
  const Mat lie = lie_deriv_oneform_density(d, s.A, s.D, s.A);
  const Vec K = kinetic_density(d, s.A);
  const Mat press = pressure_gradient_form(d, p.gas, s.D, s.S);
  const Mat visc = viscous_form(d, p, s.A);

  Rates r;
  r.momentum.resize(d.free_pairs().size());
  for (std::size_t q = 0; q < d.free_pairs().size(); ++q) {
    const auto& e = d.pairs()[d.free_pairs()[q]];
    const int i = e.i, j = e.j;
    const double dbar = 0.5 * (s.D[i] + s.D[j]);
    r.momentum[q] = -lie(i, j) - 0.5 * dbar * (K[j] - K[i]) - press(i, j) + visc(i, j);
  }
  r.D = -act_den(d, s.D, s.A);
  r.S = -act_den(d, s.S, s.A) - divergence(J).head(n) + entropy_source(d, p, s.A, s.D, theta, J, time);
  return r;
}

FluidState rk4_step(const Domain& d, const PhysicsParams& p, const FluidState& s, double h, double time) {
  struct Y {
    Vec f, D, S;
  };
  auto deriv = [&](const Y& y, double t) {
    const FluidState st{assemble_free_field(d, y.f), y.D, y.S};
    const Rates r = semi_discrete_rhs(d, p, st, t);
    // m = c(D) f  ->  f' = (m' - c(D') f) / c(D)
    const Vec c = momentum_coef(d, y.D), cdot = momentum_coef(d, r.D);
    return Y{(r.momentum - cdot.cwiseProduct(y.f)).cwiseQuotient(c), r.D, r.S};
  };
  auto axpy = [](const Y& y, double a, const Y& k) { return Y{y.f + a * k.f, y.D + a * k.D, y.S + a * k.S}; };

  const Y y0{free_fluxes(d, s.A), s.D, s.S};
  const Y k1 = deriv(y0, time);
  const Y k2 = deriv(axpy(y0, 0.5 * h, k1), time + 0.5 * h);
  const Y k3 = deriv(axpy(y0, 0.5 * h, k2), time + 0.5 * h);
  const Y k4 = deriv(axpy(y0, h, k3), time + h);
  const Vec f = y0.f + h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f);
  const Vec D = y0.D + h / 6.0 * (k1.D + 2.0 * k2.D + 2.0 * k3.D + k4.D);
  const Vec S = y0.S + h / 6.0 * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
  return {assemble_free_field(d, f), D, S};
}

struct VariationalIntegrator::Solver {
  Eigen::PartialPivLU<Mat> lu;
  bool have_lu = false;
  // per-step constants
  Mat history;
  Vec press;
};

VariationalIntegrator::VariationalIntegrator(const Domain& d, PhysicsParams p, StepperConfig c)
    : d_(d), params_(std::move(p)), config_(std::move(c)), solver_(std::make_unique<Solver>()) {
  params_.check();
  config_.check();
}

VariationalIntegrator::~VariationalIntegrator() = default;

void VariationalIntegrator::start(const FluidState& s0, double time) {
  const int n = d_.n();
  if (s0.A.rows() != n || s0.D.size() != n || s0.S.size() != n) throw SizeError("start: state does not match the mesh");
  const Membership m = membership_checks(d_, s0.A, 1e-12);
  if (!m.d || !m.S || !m.V || !m.d0) throw DomainError("start: initial field is not in S, V and d0");
  temperature(d_, params_, s0.D, s0.S);  // throws on nonpositive D or Theta

  // free-pair reassembly drops round-off outside the admissible entries
  state_ = {assemble_free_field(d_, free_fluxes(d_, s0.A)), s0.D, s0.S};
  A_prev_ = state_.A;
  D_ = s0.D;
  S_ = s0.S;
  D_prev_ = config_.cold_start == ColdStart::backward ? group_act_den(d_, s0.D, tau(config_.group, A_prev_, config_.h))
                                                       : s0.D;
  time_ = time;
  steps_ = 0;
  solver_->have_lu = false;
  prepare();
}

void VariationalIntegrator::prepare() {
  const double h = config_.h;
  const Mat L = D_prev_.asDiagonal() * flat(d_, A_prev_);
  solver_->history = dtau_inv_adjoint(d_, config_.group, -h * A_prev_, L) / h;
  const Mat press = pressure_gradient_form(d_, params_.gas, D_, S_);
  solver_->press.resize(d_.free_pairs().size());
  for (std::size_t q = 0; q < d_.free_pairs().size(); ++q) {
    const auto& e = d_.pairs()[d_.free_pairs()[q]];
    solver_->press[q] = press(e.i, e.j);
  }
}

Vec VariationalIntegrator::momentum_residual(const Vec& f) const {
  const double h = config_.h;
  const Mat A = assemble_free_field(d_, f);
  const Mat L = D_.asDiagonal() * flat(d_, A);
  const Mat X = dtau_inv_adjoint(d_, config_.group, h * A, L) / h - solver_->history;
  const Vec K = kinetic_density(d_, A);
  const Mat visc = viscous_form(d_, params_, A);
  Vec r(f.size());
  for (std::size_t q = 0; q < d_.free_pairs().size(); ++q) {
    const auto& e = d_.pairs()[d_.free_pairs()[q]];
    const int i = e.i, j = e.j;
    const double proj = 0.5 * (X(i, j) - X(j, i) - X(i, i) + X(j, j));
    r[q] = proj + 0.25 * (D_[i] + D_[j]) * (K[j] - K[i]) + solver_->press[q] - visc(i, j);
  }
  return r;
}

StepRecord VariationalIntegrator::step() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = d_.n();
  const double h = config_.h;
  const double tol = config_.tol;
  StepRecord rec;
  Solver& sv = *solver_;
  if (sv.history.size() == 0) throw DomainError("step: call start() first");

  // (1) momentum
  Vec f = free_fluxes(d_, A_prev_);
  const Eigen::Index m = f.size();
  auto jacobian = [&](const Vec& at) {
    Mat Jm(m, m);
    const double delta = 1e-7 * std::max(1.0, sup(at));
    Vec x = at;
    for (Eigen::Index c = 0; c < m; ++c) {
      x[c] = at[c] + delta;
      const Vec rp = momentum_residual(x);
      x[c] = at[c] - delta;
      const Vec rm = momentum_residual(x);
      x[c] = at[c];
      Jm.col(c) = (rp - rm) / (2.0 * delta);
    }
    return Jm;
  };
  const Vec coef = momentum_coef(d_, D_) / h;
  double r_prev = 0.0;
  bool done = m == 0;
  for (int it = 1; it <= config_.max_iter && !done; ++it) {
    const Vec r = momentum_residual(f);
    const double rn = sup(r);
    rec.momentum_iters = it;
    rec.momentum_residual = rn;
    if (!std::isfinite(rn)) break;
    if (rn <= tol) {
      done = true;
      break;
    }
    if (config_.jacobian == JacobianKind::fixed_point) {
      f -= r.cwiseQuotient(coef);
    } else {
      const bool refresh = !sv.have_lu || (it > 1 && rn > 0.1 * r_prev);
      if (refresh) {
        sv.lu.compute(jacobian(f));
        sv.have_lu = true;
        ++rec.jacobian_builds;
      }
      f -= sv.lu.solve(r);
    }
    r_prev = rn;
  }
  if (m == 0) rec.momentum_iters = 1;
  if (!done)
    throw ConvergenceError(fmt::format("momentum solve: residual {:.3e} after {} iterations", rec.momentum_residual,
                                       rec.momentum_iters));
  const Mat A = assemble_free_field(d_, f);

  // (2) density
  const Mat q_back = tau(config_.group, -A, h);
  const Vec D1 = group_act_den(d_, D_, q_back);

  // (3) entropy
  const Vec theta = temperature(d_, params_, D_, S_);
  const Mat J = entropy_flux(d_, params_, theta);
  const Vec b = S_ + h * entropy_source(d_, params_, A, D_, theta, J, time_);
  const Vec bq = group_act_den(d_, b, q_back);
  Vec S1 = S_;
  double e_prev = INFINITY;
  bool ok = false;
  for (int it = 1; it <= config_.max_entropy_iter; ++it) {
    const Vec th1 = temperature(d_, params_, D1, S1);
    const Vec next = bq - h * divergence(entropy_flux(d_, params_, th1)).head(n);
    const double e = sup(next - S1);
    rec.entropy_iters = it;
    rec.entropy_residual = e;
    if (e <= tol * std::max(1.0, sup(S1))) {
      S1 = next;
      ok = true;
      break;
    }
    S1 = e < e_prev ? next : Vec(0.5 * (S1 + next));
    e_prev = e;
  }
  if (!ok)
    throw ConvergenceError(fmt::format("entropy solve: residual {:.3e} after {} iterations", rec.entropy_residual,
                                       rec.entropy_iters));
  if (config_.boundary == BoundaryTemperature::dirichlet)
    for (int i = 0; i < n; ++i)
      if (!d_.free_cell(i)) S1[i] = entropy_for_temperature(params_.gas, D1[i], params_.theta_env);
  temperature(d_, params_, D1, S1);

  A_prev_ = A;
  D_prev_ = D_;
  D_ = D1;
  S_ = S1;
  state_ = {A, D1, S1};
  time_ += h;
  ++steps_;
  prepare();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

void run(VariationalIntegrator& vi, int n_steps, const std::vector<Observer>& observers) {
  for (int k = 1; k <= n_steps; ++k) {
    StepRecord rec;
    try {
      rec = vi.step();
    } catch (const std::exception& e) {
      throw StepError(k, fmt::format("step {}: {}", k, e.what()));
    }
    for (const auto& o : observers) o(k, vi, rec);
  }
}

}  // namespace vnsf
