// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for context.
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "vnsf/diagnostics.hpp"
#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"
#include "vnsf/groups.hpp"
#include "vnsf/integrator.hpp"
#include "vnsf/io.hpp"
#include "vnsf/physics.hpp"
#include "vnsf/verify.hpp"

using namespace vnsf;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  fmt::print("{} {:>2} {}: {}\n", ok ? "PASS" : "FAIL", id, name, detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& msg) {
  fmt::print("INFO    {}\n", msg);
  std::fflush(stdout);
}

struct Rng {
  std::mt19937_64 g;
  std::uniform_real_distribution<double> u{-1.0, 1.0};
  explicit Rng(std::uint64_t seed) : g(seed) {}
  Vec vec(Eigen::Index n) {
    Vec v(n);
    for (auto& x : v) x = u(g);
    return v;
  }
  Mat field(const Domain& d) { return assemble_field(d, vec(d.pairs().size())); }
  Mat free_field(const Domain& d) { return assemble_free_field(d, vec(d.free_pairs().size())); }
};

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Mesh box63() { return generate_rect_mesh(4, 7, 1.0, 1.0); }

FluidState preset(const Domain& d, const std::string& name, double amplitude) {
  InitialParams ip;
  ip.preset = name;
  ip.amplitude = amplitude;
  return initial_condition(d, GasModel{}, ip);
}

PhysicsParams isolated(double mu, double lambda) {
  PhysicsParams p;
  p.mu = mu;
  p.lambda = lambda;
  p.insulated = true;
  return p;
}

// ---- 1-3: identity suite over the randomized corpus

void lemma_suite(const VerifyReport& r) {
  const std::vector<std::string> lemmas{
      "integral-div", "integral-div-general", "div-adjoint", "div-adjoint-extended",
      "integral-action-density", "two-actions", "pairing-change", "projection"};
  bool ok = r.meshes >= 50 && r.min_cells >= 20 && r.max_cells <= 200 && r.seconds < 30.0;
  double worst = 0.0;
  std::string failed;
  for (const auto& name : lemmas) {
    const auto& l = r.find(name);
    worst = std::max(worst, l.max_residual);
    if (!(l.pass() && l.max_residual < 1e-11)) {
      ok = false;
      failed += " " + name;
    }
  }
  report(1, "lemma suite",
         ok, fmt::format("{} meshes ({}-{} cells), worst residual {:.2e} < 1e-11, {:.2f} s{}", r.meshes, r.min_cells,
                         r.max_cells, worst, r.seconds, failed.empty() ? "" : "; failed:" + failed));
}

void curl_curl(const VerifyReport& r) {
  const auto& l = r.find("curl-curl");
  report(2, "curl-curl three ways", l.pass() && l.max_residual < 1e-10,
         fmt::format("max relative gap {:.2e} over {} samples", l.max_residual, l.samples));
}

void kite_formula(const VerifyReport& r) {
  const auto& l = r.find("kite");
  report(3, "density lie derivative, kite vs direct", l.pass() && l.max_residual < 1e-10,
         fmt::format("max relative gap on adjacent entries {:.2e} over {} samples", l.max_residual, l.samples));
}

// ---- 4: covariant derivative stays in V

void covariant_derivative() {
  Rng rng(41);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const int nx = 3 + s % 4, ny = 3 + (s / 4) % 4;
    const Mesh base = generate_rect_mesh(nx, ny, 1.0, ny * std::sqrt(3.0) / (2.0 * nx));
    const Domain d(s % 2 ? jitter_mesh(base, 0.15, 100 + s) : base);
    const Mat out = nabla_AA(d, rng.free_field(d));
    worst = std::max(worst, membership_checks(d, out, 1e-13).res_V);
  }
  report(4, "covariant derivative in V", worst < 1e-13, fmt::format("100 inputs, max relative V residual {:.2e}", worst));
}

// ---- 5: group difference maps

void group_maps(const VerifyReport& r) {
  const Domain d(jitter_mesh(generate_rect_mesh(3, 4, 1.0, 4 * std::sqrt(3.0) / 6.0), 0.15, 5));
  const int n = d.n();
  const Mat I = Mat::Identity(n, n);
  Rng rng(51);
  bool exact_identity = true;
  double inverse = 0, props = 0, fd_gap = 0, adjoint = 0;
  for (auto kind : {TauKind::exp, TauKind::cayley}) {
    const GroupMap g{kind};
    exact_identity = exact_identity && tau(g, Mat::Zero(n, n)) == I;
    for (int s = 0; s < 10; ++s) {
      const Mat A = rng.field(d), eta = rng.field(d), L = rng.field(d), B = rng.field(d);
      const Mat xi = (0.02 + 0.08 * (s / 9.0)) * A / operator_norm(A);   // |xi| up to 0.1
      inverse = std::max(inverse, max_abs(tau(g, xi) * tau(g, Mat(-xi)) - I));
      const auto res = dtau_property_checks(g, xi, eta);
      props = std::max({props, res.conjugation, res.inverse});
      const double eps = 1e-5;
      const Mat fd = tau(g, xi).inverse() * (tau(g, Mat(xi + eps * eta)) - tau(g, Mat(xi - eps * eta))) / (2 * eps);
      fd_gap = std::max(fd_gap, max_abs(dtau_inv(g, xi, fd) - eta));
      const double lhs = pairing1(d, dtau_inv_adjoint(d, g, xi, L), B), rhs = pairing1(d, L, dtau_inv(g, xi, B));
      adjoint = std::max(adjoint, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1.0));
    }
  }
  // corpus results too
  for (const char* tag : {"exp", "cayley"}) {
    inverse = std::max(inverse, r.find(std::string("tau-inverse-") + tag).max_residual);
    props = std::max(props, r.find(std::string("dtau-properties-") + tag).max_residual);
  }
  const bool ok = exact_identity && inverse < 1e-12 && props < 1e-10 && fd_gap < 1e-6 && adjoint < 1e-12;
  report(5, "group difference maps", ok,
         fmt::format("tau(0)=I {}, tau(x)tau(-x)-I {:.2e}, properties {:.2e}, inverse tangent vs FD {:.2e}, adjoint {:.2e}",
                     exact_identity ? "exact" : "NOT exact", inverse, props, fd_gap, adjoint));
}

// ---- 6, 7: isolated shear run, and the hot-spot conduction pin

struct RunStats {
  double mass_drift = 0;
  double worst_entropy_step = 1e300;
  int entropy_drops = 0;
  double seconds = 0;
};

RunStats shear_run(double amplitude, int steps) {
  const Domain d(box63());
  const FluidState s0 = preset(d, "shear", amplitude);
  VariationalIntegrator vi(d, isolated(0.01, 0.01), StepperConfig{});
  vi.start(s0);
  const double m0 = d.area().dot(s0.D);
  double S_prev = d.area().dot(s0.S);
  RunStats st;
  const auto t0 = Clock::now();
  run(vi, steps, {[&](int, const VariationalIntegrator& v, const StepRecord&) {
        st.mass_drift = std::max(st.mass_drift, std::abs(d.area().dot(v.state().D) - m0));
        const double S = d.area().dot(v.state().S);
        st.worst_entropy_step = std::min(st.worst_entropy_step, S - S_prev);
        if (S - S_prev < -1e-9) ++st.entropy_drops;
        S_prev = S;
      }});
  st.seconds = seconds_since(t0);
  return st;
}

struct Relaxation {
  int max_rises = 0, min_drops = 0;
  double theta_max0 = 0, theta_max = 0, theta_min0 = 0, theta_min = 0;
  int first_bad = -1;
  bool ok() const { return max_rises == 0 && min_drops == 0 && theta_max < theta_max0 && theta_min > theta_min0; }
};

Relaxation hot_spot(double mu, double lambda, ConductionSign sign, int steps) {
  const Domain d(box63());
  const int n = d.n();
  PhysicsParams p = isolated(mu, lambda);
  p.sign = sign;
  const FluidState s0 = preset(d, "hot-spot", 0.1);
  Relaxation r;
  const Vec th0 = temperature(d, p, s0.D, s0.S).head(n);
  r.theta_max0 = r.theta_max = th0.maxCoeff();
  r.theta_min0 = r.theta_min = th0.minCoeff();
  VariationalIntegrator vi(d, p, StepperConfig{});
  vi.start(s0);
  try {
    run(vi, steps, {[&](int k, const VariationalIntegrator& v, const StepRecord&) {
          const Vec th = temperature(d, p, v.state().D, v.state().S).head(n);
          const bool rise = th.maxCoeff() > r.theta_max, drop = th.minCoeff() < r.theta_min;
          r.max_rises += rise;
          r.min_drops += drop;
          if ((rise || drop) && r.first_bad < 0) r.first_bad = k;
          r.theta_max = th.maxCoeff();
          r.theta_min = th.minCoeff();
        }});
  } catch (const StepError& e) {
    r.max_rises = std::max(r.max_rises, 1);
    if (r.first_bad < 0) r.first_bad = e.step;
  }
  return r;
}

void conservation_and_second_law() {
  const RunStats st = shear_run(0.1, 1000);
  report(6, "mass conservation", st.mass_drift < 1e-11,
         fmt::format("63-cell shear, 1000 steps, max |mass - mass0| {:.2e} < 1e-11 ({:.1f} s)", st.mass_drift,
                     st.seconds));

  const Relaxation phys = hot_spot(0.1, 0.1, ConductionSign::physical, 1000);
  const Relaxation printed = hot_spot(0.1, 0.1, ConductionSign::printed, 1000);
  const bool ok = st.worst_entropy_step >= -1e-9 && phys.ok();
  report(7, "second law", ok,
         fmt::format("shear: worst entropy step {:+.2e} ({} drops below -1e-9); hot-spot mu=lambda=0.1: max theta {:.6f} -> "
                     "{:.6f}, min {:.6f} -> {:.6f}, {} non-monotone steps; physical sign pinned",
                     st.worst_entropy_step, st.entropy_drops, phys.theta_max0, phys.theta_max, phys.theta_min0,
                     phys.theta_min, phys.max_rises + phys.min_drops));
  info(fmt::format("hot-spot with the printed conduction sign: {} non-monotone steps, first at step {}",
                   printed.max_rises + printed.min_drops, printed.first_bad));
  const Relaxation weak = hot_spot(0.01, 0.01, ConductionSign::physical, 1000);
  info(fmt::format("hot-spot with mu=lambda=0.01: {} non-monotone steps, first at step {} (acoustic rebound)",
                   weak.max_rises + weak.min_drops, weak.first_bad));
  const RunStats strong = shear_run(0.5, 1000);
  info(fmt::format("shear amplitude 0.5: worst entropy step {:+.2e}, {} of 1000 steps below -1e-9",
                   strong.worst_entropy_step, strong.entropy_drops));
}

// ---- 8: energy drift

double energy_drift(double h, double T) {
  const Domain d(box63());
  const PhysicsParams p = isolated(0.01, 0.01);
  const FluidState s0 = preset(d, "shear", 0.1);
  StepperConfig c;
  c.h = h;
  VariationalIntegrator vi(d, p, c);
  vi.start(s0);
  const double E0 = total_energy(d, p.gas, s0);
  double worst = 0.0;
  run(vi, static_cast<int>(std::lround(T / h)), {[&](int, const VariationalIntegrator& v, const StepRecord&) {
        worst = std::max(worst, std::abs(total_energy(d, p.gas, v.state()) - E0));
      }});
  return worst;
}

void energy() {
  const auto t0 = Clock::now();
  const double coarse = energy_drift(2e-3, 0.5), fine = energy_drift(1e-3, 0.5);
  const double ratio = coarse / fine, secs = seconds_since(t0);
  report(8, "energy drift first order", ratio >= 1.5 && ratio <= 2.5 && secs < 120.0,
         fmt::format("T=0.5: drift {:.3e} (h=2e-3), {:.3e} (h=1e-3), ratio {:.3f} in [1.5, 2.5], {:.1f} s", coarse, fine,
                     ratio, secs));
}

// ---- 9: rest state

void rest_state() {
  const Domain d(box63());
  const FluidState s0 = preset(d, "rest", 0.1);
  VariationalIntegrator vi(d, isolated(0.01, 0.01), StepperConfig{});
  vi.start(s0);
  run(vi, 100, {});
  const double gap = std::max({max_abs(vi.state().A), (vi.state().D - s0.D).cwiseAbs().maxCoeff(),
                               (vi.state().S - s0.S).cwiseAbs().maxCoeff()});
  report(9, "rest state fixed point", gap <= 1e-12, fmt::format("after 100 steps max change {:.2e}", gap));
}

// ---- 10: one variational step vs one RK4 step

void consistency() {
  const Domain d(box63());
  const int n = d.n();
  const PhysicsParams p = isolated(0.01, 0.01);
  FluidState s = preset(d, "shear", 0.5);
  for (int i = 0; i < n; ++i) {
    const Vec2 c = d.geo().circumcenter[i];
    s.D[i] = 1.0 + 0.1 * std::exp(-10.0 * (c - Vec2(0.4, 0.6)).squaredNorm());
    s.S[i] = 0.05 * std::cos(3.0 * c.x());
  }
  auto gap = [&](double h) {
    StepperConfig c;
    c.h = h;
    VariationalIntegrator vi(d, p, c);
    vi.start(s);
    vi.step();
    const FluidState rk = rk4_step(d, p, s, h);
    return std::max({(free_fluxes(d, vi.state().A) - free_fluxes(d, rk.A)).cwiseAbs().maxCoeff(),
                     (vi.state().D - rk.D).cwiseAbs().maxCoeff(), (vi.state().S - rk.S).cwiseAbs().maxCoeff()});
  };
  const double coarse = gap(1e-3), fine = gap(5e-4), ratio = coarse / fine;
  report(10, "one-step consistency with RK4", ratio >= 3.0 && ratio <= 5.3,
         fmt::format("difference {:.3e} (h=1e-3), {:.3e} (h=5e-4), ratio {:.3f} in [3.0, 5.3]", coarse, fine, ratio));
}

// ---- 11: operator convergence

void convergence() {
  // 4x7 has four columns per wavelength of cos(2 pi x); start one level finer
  const std::vector<std::pair<int, int>> grids{{4, 7}, {8, 14}, {16, 28}, {32, 56}};
  std::vector<double> lb, rt;
  for (auto [nx, ny] : grids) {
    const Domain d(generate_rect_mesh(nx, ny, 1.0, 1.0));
    const int n = d.n();
    Vec f(n);
    for (int i = 0; i < n; ++i) f[i] = std::cos(2 * M_PI * d.geo().circumcenter[i].x());
    const double q = pairing0(d, f, laplace_beltrami(d, f)) / pairing0(d, f, f);
    lb.push_back(std::abs(q - 4 * M_PI * M_PI) / (4 * M_PI * M_PI));

    auto u = [](const Vec2& x) {
      return Vec2(std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()), -std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()));
    };
    const auto back = reconstruct_velocity(d, init_from_velocity(d, u));
    double err = 0, norm = 0;
    for (int i = 0; i < n; ++i) {
      const Vec2 exact = u(d.geo().circumcenter[i]);
      err += d.area()[i] * (back[i] - exact).squaredNorm();
      norm += d.area()[i] * exact.squaredNorm();
    }
    rt.push_back(std::sqrt(err / norm));
  }
  auto order = [](const std::vector<double>& e, int k) { return std::log2(e[k] / e[k + 1]); };
  const double lb1 = order(lb, 1), lb2 = order(lb, 2), rt1 = order(rt, 1), rt2 = order(rt, 2);
  report(11, "operator convergence", std::min({lb1, lb2, rt1, rt2}) >= 0.8,
         fmt::format("8x14 -> 16x28 -> 32x56: eigenvalue error {:.2e} {:.2e} {:.2e} (orders {:.2f}, {:.2f}); velocity "
                     "roundtrip {:.2e} {:.2e} {:.2e} (orders {:.2f}, {:.2f})",
                     lb[1], lb[2], lb[3], lb1, lb2, rt[1], rt[2], rt[3], rt1, rt2));
  info(fmt::format("from 4x7: eigenvalue error {:.2e} (order {:.2f} to 8x14), velocity roundtrip {:.2e} (order {:.2f})",
                   lb[0], order(lb, 0), rt[0], order(rt, 0)));
}

// ---- 12: the bracket of two sparse fields leaves the sparsity pattern

void nonholonomy() {
  const Domain d(box63());
  const Mesh& m = d.mesh();
  // a middle cell with three neighbours, and two of them
  int mid = -1;
  for (int i = 0; i < d.n() && mid < 0; ++i)
    if (m.nbr[i][0] >= 0 && m.nbr[i][1] >= 0 && m.nbr[i][2] >= 0) mid = i;
  const int left = m.nbr[mid][0], right = m.nbr[mid][1];
  auto single = [&](int a, int b) {
    Vec flux = Vec::Zero(d.pairs().size());
    for (std::size_t k = 0; k < d.pairs().size(); ++k) {
      const auto& e = d.pairs()[k];
      if ((e.i == std::min(a, b)) && (e.j == std::max(a, b))) flux[k] = 1.0;
    }
    return assemble_field(d, flux);
  };
  const Mat A = single(left, mid), B = single(mid, right);
  const Mat C = bracket(A, B);
  bool adjacent = false;
  for (int k = 0; k < 3; ++k) adjacent = adjacent || m.nbr[left][k] == right;
  const bool inputs_in_S = membership_checks(d, A).S && membership_checks(d, B).S;
  const bool out_of_S = !membership_checks(d, C).S;
  const double witness = C(left, right), expected = A(left, mid) * B(mid, right);
  const bool ok = inputs_in_S && !adjacent && out_of_S && witness != 0.0 && std::abs(witness - expected) < 1e-14 * std::abs(expected);
  report(12, "nonholonomy witness", ok,
         fmt::format("cells {} | {} | {}: A, B in S {}, [A,B]({},{}) = {:.6e} = A({},{})B({},{}), [A,B] in S {}", left, mid,
                     right, inputs_in_S ? "yes" : "no", left, right, witness, left, mid, mid, right,
                     out_of_S ? "no" : "yes"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const VerifyReport r = run_verify(VerifyOptions{});
  lemma_suite(r);
  curl_curl(r);
  kite_formula(r);
  covariant_derivative();
  group_maps(r);
  conservation_and_second_law();
  energy();
  rest_state();
  consistency();
  convergence();
  nonholonomy();
  fmt::print("{} of 12 criteria failed, {:.1f} s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
