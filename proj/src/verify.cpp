#include "vnsf/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"
#include "vnsf/groups.hpp"
#include "vnsf/integrator.hpp"
#include "vnsf/physics.hpp"

namespace vnsf {

namespace {

constexpr double kLemmaTol = 1e-11;
constexpr double kOperatorTol = 1e-10;
constexpr double kMemberTol = 1e-13;

double rel(double a, double b, double ref) {
  const double scale = std::max({std::abs(a), std::abs(b), ref, 1e-300});
  return std::abs(a - b) / scale;
}

// weighted sum of |L| |B|, the natural size of pairing1(L, B)
double abs_pairing(const Domain& d, const Mat& L, const Mat& B) { return pairing1(d, L.cwiseAbs(), B.cwiseAbs()); }

double adjacent_gap(const Domain& d, const Mat& X, const Mat& Y) {
  double gap = 0.0, scale = 0.0;
  for (const auto& e : d.pairs()) {
    gap = std::max({gap, std::abs(X(e.i, e.j) - Y(e.i, e.j)), std::abs(X(e.j, e.i) - Y(e.j, e.i))});
    scale = std::max({scale, std::abs(X(e.i, e.j)), std::abs(X(e.j, e.i))});
  }
  return gap / std::max(scale, 1e-300);
}

struct Sampler {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> u{-1.0, 1.0};

  double operator()() { return u(rng); }
  Vec vec(Eigen::Index n) {
    Vec v(n);
    for (auto& x : v) x = u(rng);
    return v;
  }
  Vec positive(Eigen::Index n) {
    Vec v(n);
    for (auto& x : v) x = 1.0 + 0.5 * u(rng);
    return v;
  }
  Mat dense(Eigen::Index n) {
    Mat m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = u(rng);
    return m;
  }
  Mat field(const Domain& d) { return assemble_field(d, vec(d.pairs().size())); }
  Mat free_field(const Domain& d) { return assemble_free_field(d, vec(d.free_pairs().size())); }
  Mat extended(const Domain& d) {
    return assemble_extended(d, vec(d.pairs().size()), vec(d.boundary_edges().size()));
  }
};

class Tally {
 public:
  void add(const std::string& name, double tol, double residual) {
    auto it = std::find_if(rows_.begin(), rows_.end(), [&](const LemmaResult& r) { return r.name == name; });
    if (it == rows_.end()) {
      rows_.push_back({name, 0.0, tol, 0});
      it = rows_.end() - 1;
    }
    // NaN must fail, so keep it sticky
    if (std::isnan(residual) || std::isnan(it->max_residual)) it->max_residual = std::numeric_limits<double>::quiet_NaN();
    else it->max_residual = std::max(it->max_residual, residual);
    ++it->samples;
  }
  std::vector<LemmaResult> rows() const { return rows_; }

 private:
  std::vector<LemmaResult> rows_;
};

void check_mesh(const Domain& d, Sampler& rnd, const VerifyOptions& opt, Tally& t) {
  const int n = d.n();
  const Vec& w = d.area();
  const Mat A = rnd.field(d);
  const Vec F = rnd.vec(n), D = rnd.positive(n);
  const Vec divA = divergence(A);

  t.add("integral-div", kLemmaTol, rel(w.dot(divA), 0.0, w.dot(divA.cwiseAbs())));

  {
    const Mat E = rnd.extended(d);
    const Vec div = divergence(E).head(n), bd = boundary_divergence(E);
    t.add("integral-div-general", kLemmaTol,
          rel(w.dot(div), w.dot(bd), w.dot(div.cwiseAbs()) + w.dot(bd.cwiseAbs())));

    const Vec Fx = rnd.vec(n + 1);
    const Vec act = act_fn(Fx, E).head(n);
    const double lhs = pairing0(d, Fx.head(n), div);
    double rhs = -w.dot(act), ref = w.dot((E.topRows(n).cwiseAbs() * Fx.cwiseAbs()));
    for (int i = 0; i < n; ++i) rhs += w[i] * 0.5 * (Fx[i] + Fx[n]) * bd[i];
    t.add("div-adjoint-extended", kLemmaTol, rel(lhs, rhs, ref + w.dot(bd.cwiseAbs()) * Fx.cwiseAbs().maxCoeff()));
  }

  {
    const double lhs = pairing0(d, F, divA);
    const Mat dF = opt.flip_div_adjoint ? Mat(-d0(F)) : d0(F);
    t.add("div-adjoint", kLemmaTol, rel(lhs, pairing1(d, dF, A), abs_pairing(d, dF, A)));
    t.add("div-adjoint-action", kLemmaTol,
          rel(lhs, -w.dot(act_fn(F, A)), w.dot(A.cwiseAbs() * F.cwiseAbs())));
  }

  const Vec dA = act_den(d, D, A);
  const double act_ref = w.dot(A.cwiseAbs().transpose() * w.cwiseProduct(D)) / w.maxCoeff();
  t.add("integral-action-density", kLemmaTol, rel(w.dot(dA), 0.0, act_ref));

  {
    const Vec two = divA.cwiseProduct(D) + act_fn(D, A);
    const double scale = std::max(dA.cwiseAbs().maxCoeff(), (divA.cwiseProduct(D)).cwiseAbs().maxCoeff());
    t.add("two-actions", kLemmaTol, (dA - two).cwiseAbs().maxCoeff() / scale);
  }

  {
    const Mat DF = D * F.transpose();
    const double p = pairing1(d, DF, A), ref = abs_pairing(d, DF, A);
    t.add("pairing-change", kLemmaTol, rel(pairing0(d, F, dA), p, ref));
    t.add("pairing-change-function", kLemmaTol, rel(pairing0(d, D, act_fn(F, A)), -p, ref));
  }

  {
    const Mat L = rnd.dense(n);
    const Mat P = proj_P(L);
    t.add("projection", kLemmaTol, rel(pairing1(d, L, A), pairing1(d, P, A), abs_pairing(d, L, A) + abs_pairing(d, P, A)));
  }

  // operator-level identities use fields that vanish next to the boundary
  const Mat A0 = rnd.free_field(d), B0 = rnd.free_field(d);
  {
    const Mat Af = flat(d, A0), Bf = flat(d, B0);
    const double via_lambda = pairing1(d, lambda_op(d, flat_adjacent(d, A0)), B0);
    const double via_kites = wedge_star(d, Af, Bf).dot(w);
    const Vec wa = total_vorticity(d, flat_adjacent(d, A0)), wb = total_vorticity(d, flat_adjacent(d, B0));
    const Vec& star = d.geo().vort_area;
    double via_nodes = 0.0, ref = 0.0;
    for (Eigen::Index k = 0; k < wa.size(); ++k) {
      via_nodes += 0.5 * wa[k] * wb[k] * star[k];
      ref += 0.5 * std::abs(wa[k] * wb[k]) * star[k];
    }
    t.add("curl-curl", kOperatorTol,
          std::max(rel(via_kites, via_nodes, ref), rel(via_lambda, via_nodes, ref)));
  }
  t.add("kite", kOperatorTol,
        adjacent_gap(d, lie_deriv_oneform_density(d, A0, D, B0), lie_deriv_oneform_density_kite(d, A0, D, B0)));

  {
    const Mat cov = nabla_AA(d, A0);
    t.add("covariant-derivative", kMemberTol,
          membership_checks(d, cov, kMemberTol).res_V / std::max(cov.cwiseAbs().maxCoeff(), 1e-300));
    Mat Z = rnd.dense(n);
    Z = Mat(Z - Z.transpose());
    const Mat S = sharp(d, Z);
    t.add("sharp-in-V", kMemberTol, membership_checks(d, S, kMemberTol).res_V / std::max(S.cwiseAbs().maxCoeff(), 1e-300));
  }
}

}  // namespace

bool VerifyReport::pass() const {
  return !lemmas.empty() && std::all_of(lemmas.begin(), lemmas.end(), [](const LemmaResult& r) { return r.pass(); });
}

const LemmaResult& VerifyReport::find(const std::string& name) const {
  for (const auto& r : lemmas)
    if (r.name == name) return r;
  throw std::out_of_range("no lemma named " + name);
}

std::pair<int, int> grid_for_cells(int target) {
  if (target < 3) throw DomainError("mesh size target must be at least 3 cells");
  int best_nx = 1, best_ny = 1, best_gap = -1;
  // rows of 2 nx + 1 cells, never above the target; keep the aspect near square
  const int ny0 = std::max(1, static_cast<int>(std::lround(std::sqrt(target / 2.0))));
  for (int ny = std::max(1, ny0 - 1); ny <= ny0 + 1; ++ny)
    for (int nx = 1; (2 * nx + 1) * ny <= target; ++nx) {
      const int gap = target - (2 * nx + 1) * ny;
      if (best_gap < 0 || gap < best_gap) best_gap = gap, best_nx = nx, best_ny = ny;
    }
  return {best_nx, best_ny};
}

std::vector<Mesh> verify_corpus(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> amount(0.05, 0.25);
  std::vector<Mesh> out;
  for (int target : opt.sizes) {
    const auto [nx, ny] = grid_for_cells(target);
    // near-equilateral rows; a unit square can produce right triangles
    const Mesh base = generate_rect_mesh(nx, ny, 1.0, ny * std::sqrt(3.0) / (2.0 * nx));
    out.push_back(base);
    for (int v = 1; v < opt.variants; ++v) {
      for (int attempt = 0;; ++attempt) {
        if (attempt == 20) throw DegenerateError(fmt::format("no valid jittered variant of the {}x{} mesh", nx, ny));
        Mesh m = jitter_mesh(base, amount(rng), rng());
        if (validate(m).ok()) {
          out.push_back(std::move(m));
          break;
        }
      }
    }
  }
  return out;
}

VerifyReport run_verify(const VerifyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  Tally tally;
  Sampler rnd{std::mt19937_64(opt.seed ^ 0x9e3779b97f4a7c15ULL)};
  for (const Mesh& m : verify_corpus(opt)) {
    const Domain d(m);
    check_mesh(d, rnd, opt, tally);
    rep.min_cells = rep.meshes == 0 ? d.n() : std::min(rep.min_cells, d.n());
    rep.max_cells = std::max(rep.max_cells, d.n());
    ++rep.meshes;
  }

  // group maps on a small domain; dense exponentials get slow past a few hundred cells
  const Domain d(generate_rect_mesh(3, 4, 1.0, 1.0));
  for (auto kind : {TauKind::exp, TauKind::cayley}) {
    const GroupMap g{kind};
    const std::string tag = kind == TauKind::exp ? "exp" : "cayley";
    for (int s = 0; s < 10; ++s) {
      const Mat A = rnd.field(d), B = rnd.field(d);
      const Mat xi = 0.1 * A / operator_norm(A);
      const Mat q = tau(g, xi), qi = tau(g, Mat(-xi));
      const Mat id = Mat::Identity(d.n(), d.n());
      tally.add("tau-inverse-" + tag, 1e-12, (q * qi - id).cwiseAbs().maxCoeff());
      const auto props = dtau_property_checks(g, xi, B);
      tally.add("dtau-properties-" + tag, kOperatorTol, std::max(props.conjugation, props.inverse));
      const Mat L = rnd.field(d);
      const Mat fast = dtau_inv_adjoint(d, g, xi, L), full = dtau_inv_adjoint_matrix(d, g, xi, L);
      tally.add("dtau-adjoint-" + tag, 1e-12, (fast - full).cwiseAbs().maxCoeff() / full.cwiseAbs().maxCoeff());
    }
  }

  rep.lemmas = tally.rows();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void print_report(const VerifyReport& r, std::ostream& out) {
  fmt::print(out, "{} meshes, {}..{} cells\n", r.meshes, r.min_cells, r.max_cells);
  for (const auto& l : r.lemmas)
    fmt::print(out, "{:<26} max residual {:9.3e}  tol {:.0e}  {}\n", l.name, l.max_residual, l.tol, l.pass() ? "ok" : "FAIL");
  fmt::print(out, "{} in {:.2f} s\n", r.pass() ? "all identities hold" : "identity failures", r.seconds);
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  const VerifyReport r = run_verify(opt);
  print_report(r, out);
  return r.pass() ? 0 : 1;
}

}  // namespace vnsf
