#include "vnsf/groups.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"

namespace vnsf {

namespace {

// B_n / n! for n = 0..24 (B_1 = -1/2, odd n >= 3 vanish)
constexpr std::array<double, 25> kBernoulliOverFactorial = {
    1.0,
    -0.5,
    1.0 / 12.0,
    0.0,
    -1.0 / 720.0,
    0.0,
    1.0 / 30240.0,
    0.0,
    -1.0 / 1209600.0,
    0.0,
    1.0 / 47900160.0,
    0.0,
    -691.0 / 1307674368000.0,
    0.0,
    1.0 / 74724249600.0,
    0.0,
    -3617.0 / 10670622842880000.0,
    0.0,
    43867.0 / 5109094217170944000.0,
    0.0,
    -174611.0 / 802857662698291200000.0,
    0.0,
    77683.0 / 14101100039391805440000.0,
    0.0,
    -236364091.0 / 1693824136731743669452800000.0,
};

Mat ad_neg(const Mat& xi, const Mat& x) { return x * xi - xi * x; }

void check_radius(const GroupMap& g, const Mat& xi) {
  if (operator_norm(xi) >= 1.0)
    throw ConvergenceError(fmt::format("dtau series: |xi| = {:.3g} outside the radius", operator_norm(xi)));
  if (g.max_terms < 1 || g.max_terms > 24) throw DomainError("dtau series: max_terms must be in 1..24");
}

template <class Step>
Mat bernoulli_series(const GroupMap& g, const Mat& x0, Step next) {
  Mat sum = x0;
  Mat term = x0;
  const double scale = std::max(x0.cwiseAbs().maxCoeff(), 1e-300);
  for (int n = 1; n <= g.max_terms; ++n) {
    term = next(term);
    const double c = kBernoulliOverFactorial[n];
    if (c == 0.0) continue;
    const Mat add = c * term;
    sum += add;
    if (add.cwiseAbs().maxCoeff() < g.tol * scale) return sum;
  }
  throw ConvergenceError(fmt::format("dtau series did not converge within {} terms", g.max_terms));
}

}  // namespace

double operator_norm(const Mat& A) { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

Membership membership_checks(const Domain& d, const Mat& A, double tol) {
  if (A.rows() != A.cols()) throw SizeError("membership_checks: matrix is not square");
  const int n = d.n();
  const bool ext = A.rows() == n + 1;
  if (!ext && A.rows() != n) throw SizeError("membership_checks: size is neither N nor N+1");
  const Vec w = cell_weights(d, A.rows());
  const double scale = A.cwiseAbs().maxCoeff();
  Membership m;
  if (scale == 0.0) return m;

  m.res_d = A.rowwise().sum().cwiseAbs().maxCoeff() / scale;
  const Mesh& mesh = d.mesh();
  auto adjacent = [&](int i, int j) {
    if (i == j) return true;
    if (i == n) return mesh.boundary_cell(j);
    if (j == n) return mesh.boundary_cell(i);
    return mesh.local_edge(i, j) >= 0;
  };
  auto forbidden = [&](int i) { return i == n || !d.free_cell(i); };
  double vs = 0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      const double a = std::abs(A(i, j));
      if (!adjacent(i, j)) m.res_S = std::max(m.res_S, a / scale);
      if (i != j) {
        vs = std::max(vs, std::abs(w[i] * A(i, j)));
        m.res_V = std::max(m.res_V, std::abs(w[i] * A(i, j) + w[j] * A(j, i)));
      }
      if (forbidden(i) || forbidden(j)) m.res_d0 = std::max(m.res_d0, a / scale);
    }
  m.res_V = vs > 0 ? m.res_V / vs : m.res_V;
  m.d = m.res_d <= tol;
  m.S = m.res_S <= tol;
  m.V = m.res_V <= tol;
  m.d0 = m.res_d0 <= tol;
  return m;
}

Mat bracket(const Mat& A, const Mat& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw SizeError("bracket: size mismatch");
  return A * B - B * A;
}

Mat ad_dagger(const Domain& d, const Mat& xi, const Mat& L) {
  const Vec w = cell_weights(d, L.rows());
  const Mat WL = w.asDiagonal() * L;
  return -(w.cwiseInverse().asDiagonal() * (xi.transpose() * WL - WL * xi.transpose()));
}

Mat ad_star(const Domain& d, const Mat& A, const Mat& L) {
  if (A.rows() != L.rows()) throw SizeError("ad_star: size mismatch");
  return proj_Q(-ad_dagger(d, A, L));
}

Mat tau(const GroupMap& g, const Mat& xi, double h) {
  const Eigen::Index n = xi.rows();
  const Mat I = Mat::Identity(n, n);
  if (xi.isZero(0.0) || h == 0.0) return I;
  const Mat x = h * xi;
  if (g.kind == TauKind::exp) return x.exp();
  Eigen::FullPivLU<Mat> lu(I - 0.5 * x);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw DomainError("cayley map: I - h xi / 2 is singular");
  return lu.solve(I + 0.5 * x);
}

Mat dtau(const GroupMap& g, const Mat& xi, const Mat& delta) {
  const Eigen::Index n = xi.rows();
  const Mat I = Mat::Identity(n, n);
  if (g.kind == TauKind::cayley) {
    const Mat P = (I + 0.5 * xi).inverse(), Q = (I - 0.5 * xi).inverse();
    return P * delta * Q;
  }
  check_radius(g, xi);
  // sum_n ad_{-xi}^n delta / (n+1)!
  Mat sum = delta, term = delta;
  double fact = 1.0;
  const double scale = std::max(delta.cwiseAbs().maxCoeff(), 1e-300);
  for (int k = 1; k <= 30; ++k) {
    term = ad_neg(xi, term);
    fact *= (k + 1);
    const Mat add = term / fact;
    sum += add;
    if (add.cwiseAbs().maxCoeff() < g.tol * scale) break;
  }
  return sum;
}

Mat dtau_inv(const GroupMap& g, const Mat& xi, const Mat& eta) {
  if (xi.rows() != eta.rows()) throw SizeError("dtau_inv: size mismatch");
  const Eigen::Index n = xi.rows();
  if (g.kind == TauKind::cayley) {
    const Mat I = Mat::Identity(n, n);
    return (I + 0.5 * xi) * eta * (I - 0.5 * xi);
  }
  check_radius(g, xi);
  return bernoulli_series(g, eta, [&](const Mat& x) { return ad_neg(xi, x); });
}

Mat dtau_inv_adjoint(const Domain& d, const GroupMap& g, const Mat& xi, const Mat& L) {
  if (xi.rows() != L.rows()) throw SizeError("dtau_inv_adjoint: size mismatch");
  if (g.kind == TauKind::cayley) {
    const Eigen::Index n = xi.rows();
    const Mat I = Mat::Identity(n, n);
    const Vec w = cell_weights(d, n);
    const Mat P = I + 0.5 * xi, Q = I - 0.5 * xi;
    return w.cwiseInverse().asDiagonal() * (P.transpose() * w.asDiagonal() * L * Q.transpose());
  }
  check_radius(g, xi);
  return bernoulli_series(g, L, [&](const Mat& x) { return ad_dagger(d, xi, x); });
}

Mat dtau_inv_adjoint_matrix(const Domain& d, const GroupMap& g, const Mat& xi, const Mat& L) {
  const Eigen::Index n = xi.rows();
  const Vec w = cell_weights(d, n);
  Mat out(n, n);
  Mat basis = Mat::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      basis(a, b) = 1.0;
      // <adj L, E_ab> = w_a adj(L)_ab = <L, dtau_inv(E_ab)>
      out(a, b) = pairing1(d, L, dtau_inv(g, xi, basis)) / w[a];
      basis(a, b) = 0.0;
    }
  return out;
}

DtauResiduals dtau_property_checks(const GroupMap& g, const Mat& xi, const Mat& delta) {
  const Mat q = tau(g, xi), qinv = tau(g, -xi);
  auto Ad = [&](const Mat& x) { return Mat(q * x * qinv); };
  const double scale = std::max(delta.cwiseAbs().maxCoeff(), 1e-300);
  DtauResiduals r;
  r.conjugation = (dtau(g, -xi, delta) - Ad(dtau(g, xi, delta))).cwiseAbs().maxCoeff() / scale;
  r.inverse = (dtau_inv(g, -xi, Ad(delta)) - dtau_inv(g, xi, delta)).cwiseAbs().maxCoeff() / scale;
  return r;
}

}  // namespace vnsf
