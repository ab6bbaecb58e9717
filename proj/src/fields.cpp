#include "vnsf/fields.hpp"

#include <cmath>
#include <map>

#include <fmt/format.h>

#include "vnsf/errors.hpp"
#include "vnsf/kernels.hpp"

namespace vnsf {

namespace {

void need_square(const Mat& A, const char* what) {
  if (A.rows() != A.cols()) throw SizeError(fmt::format("{}: matrix is not square", what));
}

void need_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) throw SizeError(fmt::format("{}: size {} does not match {}", what, got, want));
}

}  // namespace

Vec cell_weights(const Domain& d, Eigen::Index size) {
  const int n = d.n();
  if (size == n) return d.area();
  if (size == n + 1) {
    Vec w(n + 1);
    w.head(n) = d.area();
    w[n] = d.geo().area_env;
    return w;
  }
  throw SizeError(fmt::format("size {} is neither N={} nor N+1", size, n));
}

Mat assemble_field(const Domain& d, const Vec& pair_flux) {
  need_size(pair_flux.size(), static_cast<Eigen::Index>(d.pairs().size()), "assemble_field");
  const Vec& w = d.area();
  Mat A = Mat::Zero(d.n(), d.n());
  for (std::size_t p = 0; p < d.pairs().size(); ++p) {
    const auto& e = d.pairs()[p];
    A(e.i, e.j) = pair_flux[p] / (2.0 * w[e.i]);
    A(e.j, e.i) = -pair_flux[p] / (2.0 * w[e.j]);
  }
  A.diagonal() = -A.rowwise().sum();
  return A;
}

Mat assemble_extended(const Domain& d, const Vec& pair_flux, const Vec& boundary_flux) {
  need_size(boundary_flux.size(), static_cast<Eigen::Index>(d.boundary_edges().size()), "assemble_extended");
  const int n = d.n();
  Mat A = Mat::Zero(n + 1, n + 1);
  A.topLeftCorner(n, n) = assemble_field(d, pair_flux);
  A.topLeftCorner(n, n).diagonal().setZero();
  const Vec& w = d.area();
  const double wenv = d.geo().area_env;
  for (std::size_t b = 0; b < d.boundary_edges().size(); ++b) {
    int i = d.boundary_edges()[b].first;
    A(i, n) += boundary_flux[b] / (2.0 * w[i]);
    A(n, i) -= boundary_flux[b] / (2.0 * wenv);
  }
  A.diagonal() = -A.rowwise().sum();
  return A;
}

Vec pair_fluxes(const Domain& d, const Mat& A) {
  Vec f(d.pairs().size());
  for (std::size_t p = 0; p < d.pairs().size(); ++p) f[p] = 2.0 * d.area()[d.pairs()[p].i] * A(d.pairs()[p].i, d.pairs()[p].j);
  return f;
}

double pairing0(const Domain& d, const Vec& F, const Vec& G) {
  const int n = d.n();
  if (F.size() < n || G.size() < n || F.size() > n + 1 || G.size() > n + 1)
    throw SizeError("pairing0: length mismatch");
  return kernels::weighted_dot(d.area().data(), F.data(), G.data(), n);
}

double pairing1(const Domain& d, const Mat& L, const Mat& B) {
  need_square(L, "pairing1");
  if (L.rows() != B.rows() || L.cols() != B.cols()) throw SizeError("pairing1: size mismatch");
  const Vec w = cell_weights(d, L.rows());
  double s = 0.0;
  for (Eigen::Index j = 0; j < L.cols(); ++j) s += kernels::weighted_dot(w.data(), L.col(j).data(), B.col(j).data(), L.rows());
  return s;
}

Mat d0(const Vec& F) { return Vec::Ones(F.size()) * F.transpose() - F * Vec::Ones(F.size()).transpose(); }

Vec act_fn(const Vec& F, const Mat& A) {
  need_size(A.cols(), F.size(), "act_fn");
  return -(A * F);
}

Vec act_den(const Domain& d, const Vec& D, const Mat& A) {
  need_size(A.rows(), D.size(), "act_den");
  const Vec w = cell_weights(d, D.size());
  return (A.transpose() * w.cwiseProduct(D)).cwiseQuotient(w);
}

Vec group_act_den(const Domain& d, const Vec& D, const Mat& q) { return act_den(d, D, q); }

Vec divergence(const Mat& A) { return 2.0 * A.diagonal(); }

Vec boundary_divergence(const Mat& A) {
  const Eigen::Index n = A.rows() - 1;
  return -2.0 * A.col(n).head(n);
}

Mat flat_adjacent(const Domain& d, const Mat& A) {
  need_size(A.rows(), d.n(), "flat");
  Mat Z = Mat::Zero(d.n(), d.n());
  for (const auto& e : d.pairs()) {
    double v = d.flat_coef(e.i, e.ki) * A(e.i, e.j);
    Z(e.i, e.j) = v;
    Z(e.j, e.i) = -v;
  }
  return Z;
}

Vec total_vorticity(const Domain& d, const Mat& Z) {
  const Mesh& m = d.mesh();
  Vec w = Vec::Zero(m.nodes.size());
  for (int i = 0; i < m.size(); ++i)
    for (int a = 0; a < 3; ++a) {
      int j = d.ccw_of(i, a);
      if (j >= 0) w[m.cells[i][a]] += Z(i, j);
    }
  return w;
}

Mat flat(const Domain& d, const Mat& A) {
  Mat Z = flat_adjacent(d, A);
  const Vec w = total_vorticity(d, Z);
  const double scale = Z.cwiseAbs().maxCoeff();
  std::map<std::pair<int, int>, double> fixed;
  for (const auto& t : d.triplets()) {
    const int i = t.cell, j = t.ccw, k = t.cw;
    if (d.mesh().local_edge(j, k) >= 0) continue;  // valence-3 node: already an adjacent entry
    const double v = d.kite_fraction(t) * w[t.node] - Z(i, j) - Z(k, i);
    const auto key = std::make_pair(std::min(j, k), std::max(j, k));
    const double oriented = j < k ? v : -v;
    auto it = fixed.find(key);
    if (it == fixed.end()) {
      fixed.emplace(key, oriented);
      Z(j, k) = v;
      Z(k, j) = -v;
    } else if (std::abs(it->second - oriented) > 1e-9 * std::max({std::abs(oriented), std::abs(it->second), scale})) {
      throw AmbiguityError(fmt::format("two-away entry ({},{}) has disagreeing definitions {:.6g} and {:.6g}", j, k,
                                       it->second, oriented));
    }
  }
  return Z;
}

Mat sharp(const Domain& d, const Mat& Z) {
  need_size(Z.rows(), d.n(), "sharp");
  Mat A = Mat::Zero(d.n(), d.n());
  for (const auto& e : d.pairs()) {
    A(e.i, e.j) = d.sharp_coef(e.i, e.ki) * Z(e.i, e.j);
    A(e.j, e.i) = d.sharp_coef(e.j, e.kj) * Z(e.j, e.i);
  }
  A.diagonal() = -A.rowwise().sum();
  return A;
}

Vec laplace_beltrami(const Domain& d, const Vec& F, bool extended, double env_value) {
  const Mesh& m = d.mesh();
  if (F.size() != d.n() && F.size() != d.n() + 1) throw SizeError("laplace_beltrami: length mismatch");
  Vec out = Vec::Zero(d.n());
  for (int i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      int j = m.nbr[i][k];
      if (j >= 0) s += (F[i] - F[j]) * d.conductance(i, k);
      else if (extended) s += (F[i] - env_value) * d.conductance(i, k);
    }
    out[i] = s / d.area()[i];
  }
  return out;
}

Mat lambda_op(const Domain& d, const Mat& Z) {
  const Vec w = total_vorticity(d, Z);
  const Vec& star = d.geo().vort_area;
  Mat L = Mat::Zero(d.n(), d.n());
  for (const auto& e : d.pairs()) {
    const int plus = d.node_plus(e.i, e.ki), minus = d.node_minus(e.i, e.ki);
    const double v = 0.5 * (w[plus] * star[plus] - w[minus] * star[minus]) / d.conductance(e.i, e.ki);
    L(e.i, e.j) = v;
    L(e.j, e.i) = -v;
  }
  return L;
}

Mat hodge_laplacian(const Domain& d, const Mat& A) {
  const Vec div = divergence(A);
  Mat out = -lambda_op(d, flat_adjacent(d, A));
  for (const auto& e : d.pairs()) {
    out(e.i, e.j) += div[e.j] - div[e.i];
    out(e.j, e.i) += div[e.i] - div[e.j];
  }
  return out;
}

Vec triplet_circulation(const Domain& d, const Mat& Z) {
  Vec c(d.triplets().size());
  for (std::size_t t = 0; t < d.triplets().size(); ++t) {
    const auto& tr = d.triplets()[t];
    c[t] = Z(tr.cell, tr.ccw) + Z(tr.ccw, tr.cw) + Z(tr.cw, tr.cell);
  }
  return c;
}

Vec wedge_star(const Domain& d, const Mat& Za, const Mat& Zb) {
  const Vec ca = triplet_circulation(d, Za), cb = triplet_circulation(d, Zb);
  Vec out = Vec::Zero(d.n());
  // each unordered neighbour pair appears twice in the ordered sum
  for (std::size_t t = 0; t < d.triplets().size(); ++t) {
    const auto& tr = d.triplets()[t];
    out[tr.cell] += 2.0 * d.wedge_weight(tr) * (ca[t] * cb[t]);
  }
  return out;
}

Mat proj_Q(const Mat& L) {
  need_square(L, "proj_Q");
  return L - L.diagonal() * Vec::Ones(L.cols()).transpose();
}

Mat proj_P(const Mat& L) {
  const Mat q = proj_Q(L);
  return 0.5 * (q - q.transpose());
}

Mat lie_deriv_oneform(const Mat& A, const Mat& F) {
  if (A.rows() != F.rows() || A.cols() != F.cols()) throw SizeError("lie_deriv_oneform: size mismatch");
  return -(A * F + F * A.transpose());
}

Mat lie_deriv_oneform_cartan(const Mat& A, const Mat& F) {
  if (A.rows() != F.rows() || A.cols() != F.cols()) throw SizeError("lie_deriv_oneform_cartan: size mismatch");
  const Eigen::Index n = A.rows();
  const Vec contracted = (F * A.transpose()).diagonal();  // i_A F
  Mat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        s -= (F(i, k) + F(k, j) + F(j, i)) * A(i, k);
        s += (F(j, k) + F(k, i) + F(i, j)) * A(j, k);
      }
      out(i, j) = s - contracted[j] + contracted[i];
    }
  return out;
}

Mat lie_deriv_oneform_density(const Domain& d, const Mat& A, const Vec& D, const Mat& B) {
  need_size(D.size(), A.rows(), "lie_deriv_oneform_density");
  const Vec& w = d.area();
  const Mat L = D.asDiagonal() * flat(d, B);
  const Mat WL = w.asDiagonal() * L;
  const Mat bracket = A.transpose() * WL - WL * A.transpose();
  return proj_P(w.cwiseInverse().asDiagonal() * bracket);
}

Mat lie_deriv_oneform_density_kite(const Domain& d, const Mat& A, const Vec& D, const Mat& B) {
  const Mat Bf = flat_adjacent(d, B);
  const Vec w = total_vorticity(d, Bf);
  const Vec& star = d.geo().vort_area;
  const Vec DA = act_den(d, D, A);
  const int n = d.n();
  Vec kin = Vec::Zero(n);  // sum_k A_ik B_flat_ik
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) kin[i] += A(i, k) * Bf(i, k);

  auto frac = [&](int cell, int node) {
    return star[node] > 0 ? d.geo().kite[cell][d.vertex_of(cell, node)] / star[node] : 0.0;
  };
  auto side = [&](int cell, int other, int nb, int node) {
    if (nb < 0) return 0.0;
    return frac(cell, node) * 0.5 * (D[other] + D[nb]) * A(cell, nb);
  };

  Mat out = Mat::Zero(n, n);
  auto entry = [&](int i, int j, int k) {
    const int ep = d.node_plus(i, k), em = d.node_minus(i, k);
    const int vp_i = d.vertex_of(i, ep), vm_i = d.vertex_of(i, em);
    const int vp_j = d.vertex_of(j, ep), vm_j = d.vertex_of(j, em);
    const int ip = d.cw_of(i, vp_i), jp = d.ccw_of(j, vp_j);
    const int im = d.ccw_of(i, vm_i), jm = d.cw_of(j, vm_j);
    double v = w[ep] * (side(i, j, ip, ep) + side(j, i, jp, ep)) - w[em] * (side(i, j, im, em) + side(j, i, jm, em));
    v += 0.5 * (D[i] + D[j]) * (kin[i] - kin[j]) + 0.5 * (DA[i] + DA[j]) * Bf(i, j);
    return v;
  };
  for (const auto& e : d.pairs()) {
    out(e.i, e.j) = entry(e.i, e.j, e.ki);
    out(e.j, e.i) = entry(e.j, e.i, e.kj);
  }
  return out;
}

Mat init_from_velocity(const Domain& d, const VelocityFn& u, bool no_slip) {
  const Mesh& m = d.mesh();
  Vec flux(d.pairs().size());
  for (std::size_t p = 0; p < d.pairs().size(); ++p) {
    const auto& e = d.pairs()[p];
    const Vec2& a = m.nodes[m.cells[e.i][(e.ki + 1) % 3]];
    const Vec2& b = m.nodes[m.cells[e.i][(e.ki + 2) % 3]];
    const Vec2 t = b - a;
    const Vec2 outward(t.y(), -t.x());  // |h| times the unit normal
    // A_ij = -|h| u.n / (2 Omega_i), i.e. flux parameter -|h| u.n
    flux[p] = -u(0.5 * (a + b)).dot(outward);
    if (no_slip && (!d.free_cell(e.i) || !d.free_cell(e.j))) flux[p] = 0.0;
  }
  return assemble_field(d, flux);
}

std::vector<Vec2> reconstruct_velocity_at(const Domain& d, const Mat& A, const std::vector<Vec2>& points) {
  const Mesh& m = d.mesh();
  std::vector<Vec2> out(m.size(), Vec2::Zero());
  for (int i = 0; i < m.size(); ++i) {
    const double omega = d.area()[i];
    for (int k = 0; k < 3; ++k) {
      int j = m.nbr[i][k];
      if (j < 0) continue;
      const double len = d.geo().edge_len[i][k];
      const double normal_velocity = -2.0 * omega * A(i, j) / len;
      out[i] += normal_velocity * len * (points[i] - m.nodes[m.cells[i][k]]) / (2.0 * omega);
    }
  }
  return out;
}

std::vector<Vec2> reconstruct_velocity(const Domain& d, const Mat& A) {
  return reconstruct_velocity_at(d, A, d.geo().circumcenter);
}

}  // namespace vnsf
