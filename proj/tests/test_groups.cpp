#include <doctest.h>

#include "common.hpp"
#include "vnsf/errors.hpp"
#include "vnsf/groups.hpp"

using namespace vnsf;
using testutil::max_abs;
using testutil::Rng;

TEST_SUITE("groups") {

TEST_CASE("membership flags") {
  const Domain d(testutil::box63());
  const int n = d.n();
  const auto zero = membership_checks(d, Mat::Zero(n, n));
  CHECK((zero.d && zero.S && zero.V && zero.d0));
  CHECK(zero.res_V == 0.0);

  Rng r(1);
  const Mat A = r.free_field(d);
  const auto m = membership_checks(d, A);
  CHECK((m.d && m.S && m.V && m.d0));

  // incompressible: A^T Omega + Omega A = 0 with zero row sums, from a stream function
  const Vec& w = d.area();
  Vec flux(d.pairs().size());
  const Mesh& mesh = d.mesh();
  Vec node = r.vec(mesh.nodes.size());
  for (auto [i, k] : d.boundary_edges()) node[mesh.cells[i][(k + 1) % 3]] = node[mesh.cells[i][(k + 2) % 3]] = 0.0;
  for (std::size_t p = 0; p < d.pairs().size(); ++p) {
    const auto& e = d.pairs()[p];
    flux[p] = node[d.node_plus(e.i, e.ki)] - node[d.node_minus(e.i, e.ki)];
  }
  const Mat inc = assemble_field(d, flux);
  CHECK(max_abs(inc.transpose() * w.asDiagonal() + w.asDiagonal() * inc) < 1e-13);
  CHECK(membership_checks(d, inc).V);
  CHECK(divergence(inc).cwiseAbs().maxCoeff() < 1e-13);

  Mat bad = A;
  bad(0, 0) += 1.0;
  CHECK_FALSE(membership_checks(d, bad).d);
  Mat far = Mat::Zero(n, n);
  far(0, n - 1) = 1.0;
  far(0, 0) = -1.0;
  CHECK_FALSE(membership_checks(d, far).S);
  CHECK_FALSE(membership_checks(d, r.field(d)).d0);
}

TEST_CASE("bracket and coadjoint") {
  const Domain d(testutil::jittered(4, 5, 0.2, 2));
  Rng r(2);
  const Mat A = r.field(d), B = r.field(d), L = r.dense(d.n());
  CHECK(max_abs(bracket(A, A)) == 0.0);
  CHECK(bracket(A, B).rowwise().sum().cwiseAbs().maxCoeff() < 1e-13 * max_abs(bracket(A, B)));
  const Mat ad = ad_star(d, A, L);
  CHECK(ad.diagonal().cwiseAbs().maxCoeff() == 0.0);
  // the diagonal is dropped, so pair with zero-row-sum B whose pairing sees only off-diagonals through Q
  CHECK(pairing1(d, ad, B) == doctest::Approx(pairing1(d, L, bracket(A, B))).epsilon(1e-12));
  CHECK_THROWS_AS(bracket(A, Mat::Zero(2, 2)), SizeError);
}

TEST_CASE("group difference maps") {
  const Domain d(testutil::jittered(3, 4, 0.15, 3));
  const int n = d.n();
  const Mat I = Mat::Identity(n, n);
  Rng r(3);
  for (auto kind : {TauKind::exp, TauKind::cayley}) {
    CAPTURE(static_cast<int>(kind));
    const GroupMap g{kind};
    CHECK(tau(g, Mat::Zero(n, n)) == I);
    const Mat A = r.field(d);
    const Mat xi = 0.5 * A / operator_norm(A);
    const Mat q = tau(g, xi, 0.01);
    CHECK(max_abs(q * tau(g, xi, -0.01) - I) < 1e-12);
    CHECK((q * Vec::Ones(n) - Vec::Ones(n)).cwiseAbs().maxCoeff() < 1e-12);

    const Mat eta = r.field(d);
    CHECK(max_abs(dtau_inv(g, Mat::Zero(n, n), eta) - eta) < 1e-15);

    // left-trivialized derivative of tau by central differences
    const double eps = 1e-5;
    const Mat fd = tau(g, xi).inverse() * (tau(g, Mat(xi + eps * eta)) - tau(g, Mat(xi - eps * eta))) / (2 * eps);
    CHECK(max_abs(dtau(g, xi, eta) - fd) < 1e-6);
    CHECK(max_abs(dtau_inv(g, xi, fd) - eta) < 1e-6);
    CHECK(max_abs(dtau_inv(g, xi, dtau(g, xi, eta)) - eta) < 1e-12);

    const Mat L = r.field(d), B = r.field(d);
    CHECK(pairing1(d, dtau_inv_adjoint(d, g, xi, L), B) ==
          doctest::Approx(pairing1(d, L, dtau_inv(g, xi, B))).epsilon(1e-12));
    CHECK(max_abs(dtau_inv_adjoint(d, g, xi, L) - dtau_inv_adjoint_matrix(d, g, xi, L)) < 1e-12 * max_abs(L));

    const auto zero = dtau_property_checks(g, Mat::Zero(n, n), eta);
    CHECK(zero.conjugation < 1e-15);
    CHECK(zero.inverse < 1e-15);
    const Mat small = 0.1 * xi / operator_norm(xi);
    const auto res = dtau_property_checks(g, small, eta);
    CHECK(res.conjugation < 1e-10);
    CHECK(res.inverse < 1e-10);
  }
}

TEST_CASE("series radius and cayley guard") {
  const Domain d(testutil::box63());
  Rng r(4);
  const Mat A = r.field(d);
  const Mat big = 2.0 * A / operator_norm(A);
  CHECK_THROWS_AS(dtau_inv(GroupMap{}, big, A), ConvergenceError);
  // I - xi/2 singular: xi = 2 P with P a projector that keeps row sums at zero
  Mat P = Mat::Zero(d.n(), d.n());
  P(0, 0) = 1.0;
  P(0, 1) = -1.0;
  CHECK_THROWS_AS(tau(GroupMap{TauKind::cayley}, Mat(2.0 * P)), DomainError);
}

}
