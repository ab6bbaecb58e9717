#pragma once

#include "vnsf/mesh.hpp"

namespace vnsf {

struct Membership {
  bool d = true, S = true, V = true, d0 = true;
  // residuals relative to the largest entry magnitude
  double res_d = 0, res_S = 0, res_V = 0, res_d0 = 0;
};

// Accepts N x N (tangential) or (N+1) x (N+1) (extended) matrices.
Membership membership_checks(const Domain& d, const Mat& A, double tol = 1e-12);

Mat bracket(const Mat& A, const Mat& B);
Mat ad_star(const Domain& d, const Mat& A, const Mat& L);
// -Omega^-1 [xi^T, Omega L], the pairing adjoint of B -> [-xi, B]
Mat ad_dagger(const Domain& d, const Mat& xi, const Mat& L);

enum class TauKind { exp, cayley };

struct GroupMap {
  TauKind kind = TauKind::exp;
  double tol = 1e-14;
  int max_terms = 24;
};

Mat tau(const GroupMap& g, const Mat& xi, double h = 1.0);
// left-trivialized tangent and its inverse
Mat dtau(const GroupMap& g, const Mat& xi, const Mat& delta);
Mat dtau_inv(const GroupMap& g, const Mat& xi, const Mat& eta);
// pairing1 adjoint of eta -> dtau_inv(xi, eta); series form
Mat dtau_inv_adjoint(const Domain& d, const GroupMap& g, const Mat& xi, const Mat& L);
// same map built column by column on the entry basis and transposed in the pairing
Mat dtau_inv_adjoint_matrix(const Domain& d, const GroupMap& g, const Mat& xi, const Mat& L);

struct DtauResiduals {
  double conjugation = 0;  // dtau_{-xi}(delta) vs Ad_{tau(xi)} dtau_xi(delta)
  double inverse = 0;      // dtau^-1_{-xi}(Ad_{tau(xi)} delta) vs dtau^-1_xi(delta)
};
DtauResiduals dtau_property_checks(const GroupMap& g, const Mat& xi, const Mat& delta);

double operator_norm(const Mat& A);

}  // namespace vnsf
