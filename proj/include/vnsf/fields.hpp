#pragma once

#include <functional>
#include <vector>

#include "vnsf/mesh.hpp"

namespace vnsf {

// Discrete functions and densities are Vec of length N (N+1 when extended with the
// environment slot last). Vector fields and one-forms are dense square Mat.

// Cell areas, with Omega_env appended when size == N+1.
Vec cell_weights(const Domain& d, Eigen::Index size);

// Vector field in S and V from one flux per adjacent pair: A_ij = f/(2 Omega_i), A_ji = -f/(2 Omega_j).
Mat assemble_field(const Domain& d, const Vec& pair_flux);
// Same, with the environment row/column filled from one flux per boundary edge.
Mat assemble_extended(const Domain& d, const Vec& pair_flux, const Vec& boundary_flux);
Vec pair_fluxes(const Domain& d, const Mat& A);

double pairing0(const Domain& d, const Vec& F, const Vec& G);
double pairing1(const Domain& d, const Mat& L, const Mat& B);

Mat d0(const Vec& F);
Vec act_fn(const Vec& F, const Mat& A);
Vec act_den(const Domain& d, const Vec& D, const Mat& A);
Vec group_act_den(const Domain& d, const Vec& D, const Mat& q);
Vec divergence(const Mat& A);
// A^bd_i = -2 A_i,env for an extended field (length N)
Vec boundary_divergence(const Mat& A);

// Adjacent entries only.
Mat flat_adjacent(const Domain& d, const Mat& A);
// Adjacent and two-away entries. Throws AmbiguityError when defining triplets disagree.
Mat flat(const Domain& d, const Mat& A);
Mat sharp(const Domain& d, const Mat& Z);
// One value per mesh node; boundary nodes use the open fan.
Vec total_vorticity(const Domain& d, const Mat& Z);

Vec laplace_beltrami(const Domain& d, const Vec& F, bool extended = false, double env_value = 0.0);
Mat lambda_op(const Domain& d, const Mat& Z);
Mat hodge_laplacian(const Domain& d, const Mat& A);
Vec wedge_star(const Domain& d, const Mat& Za, const Mat& Zb);
// Z_ij + Z_jk + Z_ki for each triplet, in Domain::triplets() order
Vec triplet_circulation(const Domain& d, const Mat& Z);

Mat proj_P(const Mat& L);
Mat proj_Q(const Mat& L);

Mat lie_deriv_oneform(const Mat& A, const Mat& F);
Mat lie_deriv_oneform_cartan(const Mat& A, const Mat& F);
Mat lie_deriv_oneform_density(const Domain& d, const Mat& A, const Vec& D, const Mat& B);
// Kite formula, adjacent entries only. A must be tangential and in V.
Mat lie_deriv_oneform_density_kite(const Domain& d, const Mat& A, const Vec& D, const Mat& B);

using VelocityFn = std::function<Vec2(const Vec2&)>;
Mat init_from_velocity(const Domain& d, const VelocityFn& u, bool no_slip = false);
std::vector<Vec2> reconstruct_velocity(const Domain& d, const Mat& A);
std::vector<Vec2> reconstruct_velocity_at(const Domain& d, const Mat& A, const std::vector<Vec2>& points);

}  // namespace vnsf
