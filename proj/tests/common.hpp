#pragma once

#include <cmath>
#include <random>

#include "vnsf/fields.hpp"
#include "vnsf/integrator.hpp"
#include "vnsf/mesh.hpp"

namespace testutil {

using namespace vnsf;

inline Mesh rhombus() {
  const double h = std::sqrt(3.0) / 2.0;
  return build_mesh({{0, 0}, {1, 0}, {0.5, h}, {0.5, -h}}, {{0, 1, 2}, {0, 3, 1}});
}

// acute, every interior node of valence 6, 63 cells
inline Mesh box63() { return generate_rect_mesh(4, 7, 1.0, 1.0); }

inline Mesh jittered(int nx, int ny, double amount, std::uint64_t seed) {
  return jitter_mesh(generate_rect_mesh(nx, ny, 1.0, ny * std::sqrt(3.0) / (2.0 * nx)), amount, seed);
}

struct Rng {
  std::mt19937_64 g;
  std::uniform_real_distribution<double> u{-1.0, 1.0};
  explicit Rng(std::uint64_t seed) : g(seed) {}
  double operator()() { return u(g); }
  Vec vec(Eigen::Index n) {
    Vec v(n);
    for (auto& x : v) x = u(g);
    return v;
  }
  Vec positive(Eigen::Index n, double spread = 0.3) {
    Vec v(n);
    for (auto& x : v) x = 1.0 + spread * u(g);
    return v;
  }
  Mat dense(Eigen::Index n) {
    Mat m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m(i, j) = u(g);
    return m;
  }
  Mat field(const Domain& d) { return assemble_field(d, vec(d.pairs().size())); }
  Mat free_field(const Domain& d) { return assemble_free_field(d, vec(d.free_pairs().size())); }
};

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
