#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "vnsf/errors.hpp"
#include "vnsf/mesh.hpp"

namespace vnsf {

namespace {

void check_box(int nx, int ny, double lx, double ly) {
  if (nx < 1 || ny < 1 || !(lx > 0) || !(ly > 0)) throw DomainError("generator needs nx, ny >= 1 and lx, ly > 0");
}

}  // namespace

Mesh generate_rect_mesh(int nx, int ny, double lx, double ly) {
  check_box(nx, ny, lx, ly);
  const double b = lx / nx, dy = ly / ny;
  std::vector<Vec2> nodes;
  std::vector<std::vector<int>> rows(ny + 1);
  for (int r = 0; r <= ny; ++r) {
    const double y = r * dy;
    auto push = [&](double x) {
      rows[r].push_back(static_cast<int>(nodes.size()));
      nodes.emplace_back(x, y);
    };
    if (r % 2 == 0) {
      for (int k = 0; k <= nx; ++k) push(k == nx ? lx : k * b);
    } else {
      push(0.0);
      for (int k = 0; k < nx; ++k) push((k + 0.5) * b);
      push(lx);
    }
  }

  std::vector<std::array<int, 3>> cells;
  for (int r = 0; r < ny; ++r) {
    const auto& lo = rows[r];
    const auto& up = rows[r + 1];
    std::size_t ib = 0, it = 0;
    while (ib + 1 < lo.size() || it + 1 < up.size()) {
      bool bottom;
      if (ib + 1 == lo.size()) bottom = false;
      else if (it + 1 == up.size()) bottom = true;
      else  // shorter new diagonal
        bottom = (nodes[lo[ib + 1]] - nodes[up[it]]).norm() < (nodes[up[it + 1]] - nodes[lo[ib]]).norm();
      if (bottom) {
        cells.push_back({lo[ib], lo[ib + 1], up[it]});
        ++ib;
      } else {
        cells.push_back({lo[ib], up[it + 1], up[it]});
        ++it;
      }
    }
  }
  return build_mesh(std::move(nodes), std::move(cells));
}

Mesh generate_crisscross_mesh(int nx, int ny, double lx, double ly) {
  check_box(nx, ny, lx, ly);
  const double dx = lx / nx, dy = ly / ny;
  std::vector<Vec2> nodes;
  auto corner = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) nodes.emplace_back(i * dx, j * dy);
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int c = static_cast<int>(nodes.size());
      nodes.emplace_back((i + 0.5) * dx, (j + 0.5) * dy);
      int a = corner(i, j), b = corner(i + 1, j), d = corner(i + 1, j + 1), e = corner(i, j + 1);
      cells.push_back({a, b, c});
      cells.push_back({b, d, c});
      cells.push_back({d, e, c});
      cells.push_back({e, a, c});
    }
  return build_mesh(std::move(nodes), std::move(cells));
}

Mesh jitter_mesh(const Mesh& m, double amount, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t np = m.nodes.size();
  std::vector<char> inner(np, 1);
  std::vector<double> reach(np, std::numeric_limits<double>::infinity());
  for (int i = 0; i < m.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      int p = m.cells[i][(k + 1) % 3], q = m.cells[i][(k + 2) % 3];
      if (m.nbr[i][k] < 0) inner[p] = inner[q] = 0;
      double len = (m.nodes[p] - m.nodes[q]).norm();
      reach[p] = std::min(reach[p], len);
      reach[q] = std::min(reach[q], len);
    }
  std::vector<Vec2> offsets(np, Vec2::Zero());
  for (std::size_t v = 0; v < np; ++v)
    if (inner[v]) offsets[v] = Vec2(unit(rng), unit(rng)) * reach[v];

  for (int attempt = 0; attempt < 30; ++attempt, amount *= 0.5) {
    auto nodes = m.nodes;
    for (std::size_t v = 0; v < np; ++v) nodes[v] += amount * offsets[v];
    try {
      Mesh out = build_mesh(nodes, m.cells);
      if (out.flipped.empty() && validate(out).ok()) return out;
    } catch (const std::exception&) {
    }
  }
  return m;
}

}  // namespace vnsf
