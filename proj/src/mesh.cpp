#include "vnsf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include <fmt/format.h>

#include "vnsf/errors.hpp"

namespace vnsf {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  return 0.5 * cross(p1 - p0, p2 - p0);
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  // relative to a to limit cancellation
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double b2 = ab.squaredNorm(), c2 = ac.squaredNorm();
  return a + Vec2(ac.y() * b2 - ab.y() * c2, ab.x() * c2 - ac.x() * b2) / d;
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

bool Mesh::boundary_cell(int i) const {
  const auto& nb = nbr[i];
  return nb[0] < 0 || nb[1] < 0 || nb[2] < 0;
}

int Mesh::local_edge(int i, int j) const {
  for (int k = 0; k < 3; ++k)
    if (nbr[i][k] == j) return k;
  return -1;
}

std::vector<int> Mesh::neighbors(int i) const {
  std::vector<int> out{i};
  for (int k = 0; k < 3; ++k)
    if (nbr[i][k] >= 0) out.push_back(nbr[i][k]);
  return out;
}

Mesh build_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> cells) {
  if (cells.empty()) throw ParseError("mesh has no cells");
  Mesh m;
  m.nodes = std::move(nodes);
  m.cells = std::move(cells);
  const int np = static_cast<int>(m.nodes.size());
  double lo = 0, hi = 0;
  for (const auto& p : m.nodes) {
    lo = std::min({lo, p.x(), p.y()});
    hi = std::max({hi, p.x(), p.y()});
  }
  const double scale = std::max(hi - lo, 1e-300);

  std::map<std::array<int, 3>, int> seen;
  for (int i = 0; i < m.size(); ++i) {
    auto& c = m.cells[i];
    for (int v : c)
      if (v < 0 || v >= np) throw ParseError(fmt::format("cell {} references node {} out of range", i, v));
    if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2])
      throw DegenerateError(fmt::format("cell {} repeats a node", i));
    auto key = c;
    std::sort(key.begin(), key.end());
    if (auto [it, fresh] = seen.emplace(key, i); !fresh)
      throw TopologyError(fmt::format("cells {} and {} share all three edges", it->second, i));
    const double a = signed_area(m.nodes[c[0]], m.nodes[c[1]], m.nodes[c[2]]);
    if (std::abs(a) <= 1e-14 * scale * scale) throw DegenerateError(fmt::format("cell {} has zero area", i));
    if (a < 0) {
      std::swap(c[1], c[2]);
      m.flipped.push_back(i);
    }
  }

  m.nbr.assign(m.size(), {-1, -1, -1});
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
  for (int i = 0; i < m.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      int a = m.cells[i][(k + 1) % 3], b = m.cells[i][(k + 2) % 3];
      edges[{std::min(a, b), std::max(a, b)}].emplace_back(i, k);
    }
  for (const auto& [key, users] : edges) {
    if (users.size() > 2)
      throw TopologyError(fmt::format("edge ({},{}) shared by {} cells", key.first, key.second, users.size()));
    if (users.size() == 2) {
      auto [i, k] = users[0];
      auto [j, l] = users[1];
      // consistently oriented neighbours traverse the shared edge in opposite directions
      if (m.cells[i][(k + 1) % 3] == m.cells[j][(l + 1) % 3])
        throw TopologyError(fmt::format("cells {} and {} overlap across edge ({},{})", i, j, key.first, key.second));
      m.nbr[i][k] = j;
      m.nbr[j][l] = i;
    }
  }

  m.node_cells.assign(np, {});
  for (int i = 0; i < m.size(); ++i)
    for (int a = 0; a < 3; ++a) m.node_cells[m.cells[i][a]].emplace_back(i, a);
  return m;
}

Mesh load_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    line = strip_comment(line);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw ParseError("empty mesh file");
  long np = -1, nc = -1;
  {
    std::istringstream h(rows[0]);
    std::string extra;
    if (!(h >> np >> nc) || (h >> extra) || np < 3 || nc < 0) throw ParseError("line 1: expected `NP NC`");
  }
  if (nc == 0) throw ParseError("empty cell list");
  if (static_cast<long>(rows.size()) != 1 + np + nc)
    throw ParseError(fmt::format("expected {} data lines, found {}", np + nc, rows.size() - 1));
  std::vector<Vec2> nodes(np);
  for (long r = 0; r < np; ++r) {
    std::istringstream s(rows[1 + r]);
    double x, y;
    std::string extra;
    if (!(s >> x >> y) || (s >> extra)) throw ParseError(fmt::format("node line {}: expected `x y`", r));
    nodes[r] = Vec2(x, y);
  }
  std::vector<std::array<int, 3>> cells(nc);
  for (long r = 0; r < nc; ++r) {
    std::istringstream s(rows[1 + np + r]);
    long a, b, c;
    std::string extra;
    if (!(s >> a >> b >> c) || (s >> extra)) throw ParseError(fmt::format("cell line {}: expected `i j k`", r));
    cells[r] = {static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
  }
  return build_mesh(std::move(nodes), std::move(cells));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open mesh file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return load_mesh(ss.str());
}

std::string format_mesh(const Mesh& m) {
  std::string out = fmt::format("{} {}\n", m.nodes.size(), m.cells.size());
  for (const auto& p : m.nodes) out += fmt::format("{:.17g} {:.17g}\n", p.x(), p.y());
  for (const auto& c : m.cells) out += fmt::format("{} {} {}\n", c[0], c[1], c[2]);
  return out;
}

Geometry compute_geometry(const Mesh& m, bool strict) {
  const int n = m.size();
  Geometry g;
  g.area.resize(n);
  g.circumcenter.resize(n);
  g.edge_len.resize(n);
  g.edge_dist.resize(n);
  g.dual_len.resize(n);
  g.kite.resize(n);
  Vec2 lo = m.nodes[0], hi = m.nodes[0];
  for (const auto& p : m.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  g.diameter = (hi - lo).norm();
  g.eps = 1e-12 * g.diameter;

  for (int i = 0; i < n; ++i) {
    const auto& c = m.cells[i];
    const Vec2 &p0 = m.nodes[c[0]], &p1 = m.nodes[c[1]], &p2 = m.nodes[c[2]];
    g.area[i] = signed_area(p0, p1, p2);
    g.circumcenter[i] = circumcenter(p0, p1, p2);
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = m.nodes[c[(k + 1) % 3]];
      const Vec2& q = m.nodes[c[(k + 2) % 3]];
      const Vec2 t = q - p;
      const double len = t.norm();
      const Vec2 inward(-t.y() / len, t.x() / len);
      g.edge_len[i][k] = len;
      g.edge_dist[i][k] = (g.circumcenter[i] - 0.5 * (p + q)).dot(inward);
    }
  }
  g.area_env = g.area.sum();

  g.node_area = Vec::Zero(m.nodes.size());
  g.vort_area = Vec::Zero(m.nodes.size());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      int j = m.nbr[i][k];
      g.dual_len[i][k] = g.edge_dist[i][k] + (j >= 0 ? g.edge_dist[j][m.local_edge(j, i)] : 0.0);
    }
    for (int a = 0; a < 3; ++a) {
      int e1 = (a + 1) % 3, e2 = (a + 2) % 3;
      double kite = 0.25 * (g.edge_len[i][e1] * g.edge_dist[i][e1] + g.edge_len[i][e2] * g.edge_dist[i][e2]);
      g.kite[i][a] = kite;
      int node = m.cells[i][a];
      g.node_area[node] += kite;
      if (m.nbr[i][e1] >= 0 && m.nbr[i][e2] >= 0) g.vort_area[node] += kite;
    }
  }

  if (strict) {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k)
        if (g.dual_len[i][k] <= g.eps) {
          int j = m.nbr[i][k];
          throw DegenerateError(j >= 0 ? fmt::format("dual edge between cells {} and {} has length {:.3g}", i, j,
                                                     g.dual_len[i][k])
                                       : fmt::format("boundary dual edge of cell {} has length {:.3g}", i,
                                                     g.dual_len[i][k]));
        }
  }
  return g;
}

Report validate(const Mesh& m, const Geometry& g) {
  Report r;
  for (int i : m.flipped) r.notes.push_back(fmt::format("cell {} reoriented counterclockwise", i));
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    if (g.area[i] <= 0) r.errors.push_back(fmt::format("cell {}: nonpositive area", i));
    for (int k = 0; k < 3; ++k) {
      int j = m.nbr[i][k];
      if (j >= 0 && j < i) continue;
      if (g.dual_len[i][k] <= g.eps) {
        if (j >= 0)
          r.errors.push_back(fmt::format("degenerate dual edge between cells {} and {} (|*h| = {:.3g})", i, j,
                                         g.dual_len[i][k]));
        else
          r.errors.push_back(fmt::format("degenerate boundary dual edge at cell {} (|*h| = {:.3g})", i,
                                         g.dual_len[i][k]));
      }
    }
    double sum = 0;
    for (int a = 0; a < 3; ++a) {
      sum += g.kite[i][a];
      if (g.kite[i][a] <= 0)
        r.errors.push_back(fmt::format("nonpositive kite at cell {} node {} ({:.3g})", i, m.cells[i][a],
                                       g.kite[i][a]));
    }
    if (std::abs(sum - g.area[i]) > 1e-12 * std::abs(g.area[i]))
      r.errors.push_back(fmt::format("kites of cell {} do not partition it", i));
  }

  std::vector<char> reached(n, 0);
  std::queue<int> q;
  q.push(0);
  reached[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    for (int j : m.nbr[i])
      if (j >= 0 && !reached[j]) {
        reached[j] = 1;
        ++count;
        q.push(j);
      }
  }
  if (count != n) r.errors.push_back(fmt::format("mesh is not edge-connected ({} of {} cells reached)", count, n));

  for (std::size_t v = 0; v < m.node_cells.size(); ++v) {
    const auto& fan = m.node_cells[v];
    if (fan.empty()) {
      r.notes.push_back(fmt::format("node {} is unused", v));
      continue;
    }
    bool closed = true;
    for (auto [i, a] : fan)
      if (m.nbr[i][(a + 1) % 3] < 0 || m.nbr[i][(a + 2) % 3] < 0) closed = false;
    if (closed && fan.size() == 4)
      r.notes.push_back(fmt::format("interior node {} has valence 4: opposite cells have two common neighbours", v));
    if (closed && fan.size() == 3)
      r.notes.push_back(fmt::format("interior node {} has valence 3: no two-away pairs around it", v));
  }
  return r;
}

Report validate(const Mesh& m) { return validate(m, compute_geometry(m, false)); }

Domain::Domain(Mesh m, bool strict) : mesh_(std::move(m)), geo_(compute_geometry(mesh_, strict)) {
  const int n = mesh_.size();
  boundary_.assign(n, 0);
  for (int i = 0; i < n; ++i) boundary_[i] = mesh_.boundary_cell(i);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) {
      int j = mesh_.nbr[i][k];
      if (j < 0) {
        boundary_edges_.emplace_back(i, k);
      } else if (i < j) {
        pairs_.push_back({i, j, k, mesh_.local_edge(j, i)});
        if (!boundary_[i] && !boundary_[j]) free_pairs_.push_back(static_cast<int>(pairs_.size()) - 1);
      }
    }
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a) {
      int ccw = ccw_of(i, a), cw = cw_of(i, a);
      if (ccw >= 0 && cw >= 0) triplets_.push_back({i, a, mesh_.cells[i][a], ccw, cw});
    }
}

double Domain::flat_coef(int i, int k) const {
  return 2.0 * geo_.area[i] * geo_.dual_len[i][k] / geo_.edge_len[i][k];
}

double Domain::conductance(int i, int k) const { return geo_.edge_len[i][k] / geo_.dual_len[i][k]; }

int Domain::vertex_of(int i, int node) const {
  for (int a = 0; a < 3; ++a)
    if (mesh_.cells[i][a] == node) return a;
  return -1;
}

double Domain::kite_fraction(const Triplet& t) const {
  return geo_.kite[t.cell][t.vertex] / geo_.vort_area[t.node];
}

double Domain::wedge_weight(const Triplet& t) const {
  const double star = geo_.vort_area[t.node];
  return star * star / (4.0 * geo_.area[t.cell] * geo_.kite[t.cell][t.vertex]);
}

}  // namespace vnsf
