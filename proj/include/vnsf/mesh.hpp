#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vnsf {

using Vec2 = Eigen::Vector2d;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Local convention: edge k of a cell is (v[k+1], v[k+2]), opposite v[k].
struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> cells;        // counterclockwise
  std::vector<std::array<int, 3>> nbr;          // across edge k, -1 on the boundary
  std::vector<std::vector<std::pair<int, int>>> node_cells;  // (cell, local vertex)
  std::vector<int> flipped;                     // cells reoriented while building

  int size() const { return static_cast<int>(cells.size()); }
  int env() const { return size(); }
  bool boundary_cell(int i) const;
  int local_edge(int i, int j) const;
  std::vector<int> neighbors(int i) const;      // N(i), includes i
};

Mesh build_mesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> cells);
Mesh load_mesh(const std::string& text);
Mesh read_mesh_file(const std::string& path);
std::string format_mesh(const Mesh& m);

// Staggered rows: well-centred when lx/nx < 2*ly/ny.
Mesh generate_rect_mesh(int nx, int ny, double lx, double ly);
// Four triangles around each rectangle centre. Its circumcentric dual is degenerate.
Mesh generate_crisscross_mesh(int nx, int ny, double lx, double ly);
// Random interior-node displacement, shrunk until the dual stays valid.
Mesh jitter_mesh(const Mesh& m, double amount, std::uint64_t seed);

struct Geometry {
  Vec area;
  double area_env = 0.0;
  std::vector<Vec2> circumcenter;
  std::vector<std::array<double, 3>> edge_len;
  std::vector<std::array<double, 3>> edge_dist;   // signed circumcentre-to-edge, positive inward
  std::vector<std::array<double, 3>> dual_len;    // signed; boundary edges: edge_dist alone
  std::vector<std::array<double, 3>> kite;        // per local vertex
  Vec node_area;   // full dual cell
  Vec vort_area;   // kites of cells with both edges at the node interior
  double diameter = 0.0;
  double eps = 0.0;
};

Geometry compute_geometry(const Mesh& m, bool strict = true);

struct Report {
  std::vector<std::string> errors;
  std::vector<std::string> notes;
  bool ok() const { return errors.empty(); }
};

Report validate(const Mesh& m, const Geometry& g);
Report validate(const Mesh& m);

struct Pair {
  int i, j;    // i < j
  int ki, kj;  // local edge index in each cell
};

// Cell `cell` at its local vertex `vertex`, with the neighbours on either side.
// Around the node the order is cw -> cell -> ccw.
struct Triplet {
  int cell, vertex, node;
  int ccw, cw;
};

class Domain {
 public:
  explicit Domain(Mesh m, bool strict = true);

  const Mesh& mesh() const { return mesh_; }
  const Geometry& geo() const { return geo_; }
  int n() const { return mesh_.size(); }
  const Vec& area() const { return geo_.area; }

  const std::vector<Pair>& pairs() const { return pairs_; }
  const std::vector<int>& free_pairs() const { return free_pairs_; }   // both cells off the boundary
  const std::vector<std::pair<int, int>>& boundary_edges() const { return boundary_edges_; }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  // 2 Omega_ii |*h| / |h| and its reciprocal
  double flat_coef(int i, int k) const;
  double sharp_coef(int i, int k) const { return 1.0 / flat_coef(i, k); }
  double conductance(int i, int k) const;   // |h| / |*h|

  int node_plus(int i, int k) const { return mesh_.cells[i][(k + 2) % 3]; }
  int node_minus(int i, int k) const { return mesh_.cells[i][(k + 1) % 3]; }
  int ccw_of(int i, int a) const { return mesh_.nbr[i][(a + 1) % 3]; }
  int cw_of(int i, int a) const { return mesh_.nbr[i][(a + 2) % 3]; }
  int vertex_of(int i, int node) const;

  double kite_fraction(const Triplet& t) const;   // K for the positively oriented triplet
  double wedge_weight(const Triplet& t) const;    // W
  bool free_cell(int i) const { return !boundary_[i]; }

 private:
  Mesh mesh_;
  Geometry geo_;
  std::vector<Pair> pairs_;
  std::vector<int> free_pairs_;
  std::vector<std::pair<int, int>> boundary_edges_;
  std::vector<Triplet> triplets_;
  std::vector<char> boundary_;
};

}  // namespace vnsf
