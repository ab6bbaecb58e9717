#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vnsf/mesh.hpp"

namespace vnsf {

struct VerifyOptions {
  std::uint64_t seed = 1;
  std::vector<int> sizes{20, 50, 200};   // target cell counts
  int variants = 17;                     // per size: one structured mesh, the rest jittered
  bool flip_div_adjoint = false;         // fault injection: use -d0(F) in the pairing form
};

struct LemmaResult {
  std::string name;
  double max_residual = 0.0;
  double tol = 0.0;
  int samples = 0;
  bool pass() const { return samples > 0 && max_residual < tol; }
};

struct VerifyReport {
  std::vector<LemmaResult> lemmas;
  int meshes = 0;
  int min_cells = 0, max_cells = 0;
  double seconds = 0.0;
  bool pass() const;
  const LemmaResult& find(const std::string& name) const;
};

// generator size closest to `target` cells, as (nx, ny)
std::pair<int, int> grid_for_cells(int target);
std::vector<Mesh> verify_corpus(const VerifyOptions& opt);
VerifyReport run_verify(const VerifyOptions& opt);

void print_report(const VerifyReport& r, std::ostream& out);
int cmd_verify(const VerifyOptions& opt, std::ostream& out);

}  // namespace vnsf
