#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vnsf/errors.hpp"
#include "vnsf/io.hpp"
#include "vnsf/mesh.hpp"
#include "vnsf/verify.hpp"

namespace {

int mesh_gen(int nx, int ny, double lx, double ly, const std::string& out) {
  const vnsf::Mesh m = vnsf::generate_rect_mesh(nx, ny, lx, ly);
  std::ofstream f(out);
  if (!f) {
    fmt::print(stderr, "cannot write {}\n", out);
    return 1;
  }
  f << vnsf::format_mesh(m);
  fmt::print("{}: {} nodes, {} cells\n", out, m.nodes.size(), m.size());
  return f ? 0 : 1;
}

int mesh_check(const std::string& path) {
  vnsf::Mesh m;
  try {
    m = vnsf::read_mesh_file(path);
  } catch (const std::exception& e) {
    fmt::print("{}: {}\n", path, e.what());
    return 1;
  }
  const vnsf::Geometry g = vnsf::compute_geometry(m, false);
  const vnsf::Report r = vnsf::validate(m, g);
  fmt::print("{}: {} nodes, {} cells, area {:.12g}\n", path, m.nodes.size(), m.size(), g.area.sum());
  for (const auto& s : r.notes) fmt::print("  note: {}\n", s);
  for (const auto& s : r.errors) fmt::print("  error: {}\n", s);
  fmt::print("{}\n", r.ok() ? "valid" : "invalid");
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational compressible viscous heat-conducting flow on triangle meshes"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "run a simulation from a key = value config file");
  run->add_option("config", config, "config file")->required();

  vnsf::VerifyOptions vopt;
  std::vector<int> sizes;
  auto* verify = app.add_subcommand("verify", "check the discrete identities on randomized meshes");
  verify->add_option("--seed", vopt.seed, "random seed");
  verify->add_option("--sizes", sizes, "target cell counts")->delimiter(',');
  verify->add_option("--variants", vopt.variants, "meshes per size")->check(CLI::PositiveNumber);

  auto* mesh = app.add_subcommand("mesh", "mesh utilities");
  mesh->require_subcommand(1);
  int nx = 0, ny = 0;
  double lx = 0, ly = 0;
  std::string out, file;
  auto* gen = mesh->add_subcommand("gen", "write a staggered rectangle mesh");
  gen->add_option("nx", nx)->required();
  gen->add_option("ny", ny)->required();
  gen->add_option("lx", lx)->required();
  gen->add_option("ly", ly)->required();
  gen->add_option("out", out)->required();
  auto* check = mesh->add_subcommand("check", "validate a mesh file");
  check->add_option("file", file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return vnsf::cmd_run(config, std::cerr);
    if (*verify) {
      if (!sizes.empty()) vopt.sizes = sizes;
      return vnsf::cmd_verify(vopt, std::cout);
    }
    if (*gen) return mesh_gen(nx, ny, lx, ly, out);
    if (*check) return mesh_check(file);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
