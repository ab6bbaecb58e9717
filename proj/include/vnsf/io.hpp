#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "vnsf/diagnostics.hpp"
#include "vnsf/integrator.hpp"

namespace vnsf {

struct InitialParams {
  std::string preset = "rest";   // rest | hot-spot | shear | taylor-like
  double density = 1.0;
  double theta = 1.0;            // base temperature
  double amplitude = 0.1;        // entropy bump for hot-spot, peak speed for the flows
  Vec2 center{0.5, 0.5};
  double width = 0.15;
};

struct MeshSource {
  std::string file;   // empty: use the generator
  int nx = 4, ny = 7;
  double lx = 1.0, ly = 1.0;
  double jitter = 0.0;
  std::uint64_t seed = 1;
};

struct RunConfig {
  MeshSource mesh;
  int steps = 100;
  PhysicsParams physics;
  StepperConfig stepper;
  InitialParams initial;
  std::string output_dir = "out";
  int snapshot_stride = 0;   // 0: no VTK output
};

// Flat `key = value` lines, `#` comments. Unknown keys and bad values raise ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

Mesh make_mesh(const MeshSource& src);
FluidState initial_condition(const Domain& d, const GasModel& gas, const InitialParams& ip);

std::string csv_header();
std::string csv_row(int step, const DiagnosticsSample& s, const StepRecord& rec);

void export_vtk(const Domain& d, const PhysicsParams& p, const FluidState& s, const std::string& path);

// Returns the process exit status. Progress and errors go to `log`.
int cmd_run(const std::string& config_path, std::ostream& log);

}  // namespace vnsf
