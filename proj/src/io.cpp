#include "vnsf/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "vnsf/errors.hpp"
#include "vnsf/fields.hpp"
#include "vnsf/kernels.hpp"

namespace vnsf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
  return x;
}

long to_int(const std::string& key, const std::string& v) {
  long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

template <class E>
E to_enum(const std::string& key, const std::string& v, const std::map<std::string, E>& names) {
  auto it = names.find(v);
  if (it != names.end()) return it->second;
  std::string allowed;
  for (const auto& [n, _] : names) allowed += (allowed.empty() ? "" : ", ") + n;
  throw ConfigError(fmt::format("{}: '{}' is not one of {}", key, v, allowed));
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&](const char* k, auto field) {
      t[k] = [field](RunConfig& c, const std::string& key, const std::string& v) { c.*field = to_double(key, v); };
    };
    (void)num;
    auto d = [&](const char* k, std::function<double&(RunConfig&)> ref) {
      t[k] = [ref](RunConfig& c, const std::string& key, const std::string& v) { ref(c) = to_double(key, v); };
    };
    auto i = [&](const char* k, std::function<void(RunConfig&, long)> set) {
      t[k] = [set](RunConfig& c, const std::string& key, const std::string& v) { set(c, to_int(key, v)); };
    };
    t["mesh.file"] = [](RunConfig& c, const std::string&, const std::string& v) { c.mesh.file = v; };
    i("mesh.nx", [](RunConfig& c, long v) { c.mesh.nx = static_cast<int>(v); });
    i("mesh.ny", [](RunConfig& c, long v) { c.mesh.ny = static_cast<int>(v); });
    d("mesh.lx", [](RunConfig& c) -> double& { return c.mesh.lx; });
    d("mesh.ly", [](RunConfig& c) -> double& { return c.mesh.ly; });
    d("mesh.jitter", [](RunConfig& c) -> double& { return c.mesh.jitter; });
    i("mesh.seed", [](RunConfig& c, long v) { c.mesh.seed = static_cast<std::uint64_t>(v); });

    d("time.h", [](RunConfig& c) -> double& { return c.stepper.h; });
    i("time.steps", [](RunConfig& c, long v) { c.steps = static_cast<int>(v); });

    d("gas.gamma", [](RunConfig& c) -> double& { return c.physics.gas.gamma; });
    d("gas.cv", [](RunConfig& c) -> double& { return c.physics.gas.cv; });
    d("gas.K", [](RunConfig& c) -> double& { return c.physics.gas.K; });

    d("physics.mu", [](RunConfig& c) -> double& { return c.physics.mu; });
    d("physics.zeta", [](RunConfig& c) -> double& { return c.physics.zeta; });
    d("physics.lambda", [](RunConfig& c) -> double& { return c.physics.lambda; });
    d("physics.theta_env", [](RunConfig& c) -> double& { return c.physics.theta_env; });
    t["physics.insulated"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.physics.insulated = to_bool(k, v);
    };
    t["physics.conduction_sign"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.physics.sign = to_enum<ConductionSign>(k, v, {{"physical", ConductionSign::physical},
                                                      {"printed", ConductionSign::printed}});
    };

    t["heat.kind"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.physics.heat.kind =
          to_enum<HeatKind>(k, v, {{"zero", HeatKind::zero}, {"constant", HeatKind::constant}, {"gaussian", HeatKind::gaussian}});
    };
    d("heat.amplitude", [](RunConfig& c) -> double& { return c.physics.heat.amplitude; });
    d("heat.x", [](RunConfig& c) -> double& { return c.physics.heat.center.x(); });
    d("heat.y", [](RunConfig& c) -> double& { return c.physics.heat.center.y(); });
    d("heat.width", [](RunConfig& c) -> double& { return c.physics.heat.width; });

    t["solver.tau"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.stepper.group.kind = to_enum<TauKind>(k, v, {{"exp", TauKind::exp}, {"cayley", TauKind::cayley}});
    };
    d("solver.tol", [](RunConfig& c) -> double& { return c.stepper.tol; });
    i("solver.max_iter", [](RunConfig& c, long v) { c.stepper.max_iter = static_cast<int>(v); });
    i("solver.max_entropy_iter", [](RunConfig& c, long v) { c.stepper.max_entropy_iter = static_cast<int>(v); });
    t["solver.jacobian"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.stepper.jacobian = to_enum<JacobianKind>(
          k, v, {{"finite-difference", JacobianKind::finite_difference}, {"fixed-point", JacobianKind::fixed_point}});
    };
    t["solver.boundary_temperature"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.stepper.boundary = to_enum<BoundaryTemperature>(
          k, v, {{"insulated", BoundaryTemperature::insulated}, {"dirichlet", BoundaryTemperature::dirichlet}});
    };
    t["solver.cold_start"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.stepper.cold_start =
          to_enum<ColdStart>(k, v, {{"backward", ColdStart::backward}, {"frozen", ColdStart::frozen}});
    };

    t["initial.preset"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v != "rest" && v != "hot-spot" && v != "shear" && v != "taylor-like")
        throw ConfigError(fmt::format("{}: unknown preset '{}'", k, v));
      c.initial.preset = v;
    };
    d("initial.density", [](RunConfig& c) -> double& { return c.initial.density; });
    d("initial.theta", [](RunConfig& c) -> double& { return c.initial.theta; });
    d("initial.amplitude", [](RunConfig& c) -> double& { return c.initial.amplitude; });
    d("initial.x", [](RunConfig& c) -> double& { return c.initial.center.x(); });
    d("initial.y", [](RunConfig& c) -> double& { return c.initial.center.y(); });
    d("initial.width", [](RunConfig& c) -> double& { return c.initial.width; });

    t["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; };
    i("output.stride", [](RunConfig& c, long v) { c.snapshot_stride = static_cast<int>(v); });
    return t;
  }();
  return table;
}

std::pair<Vec2, Vec2> bounding_box(const Mesh& m) {
  Vec2 lo = m.nodes.front(), hi = m.nodes.front();
  for (const auto& x : m.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  return {lo, hi};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(fmt::format("{}: unknown key (line {})", key, lineno));
    if (value.empty()) throw ConfigError(fmt::format("{}: missing value", key));
    it->second(c, key, value);
  }
  if (c.steps < 0) throw ConfigError("time.steps: must be nonnegative");
  if (c.snapshot_stride < 0) throw ConfigError("output.stride: must be nonnegative");
  if (!(c.initial.density > 0)) throw ConfigError("initial.density: must be positive");
  if (!(c.initial.theta > 0)) throw ConfigError("initial.theta: must be positive");
  if (!(c.initial.width > 0)) throw ConfigError("initial.width: must be positive");
  try {
    c.physics.check();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("physics: {}", e.what()));
  }
  try {
    c.stepper.check();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("solver: {}", e.what()));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

Mesh make_mesh(const MeshSource& src) {
  Mesh m;
  if (!src.file.empty()) {
    if (!std::filesystem::exists(src.file)) throw ConfigError(fmt::format("mesh.file: '{}' does not exist", src.file));
    try {
      m = read_mesh_file(src.file);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("mesh.file: {}", e.what()));
    }
  } else {
    try {
      m = generate_rect_mesh(src.nx, src.ny, src.lx, src.ly);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("mesh.nx/ny/lx/ly: {}", e.what()));
    }
  }
  if (src.jitter > 0) m = jitter_mesh(m, src.jitter, src.seed);
  return m;
}

FluidState initial_condition(const Domain& d, const GasModel& gas, const InitialParams& ip) {
  const int n = d.n();
  const auto [lo, hi] = bounding_box(d.mesh());
  const Vec2 size = hi - lo;
  FluidState s{Mat::Zero(n, n), Vec::Constant(n, ip.density), Vec::Zero(n)};
  if (!(ip.density > 0) || !(ip.theta > 0)) throw ConfigError("initial: density and temperature must be positive");
  s.S.setConstant(entropy_for_temperature(gas, ip.density, ip.theta));

  const double a = ip.amplitude;
  const double pi = M_PI;
  auto unit = [&](const Vec2& x) { return Vec2((x - lo).cwiseQuotient(size)); };
  VelocityFn u;
  if (ip.preset == "rest") {
  } else if (ip.preset == "hot-spot") {
    for (int i = 0; i < n; ++i) {
      const Vec2 r = d.geo().circumcenter[i] - ip.center;
      s.S[i] += a * std::exp(-r.squaredNorm() / (2.0 * ip.width * ip.width));
    }
  } else if (ip.preset == "shear") {
    u = [&](const Vec2& x) {
      const Vec2 p = unit(x);
      return Vec2(a * std::sin(2 * pi * p.y()) * std::pow(std::sin(pi * p.x()), 2), 0.0);
    };
  } else if (ip.preset == "taylor-like") {
    u = [&](const Vec2& x) {
      const Vec2 p = unit(x);
      return Vec2(a * std::pow(std::sin(pi * p.x()), 2) * std::sin(2 * pi * p.y()),
                  -a * std::sin(2 * pi * p.x()) * std::pow(std::sin(pi * p.y()), 2));
    };
  } else {
    throw ConfigError(fmt::format("initial.preset: unknown preset '{}'", ip.preset));
  }
  if (u) s.A = assemble_free_field(d, free_fluxes(d, init_from_velocity(d, u, true)));
  PhysicsParams probe;
  probe.gas = gas;
  try {
    temperature(d, probe, s.D, s.S);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("initial: {}", e.what()));
  }
  return s;
}

std::string csv_header() {
  return "step,time,mass,entropy,energy,boundary_heat,heat_source,energy_residual,entropy_production,momentum_iters,"
         "entropy_iters";
}

std::string csv_row(int step, const DiagnosticsSample& s, const StepRecord& rec) {
  return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}", step, s.time, s.mass,
                     s.entropy, s.energy, s.boundary_heat, s.heat_source, s.energy_residual, s.entropy_production,
                     rec.momentum_iters, rec.entropy_iters);
}

void export_vtk(const Domain& d, const PhysicsParams& p, const FluidState& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  const Mesh& m = d.mesh();
  const int n = d.n();
  const Vec theta = temperature(d, p, s.D, s.S);
  const Vec div = divergence(s.A);
  const Vec fric = friction_power(d, p, s.A);
  const auto vel = reconstruct_velocity(d, s.A);

  fmt::print(f, "# vtk DataFile Version 3.0\nvnsf state\nASCII\nDATASET UNSTRUCTURED_GRID\n");
  fmt::print(f, "POINTS {} double\n", m.nodes.size());
  for (const auto& x : m.nodes) fmt::print(f, "{:.17g} {:.17g} 0\n", x.x(), x.y());
  fmt::print(f, "CELLS {} {}\n", n, 4 * n);
  for (const auto& c : m.cells) fmt::print(f, "3 {} {} {}\n", c[0], c[1], c[2]);
  fmt::print(f, "CELL_TYPES {}\n", n);
  for (int i = 0; i < n; ++i) fmt::print(f, "5\n");
  fmt::print(f, "CELL_DATA {}\n", n);
  auto scalars = [&](const char* name, auto value) {
    fmt::print(f, "SCALARS {} double 1\nLOOKUP_TABLE default\n", name);
    for (int i = 0; i < n; ++i) fmt::print(f, "{:.17g}\n", value(i));
  };
  scalars("D", [&](int i) { return s.D[i]; });
  scalars("S", [&](int i) { return s.S[i]; });
  scalars("Theta", [&](int i) { return theta[i]; });
  scalars("divA", [&](int i) { return div[i]; });
  scalars("friction", [&](int i) { return fric[i]; });
  fmt::print(f, "VECTORS velocity double\n");
  for (const auto& v : vel) fmt::print(f, "{:.17g} {:.17g} 0\n", v.x(), v.y());
  if (!f) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

int cmd_run(const std::string& config_path, std::ostream& log) {
  RunConfig cfg;
  std::unique_ptr<Domain> dom;
  FluidState s0;
  try {
    cfg = load_config(config_path);
    Mesh mesh = make_mesh(cfg.mesh);
    try {
      dom = std::make_unique<Domain>(std::move(mesh));
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("mesh: {}", e.what()));
    }
    s0 = initial_condition(*dom, cfg.physics.gas, cfg.initial);
  } catch (const ConfigError& e) {
    fmt::print(log, "config error: {}\n", e.what());
    return 2;
  }
  const Domain& d = *dom;

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    fmt::print(log, "config error: output.dir: {}\n", ec.message());
    return 2;
  }
  std::ofstream csv(fs::path(cfg.output_dir) / "diagnostics.csv");
  if (!csv) {
    fmt::print(log, "config error: output.dir: cannot write diagnostics.csv\n");
    return 2;
  }

  fmt::print(log, "mesh: {} cells, {} free pairs; kernels: {}\n", d.n(), d.free_pairs().size(),
             kernels::active() == kernels::Backend::avx2 ? "avx2" : "scalar");
  fmt::print(log, "cold start: {}\n",
             cfg.stepper.cold_start == ColdStart::backward ? "backward (D^-1 = D^0 . tau(h A^0))" : "frozen (D^-1 = D^0)");

  VariationalIntegrator vi(d, cfg.physics, cfg.stepper);
  vi.start(s0);
  DiagnosticsSample prev = sample(d, cfg.physics, vi.state(), vi.time());
  fmt::print(csv, "{}\n{}\n", csv_header(), csv_row(0, prev, StepRecord{}));
  auto snapshot = [&](int k) {
    if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0)
      export_vtk(d, cfg.physics, vi.state(), (fs::path(cfg.output_dir) / fmt::format("state_{:06d}.vtk", k)).string());
  };
  snapshot(0);

  Observer write = [&](int k, const VariationalIntegrator& v, const StepRecord& rec) {
    DiagnosticsSample cur = sample(d, v.params(), v.state(), v.time());
    set_energy_residual(cur, prev);
    fmt::print(csv, "{}\n", csv_row(k, cur, rec));
    prev = cur;
    snapshot(k);
  };
  try {
    run(vi, cfg.steps, {write});
  } catch (const StepError& e) {
    csv.flush();
    fmt::print(log, "runtime error at {}\n", e.what());
    return 3;
  }
  fmt::print(log, "done: {} steps, t = {:.6g}, mass {:.17g}, energy {:.17g}\n", cfg.steps, vi.time(), prev.mass,
             prev.energy);
  return 0;
}

}  // namespace vnsf
