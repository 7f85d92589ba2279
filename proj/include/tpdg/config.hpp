#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tpdg/grid.hpp"
#include "tpdg/limiter.hpp"

namespace tpdg::harness {

enum class CaseTag { VortexSteady, VortexAdvected, Rp1, Ce1, Ce2, Dambreak, Custom };

struct RunConfig {
  CaseTag tag = CaseTag::Rp1;
  ModelContext ctx;
  grid::Mesh mesh;
  grid::Boundaries boundaries;
  int order = 3;
  double cfl = 0.5;
  double t_end = 0.25;
  double advect_speed = 4.0; // vortex_advected
  std::optional<double> a_psi; // GLM; default 2x max acoustic speed of the IC
  limiter::LimiterParams limiter;
  std::string output_prefix = "run";
  std::string output_dir = ".";
  double output_every = 0.0; // intermediate output interval, 0 = final only
  bool write_vtk = true;
  // custom Riemann problem
  Primitive custom_left{}, custom_right{};
  double custom_radial = 0.0; // >0: 2D radial jump at this radius

  std::string case_name() const {
    switch (tag) {
    case CaseTag::VortexSteady: return "vortex";
    case CaseTag::VortexAdvected: return "vortex_advected";
    case CaseTag::Rp1: return "rp1";
    case CaseTag::Ce1: return "ce1";
    case CaseTag::Ce2: return "ce2";
    case CaseTag::Dambreak: return "dambreak";
    case CaseTag::Custom: return "custom";
    }
    return "?";
  }
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// case defaults
// ---------------------------------------------------------------------------

namespace detail {

inline void vortex_defaults(RunConfig& c) {
  c.ctx.variant = ModelVariant::base();
  c.ctx.eos1 = eos::EosSpec::ideal(1.4);
  c.ctx.eos2 = eos::EosSpec::ideal(1.4);
  c.mesh = grid::Mesh::make(2, {-10.0, -10.0}, {10.0, 10.0}, {32, 32});
  c.boundaries = grid::Boundaries::all(grid::BoundaryKind::Periodic);
  c.order = 3;
  c.cfl = 0.5;
  c.t_end = 1.0;
}

} // namespace detail

inline RunConfig case_defaults(CaseTag tag) {
  RunConfig c;
  c.tag = tag;
  switch (tag) {
  case CaseTag::VortexSteady:
    detail::vortex_defaults(c);
    break;
  case CaseTag::VortexAdvected:
    detail::vortex_defaults(c);
    c.t_end = 5.0;
    c.advect_speed = 4.0;
    break;
  case CaseTag::Rp1:
  case CaseTag::Custom:
    c.ctx.variant = ModelVariant::base();
    c.ctx.eos1 = eos::EosSpec::ideal(1.4);
    c.ctx.eos2 = eos::EosSpec::ideal(2.0);
    c.mesh = grid::Mesh::make(1, {-1.0, 0.0}, {1.0, 1.0}, {1024, 1});
    c.boundaries = grid::Boundaries::all(grid::BoundaryKind::Extrapolation);
    c.order = 3;
    c.cfl = 0.25;
    c.t_end = 0.25;
    break;
  case CaseTag::Ce1:
  case CaseTag::Ce2:
    c.ctx.variant = ModelVariant::base();
    c.ctx.eos1 = eos::EosSpec::ideal(1.4);
    c.ctx.eos2 = eos::EosSpec::ideal(2.0);
    c.mesh = grid::Mesh::make(2, {-1.0, -1.0}, {1.0, 1.0}, {128, 128});
    c.boundaries = grid::Boundaries::all(grid::BoundaryKind::Extrapolation);
    c.order = 3;
    c.cfl = 0.5;
    c.t_end = tag == CaseTag::Ce1 ? 0.1 : 0.2;
    break;
  case CaseTag::Dambreak:
    c.ctx.variant = ModelVariant::base();
    // air: reference sound speed c0=1 at rho0=1 through the entropy constant
    c.ctx.eos1 = eos::EosSpec::ideal(1.4, std::log(1.0 / 1.4));
    c.ctx.eos2 = eos::EosSpec::stiffened(2.0, 20.0, 1000.0, 0.0);
    c.ctx.sources.gravity = {0.0, -9.81, 0.0};
    c.ctx.filter.enabled = true;
    c.ctx.filter.eps = 1e-12;
    c.ctx.filter.rho0_1 = 1.0;
    c.ctx.filter.rho0_2 = 1000.0;
    c.mesh = grid::Mesh::make(2, {0.0, 0.0}, {4.0, 2.0}, {128, 64});
    c.boundaries = grid::Boundaries::all(grid::BoundaryKind::SlipWall);
    c.order = 3;
    c.cfl = 0.5;
    c.t_end = 0.4;
    break;
  }
  c.output_prefix = c.case_name();
  return c;
}

// ---------------------------------------------------------------------------
// INI-style parser: [section] lines, key = value, '#' comments.
// Unknown sections or keys are errors.
// ---------------------------------------------------------------------------

namespace detail {

struct IniData {
  // section -> ordered key/value pairs
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;
};

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline IniData parse_ini(std::istream& in) {
  IniData data;
  std::string line;
  int lineno = 0;
  std::string current;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
      current = trim(line.substr(1, line.size() - 2));
      data.sections.push_back({current, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (current.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    data.sections.back().second.push_back({trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
  }
  return data;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size())
      throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    if (v == "inf" || v == "infinity")
      return std::numeric_limits<double>::infinity();
    throw ConfigError("config key '" + key + "': cannot parse number '" + v + "'");
  }
}

inline int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const int i = static_cast<int>(x);
  if (x != i)
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  return i;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on")
    return true;
  if (v == "false" || v == "0" || v == "no" || v == "off")
    return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

inline void apply_eos(eos::EosSpec& spec, const std::string& section, const std::string& key,
                      const std::string& value) {
  if (key == "kind") {
    if (value == "ideal")
      spec.kind = eos::Kind::IdealGas;
    else if (value == "stiffened")
      spec.kind = eos::Kind::StiffenedGas;
    else
      throw ConfigError("config key '" + section + "." + key + "': unknown EOS kind '" +
                        value + "'");
  } else if (key == "gamma")
    spec.gamma = to_double(key, value);
  else if (key == "c0")
    spec.c0 = to_double(key, value);
  else if (key == "rho0")
    spec.rho0 = to_double(key, value);
  else if (key == "p0")
    spec.p0 = to_double(key, value);
  else if (key == "s_over_cv")
    spec.s_over_cv = to_double(key, value);
  else
    throw ConfigError("config: unknown key '" + key + "' in section [" + section + "]");
}

} // namespace detail

inline CaseTag parse_case_tag(const std::string& v) {
  if (v == "vortex" || v == "vortex_steady")
    return CaseTag::VortexSteady;
  if (v == "vortex_advected")
    return CaseTag::VortexAdvected;
  if (v == "rp1")
    return CaseTag::Rp1;
  if (v == "ce1")
    return CaseTag::Ce1;
  if (v == "ce2")
    return CaseTag::Ce2;
  if (v == "dambreak")
    return CaseTag::Dambreak;
  if (v == "custom")
    return CaseTag::Custom;
  throw ConfigError("config key 'type': unknown case '" + v + "'");
}

/// Parse a config file: the [case] type selects the paper setup, every other
/// key overrides its default.
inline RunConfig load_config(std::istream& in) {
  using detail::to_bool;
  using detail::to_double;
  using detail::to_int;
  const detail::IniData ini = detail::parse_ini(in);

  // find the case first
  CaseTag tag = CaseTag::Rp1;
  bool have_type = false;
  for (const auto& [sec, kvs] : ini.sections)
    if (sec == "case")
      for (const auto& [k, v] : kvs)
        if (k == "type") {
          tag = parse_case_tag(v);
          have_type = true;
        }
  if (!have_type)
    throw ConfigError("config: missing required key 'type' in section [case]");
  RunConfig c = case_defaults(tag);

  std::array<int, 2> cells = c.mesh.n;
  std::array<double, 2> lo = c.mesh.min, hi = c.mesh.max;
  int dim = c.mesh.dim;

  for (const auto& [sec, kvs] : ini.sections) {
    if (sec == "case") {
      for (const auto& [k, v] : kvs) {
        if (k == "type")
          continue;
        else if (k == "t_end")
          c.t_end = to_double(k, v);
        else if (k == "advect_speed")
          c.advect_speed = to_double(k, v);
        else if (k == "gravity_x")
          c.ctx.sources.gravity[0] = to_double(k, v);
        else if (k == "gravity_y")
          c.ctx.sources.gravity[1] = to_double(k, v);
        else if (k == "gravity_z")
          c.ctx.sources.gravity[2] = to_double(k, v);
        else if (k == "tau")
          c.ctx.sources.tau = to_double(k, v);
        else if (k == "zeta")
          c.ctx.sources.zeta = to_double(k, v);
        else if (k == "filter_eps")
          c.ctx.filter.eps = to_double(k, v);
        else if (k == "alpha_l")
          c.custom_left.alpha1 = to_double(k, v);
        else if (k == "rho1_l")
          c.custom_left.rho1 = to_double(k, v);
        else if (k == "rho2_l")
          c.custom_left.rho2 = to_double(k, v);
        else if (k == "u1_l")
          c.custom_left.u1[0] = to_double(k, v);
        else if (k == "u2_l")
          c.custom_left.u2[0] = to_double(k, v);
        else if (k == "alpha_r")
          c.custom_right.alpha1 = to_double(k, v);
        else if (k == "rho1_r")
          c.custom_right.rho1 = to_double(k, v);
        else if (k == "rho2_r")
          c.custom_right.rho2 = to_double(k, v);
        else if (k == "u1_r")
          c.custom_right.u1[0] = to_double(k, v);
        else if (k == "u2_r")
          c.custom_right.u2[0] = to_double(k, v);
        else if (k == "radial_jump")
          c.custom_radial = to_double(k, v);
        else
          throw ConfigError("config: unknown key '" + k + "' in section [case]");
      }
    } else if (sec == "scheme") {
      for (const auto& [k, v] : kvs) {
        if (k == "variant") {
          if (v == "base")
            c.ctx.variant = ModelVariant::base();
          else if (v == "glm")
            c.ctx.variant = ModelVariant{VariantKind::Glm, c.a_psi.value_or(0.0)};
          else if (v == "godunov_powell" || v == "gp")
            c.ctx.variant = ModelVariant::godunov_powell();
          else
            throw ConfigError("config key 'variant': unknown value '" + v + "'");
        } else if (k == "order")
          c.order = to_int(k, v);
        else if (k == "cfl")
          c.cfl = to_double(k, v);
        else if (k == "a_psi")
          c.a_psi = to_double(k, v);
        else
          throw ConfigError("config: unknown key '" + k + "' in section [scheme]");
      }
    } else if (sec == "mesh") {
      for (const auto& [k, v] : kvs) {
        if (k == "nx")
          cells[0] = to_int(k, v);
        else if (k == "ny")
          cells[1] = to_int(k, v);
        else if (k == "xmin")
          lo[0] = to_double(k, v);
        else if (k == "xmax")
          hi[0] = to_double(k, v);
        else if (k == "ymin")
          lo[1] = to_double(k, v);
        else if (k == "ymax")
          hi[1] = to_double(k, v);
        else if (k == "dim")
          dim = to_int(k, v);
        else if (k == "boundaries") {
          if (v == "periodic")
            c.boundaries = grid::Boundaries::all(grid::BoundaryKind::Periodic);
          else if (v == "walls")
            c.boundaries = grid::Boundaries::all(grid::BoundaryKind::SlipWall);
          else if (v == "outflow")
            c.boundaries = grid::Boundaries::all(grid::BoundaryKind::Extrapolation);
          else
            throw ConfigError("config key 'boundaries': unknown value '" + v + "'");
        } else
          throw ConfigError("config: unknown key '" + k + "' in section [mesh]");
      }
    } else if (sec == "eos.phase1") {
      for (const auto& [k, v] : kvs)
        detail::apply_eos(c.ctx.eos1, sec, k, v);
    } else if (sec == "eos.phase2") {
      for (const auto& [k, v] : kvs)
        detail::apply_eos(c.ctx.eos2, sec, k, v);
    } else if (sec == "limiter") {
      for (const auto& [k, v] : kvs) {
        if (k == "enabled")
          c.limiter.enabled = to_bool(k, v);
        else if (k == "delta0")
          c.limiter.delta0 = to_double(k, v);
        else if (k == "eps_rel")
          c.limiter.eps_rel = to_double(k, v);
        else if (k == "eps_alpha")
          c.limiter.eps_alpha = to_double(k, v);
        else
          throw ConfigError("config: unknown key '" + k + "' in section [limiter]");
      }
    } else if (sec == "output") {
      for (const auto& [k, v] : kvs) {
        if (k == "prefix")
          c.output_prefix = v;
        else if (k == "directory")
          c.output_dir = v;
        else if (k == "every_time")
          c.output_every = to_double(k, v);
        else if (k == "vtk")
          c.write_vtk = to_bool(k, v);
        else
          throw ConfigError("config: unknown key '" + k + "' in section [output]");
      }
    } else {
      throw ConfigError("config: unknown section [" + sec + "]");
    }
  }

  c.mesh = grid::Mesh::make(dim, lo, hi, cells);
  c.ctx.eos1.validate();
  c.ctx.eos2.validate();
  c.ctx.sources.validate();
  c.boundaries.validate();
  if (c.order < 1 || c.order > dg::kMaxOrder)
    throw ConfigError("config key 'order': degree must be in [1,5]");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0))
    throw ConfigError("config key 'cfl': must be in (0,1]");
  if (c.ctx.variant.is_glm() && c.a_psi)
    c.ctx.variant.a_psi = *c.a_psi;
  return c;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file: " + path);
  return load_config(in);
}

} // namespace tpdg::harness
