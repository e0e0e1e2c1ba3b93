#include "pnpfem/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace pnpfem {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

double to_double(const std::string& path, const std::string& value) {
  const std::string t = trim(value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    fail(path, "expected a number, got \"" + value + "\"");
  }
  return v;
}

int to_int(const std::string& path, const std::string& value) {
  const std::string t = trim(value);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    fail(path, "expected an integer, got \"" + value + "\"");
  }
  return v;
}

bool to_bool(const std::string& path, const std::string& value) {
  const std::string t = trim(value);
  if (t == "true") return true;
  if (t == "false") return false;
  fail(path, "expected true or false, got \"" + value + "\"");
}

/// Parse a datum from tokens[idx...]: a number, or `linear a0 ax ay`.
ConfigDatum parse_datum(const std::string& path,
                        const std::vector<std::string>& tokens,
                        std::size_t& idx) {
  ConfigDatum d;
  if (idx >= tokens.size()) fail(path, "missing boundary datum");
  if (tokens[idx] == "linear") {
    if (idx + 3 >= tokens.size()) {
      fail(path, "linear datum needs three coefficients: linear a0 ax ay");
    }
    d.a0 = to_double(path, tokens[idx + 1]);
    d.ax = to_double(path, tokens[idx + 2]);
    d.ay = to_double(path, tokens[idx + 3]);
    idx += 4;
  } else {
    d.a0 = to_double(path, tokens[idx]);
    idx += 1;
  }
  return d;
}

ConfigScalarBc parse_scalar_bc(const std::string& path,
                               const std::string& value) {
  const auto tokens = split_ws(value);
  if (tokens.empty()) fail(path, "empty boundary condition");
  ConfigScalarBc bc;
  std::size_t idx = 1;
  if (tokens[0] == "zero_flux") {
    bc.kind = ScalarBcKind::zero_flux;
  } else if (tokens[0] == "strong") {
    bc.kind = ScalarBcKind::strong;
    bc.datum = parse_datum(path, tokens, idx);
  } else if (tokens[0] == "weak") {
    bc.kind = ScalarBcKind::weak;
    bc.datum = parse_datum(path, tokens, idx);
    if (idx < tokens.size()) {
      bc.penalty = to_double(path, tokens[idx]);
      if (bc.penalty <= 0.0) fail(path, "penalty must be positive");
      ++idx;
    }
  } else {
    fail(path, "expected strong/weak/zero_flux, got \"" + tokens[0] + "\"");
  }
  if (idx != tokens.size()) {
    fail(path, "unexpected trailing tokens in \"" + value + "\"");
  }
  return bc;
}

ConfigVelocityBc parse_velocity_bc(const std::string& path,
                                   const std::string& value) {
  const auto tokens = split_ws(value);
  if (tokens.empty()) fail(path, "empty boundary condition");
  ConfigVelocityBc bc;
  std::size_t idx = 1;
  if (tokens[0] == "natural") {
    bc.strong = false;
  } else if (tokens[0] == "strong") {
    bc.strong = true;
    bc.datum = parse_datum(path, tokens, idx);
  } else {
    fail(path, "expected strong/natural, got \"" + tokens[0] + "\"");
  }
  if (idx != tokens.size()) {
    fail(path, "unexpected trailing tokens in \"" + value + "\"");
  }
  return bc;
}

/// Route one key = value into the config. Throws on unknown paths.
void apply_key(CaseConfig& config, const std::string& section,
               const std::string& key, const std::string& value) {
  const std::string path = section + "." + key;

  if (section == "case") {
    if (key == "name") {
      config.name = trim(value);
    } else if (key == "type") {
      const std::string t = trim(value);
      if (t == "transient") {
        config.type = CaseType::transient;
      } else if (t == "mms_convergence") {
        config.type = CaseType::mms_convergence;
      } else {
        fail(path, "expected transient or mms_convergence");
      }
    } else if (key == "flow") {
      config.flow = to_bool(path, value);
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section == "mesh") {
    MeshSpec& m = config.mesh;
    if (key == "generator") {
      const std::string g = trim(value);
      if (g != "interval" && g != "rect" && g != "msh") {
        fail(path, "expected interval, rect or msh");
      }
      m.generator = g;
    } else if (key == "n") {
      m.n = to_int(path, value);
    } else if (key == "x0") {
      m.x0 = to_double(path, value);
    } else if (key == "x1") {
      m.x1 = to_double(path, value);
    } else if (key == "ratio") {
      m.ratio = to_double(path, value);
    } else if (key == "nx") {
      m.nx = to_int(path, value);
    } else if (key == "ny") {
      m.ny = to_int(path, value);
    } else if (key == "lx") {
      m.lx = to_double(path, value);
    } else if (key == "ly") {
      m.ly = to_double(path, value);
    } else if (key == "y_ratio") {
      m.y_ratio = to_double(path, value);
    } else if (key == "element") {
      const std::string e = trim(value);
      if (e == "quad4") {
        m.element = ElementKind::quad4;
      } else if (e == "tri3") {
        m.element = ElementKind::tri3;
      } else {
        fail(path, "expected quad4 or tri3");
      }
    } else if (key == "path") {
      m.path = trim(value);
    } else if (key == "membrane_edge") {
      m.membrane_edge = trim(value);
      m.has_membrane = true;
    } else if (key == "membrane_from") {
      m.membrane_from = to_double(path, value);
    } else if (key == "membrane_to") {
      m.membrane_to = to_double(path, value);
    } else if (key == "membrane_tag") {
      m.membrane_tag = to_int(path, value);
    } else if (key == "membrane_name") {
      m.membrane_name = trim(value);
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section == "params") {
    NondimParams& p = config.params;
    if (key == "lambda") {
      p.lambda = to_double(path, value);
    } else if (key == "sc") {
      p.sc = to_double(path, value);
    } else if (key == "kappa") {
      p.kappa = to_double(path, value);
    } else if (key == "valences") {
      const auto tokens = split_ws(value);
      if (tokens.empty()) fail(path, "expected at least one valence");
      p.valences.clear();
      for (const auto& t : tokens) p.valences.push_back(to_int(path, t));
    } else if (key == "mode") {
      const std::string m = trim(value);
      if (m == "bulk") {
        p.mode = ScalingMode::Bulk;
      } else if (m == "membrane") {
        p.mode = ScalingMode::Membrane;
      } else {
        fail(path, "expected bulk or membrane");
      }
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section == "time") {
    if (key == "dt") {
      config.time.dt = to_double(path, value);
    } else if (key == "n_steps") {
      config.time.n_steps = to_int(path, value);
    } else if (key == "steady_tol") {
      config.time.steady_tol = to_double(path, value);
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section == "solver") {
    SolverSpec& s = config.solver;
    if (key == "block_tol") {
      s.block_tol = to_double(path, value);
    } else if (key == "block_max_iters") {
      s.block_max_iters = to_int(path, value);
    } else if (key == "linear") {
      const std::string m = trim(value);
      if (m == "direct") {
        s.linear = LinearSolveConfig::Method::direct_lu;
      } else if (m == "gmres") {
        s.linear = LinearSolveConfig::Method::gmres;
      } else {
        fail(path, "expected direct or gmres");
      }
    } else if (key == "rel_tol") {
      s.rel_tol = to_double(path, value);
    } else if (key == "restart") {
      s.restart = to_int(path, value);
    } else if (key == "max_iterations") {
      s.max_iterations = to_int(path, value);
    } else if (key == "preconditioner") {
      const std::string m = trim(value);
      if (m == "none") {
        s.preconditioner = LinearSolveConfig::Preconditioner::none;
      } else if (m == "jacobi") {
        s.preconditioner = LinearSolveConfig::Preconditioner::jacobi;
      } else if (m == "ilu0") {
        s.preconditioner = LinearSolveConfig::Preconditioner::ilu0;
      } else {
        fail(path, "expected none, jacobi or ilu0");
      }
    } else if (key == "newton_abs_tol") {
      s.newton_abs_tol = to_double(path, value);
    } else if (key == "newton_rel_tol") {
      s.newton_rel_tol = to_double(path, value);
    } else if (key == "newton_max_iters") {
      s.newton_max_iters = to_int(path, value);
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section == "output") {
    OutputSpec& o = config.output;
    if (key == "vtk_every") {
      o.vtk_every = to_int(path, value);
    } else if (key == "vtk_final") {
      o.vtk_final = to_bool(path, value);
    } else if (key == "flux") {
      o.flux = to_bool(path, value);
    } else if (key == "profile") {
      const auto tokens = split_ws(value);
      if (tokens.size() != 5) {
        fail(path, "expected: x0 y0 x1 y1 n_samples");
      }
      ProfileSpec prof;
      prof.x0 = to_double(path, tokens[0]);
      prof.y0 = to_double(path, tokens[1]);
      prof.x1 = to_double(path, tokens[2]);
      prof.y1 = to_double(path, tokens[3]);
      prof.n = to_int(path, tokens[4]);
      o.profile = prof;
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section == "mms") {
    MmsSpec& m = config.mms;
    if (key == "sizes") {
      const auto tokens = split_ws(value);
      if (tokens.empty()) fail(path, "expected mesh sizes");
      m.sizes.clear();
      for (const auto& t : tokens) m.sizes.push_back(to_int(path, t));
    } else if (key == "dt") {
      m.dt = to_double(path, value);
    } else if (key == "t_final") {
      m.t_final = to_double(path, value);
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  if (section.rfind("bc.", 0) == 0) {
    const std::string tag = section.substr(3);
    if (tag.empty()) fail(section, "empty boundary tag");
    ConfigBcSection& bc = config.bc[tag];
    if (key == "phi" || (key.size() >= 2 && key[0] == 'c' &&
                         key.find_first_not_of("0123456789", 1) ==
                             std::string::npos)) {
      bc.scalars[key] = parse_scalar_bc(path, value);
    } else if (key == "u") {
      if (trim(value) != "noslip") fail(path, "expected: noslip");
      if (!bc.velocity.empty()) {
        fail(path, "conflicts with explicit ux/uy entries");
      }
      bc.noslip = true;
    } else if (key == "ux" || key == "uy") {
      if (bc.noslip) fail(path, "conflicts with u = noslip");
      bc.velocity[key == "ux" ? 0 : 1] = parse_velocity_bc(path, value);
    } else {
      fail(path, "unknown key");
    }
    return;
  }

  fail(section, "unknown section");
}

/// Value-level invariants shared by parse_config and apply_override.
void validate_config(const CaseConfig& config) {
  const NondimParams& p = config.params;
  if (p.lambda <= 0.0) fail("params.lambda", "required and positive");
  if (p.sc <= 0.0) fail("params.sc", "must be positive");
  if (p.valences.empty()) fail("params.valences", "required");

  const SolverSpec& s = config.solver;
  if (s.block_tol <= 0.0) fail("solver.block_tol", "must be positive");
  if (s.block_max_iters < 1) fail("solver.block_max_iters", "must be >= 1");
  if (s.rel_tol <= 0.0) fail("solver.rel_tol", "must be positive");
  if (s.restart < 1) fail("solver.restart", "must be >= 1");
  if (s.max_iterations < 1) fail("solver.max_iterations", "must be >= 1");
  if (s.newton_abs_tol <= 0.0) fail("solver.newton_abs_tol", "must be positive");
  if (s.newton_rel_tol <= 0.0) fail("solver.newton_rel_tol", "must be positive");
  if (s.newton_max_iters < 1) fail("solver.newton_max_iters", "must be >= 1");

  if (config.type == CaseType::mms_convergence) {
    if (config.flow) fail("case.flow", "not used by mms_convergence cases");
    if (!(config.mesh == MeshSpec{})) {
      fail("mesh", "not used by mms_convergence cases");
    }
    if (!(config.time == TimeSpec{})) {
      fail("time", "not used by mms_convergence cases");
    }
    if (!config.bc.empty()) fail("bc", "not used by mms_convergence cases");
    if (!(config.output == OutputSpec{})) {
      fail("output", "not used by mms_convergence cases");
    }
    if (config.mms.sizes.size() < 2) {
      fail("mms.sizes", "required: at least two mesh sizes");
    }
    for (int n : config.mms.sizes) {
      if (n < 2) fail("mms.sizes", "mesh sizes must be >= 2");
    }
    if (config.mms.dt <= 0.0) fail("mms.dt", "must be positive");
    if (config.mms.t_final <= 0.0) fail("mms.t_final", "must be positive");
    if (p.species_count() != 2) {
      fail("params.valences", "mms_convergence needs exactly two species");
    }
    return;
  }

  // Transient case.
  const MeshSpec& m = config.mesh;
  if (m.generator.empty()) fail("mesh.generator", "required");
  if (m.generator == "interval") {
    if (m.n < 1) fail("mesh.n", "required and >= 1");
    if (!(m.x1 > m.x0)) fail("mesh.x1", "must exceed mesh.x0");
    if (m.ratio <= 0.0) fail("mesh.ratio", "must be positive");
    if (config.flow) fail("case.flow", "flow needs a 2D mesh");
  } else if (m.generator == "rect") {
    if (m.nx < 1) fail("mesh.nx", "required and >= 1");
    if (m.ny < 1) fail("mesh.ny", "required and >= 1");
    if (m.lx <= 0.0) fail("mesh.lx", "must be positive");
    if (m.ly <= 0.0) fail("mesh.ly", "must be positive");
    if (m.y_ratio <= 0.0) fail("mesh.y_ratio", "must be positive");
  } else if (m.generator == "msh") {
    if (m.path.empty()) fail("mesh.path", "required");
  }
  if (m.has_membrane) {
    if (m.membrane_edge.empty()) fail("mesh.membrane_edge", "required");
    if (!(m.membrane_from < m.membrane_to)) {
      fail("mesh.membrane_from", "must be below mesh.membrane_to");
    }
  }

  if (config.time.dt <= 0.0) fail("time.dt", "required and positive");
  if (config.time.n_steps < 1) fail("time.n_steps", "required and >= 1");
  if (config.time.steady_tol < 0.0) {
    fail("time.steady_tol", "must be non-negative");
  }

  if (config.bc.empty()) fail("bc", "at least one bc.<tag> section required");

  const OutputSpec& o = config.output;
  if (o.vtk_every < 0) fail("output.vtk_every", "must be non-negative");
  if (o.profile && o.profile->n < 2) {
    fail("output.profile", "needs at least two samples");
  }

  if (!(config.mms == MmsSpec{})) {
    fail("mms", "only used by mms_convergence cases");
  }
}

/// The per-generator key whitelists, enforced with the seen-key set.
void validate_mesh_keys(const std::set<std::string>& seen,
                        const std::string& generator) {
  static const std::set<std::string> interval_keys = {
      "mesh.generator", "mesh.n", "mesh.x0", "mesh.x1", "mesh.ratio"};
  static const std::set<std::string> rect_keys = {
      "mesh.generator", "mesh.nx", "mesh.ny", "mesh.lx", "mesh.ly",
      "mesh.y_ratio", "mesh.element", "mesh.membrane_edge",
      "mesh.membrane_from", "mesh.membrane_to", "mesh.membrane_tag",
      "mesh.membrane_name"};
  static const std::set<std::string> msh_keys = {
      "mesh.generator", "mesh.path", "mesh.membrane_edge", "mesh.membrane_from",
      "mesh.membrane_to", "mesh.membrane_tag", "mesh.membrane_name"};

  const std::set<std::string>* allowed = nullptr;
  if (generator == "interval") allowed = &interval_keys;
  if (generator == "rect") allowed = &rect_keys;
  if (generator == "msh") allowed = &msh_keys;
  if (allowed == nullptr) return;  // caught by validate_config

  for (const auto& key : seen) {
    if (key.rfind("mesh.", 0) == 0 && allowed->count(key) == 0) {
      fail(key, "not used by the " + generator + " generator");
    }
  }
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_datum(const ConfigDatum& d) {
  if (d.ax == 0.0 && d.ay == 0.0) return fmt_double(d.a0);
  return "linear " + fmt_double(d.a0) + " " + fmt_double(d.ax) + " " +
         fmt_double(d.ay);
}

std::string render_scalar_bc(const ConfigScalarBc& bc) {
  switch (bc.kind) {
    case ScalarBcKind::zero_flux:
      return "zero_flux";
    case ScalarBcKind::strong:
      return "strong " + render_datum(bc.datum);
    case ScalarBcKind::weak:
      return "weak " + render_datum(bc.datum) + " " + fmt_double(bc.penalty);
  }
  return "";
}

}  // namespace

CaseConfig parse_config(const std::string& text) {
  CaseConfig config;
  config.params.valences = {1, -1};

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("line " + std::to_string(line_no), "unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        fail("line " + std::to_string(line_no), "empty section name");
      }
      const std::string marker = "[" + section + "]";
      if (!seen.insert(marker).second) {
        fail(section, "duplicate section");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("line " + std::to_string(line_no),
           "expected `key = value` or a [section] header");
    }
    if (section.empty()) {
      fail("line " + std::to_string(line_no),
           "key before any [section] header");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      fail("line " + std::to_string(line_no), "empty key");
    }
    const std::string path = section + "." + key;
    if (!seen.insert(path).second) fail(path, "duplicate key");

    apply_key(config, section, key, value);
  }

  validate_config(config);
  if (config.type == CaseType::transient) {
    validate_mesh_keys(seen, config.mesh.generator);
  }
  return config;
}

CaseConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string render_config(const CaseConfig& config) {
  std::ostringstream out;
  const bool transient = config.type == CaseType::transient;

  out << "[case]\n";
  if (!config.name.empty()) out << "name = " << config.name << "\n";
  out << "type = " << (transient ? "transient" : "mms_convergence") << "\n";
  if (transient) out << "flow = " << (config.flow ? "true" : "false") << "\n";

  out << "\n[params]\n";
  out << "lambda = " << fmt_double(config.params.lambda) << "\n";
  out << "sc = " << fmt_double(config.params.sc) << "\n";
  out << "kappa = " << fmt_double(config.params.kappa) << "\n";
  out << "valences =";
  for (int z : config.params.valences) out << " " << z;
  out << "\n";
  out << "mode = "
      << (config.params.mode == ScalingMode::Bulk ? "bulk" : "membrane")
      << "\n";

  if (!transient) {
    out << "\n[mms]\n";
    out << "sizes =";
    for (int n : config.mms.sizes) out << " " << n;
    out << "\n";
    out << "dt = " << fmt_double(config.mms.dt) << "\n";
    out << "t_final = " << fmt_double(config.mms.t_final) << "\n";
    return out.str();
  }

  const MeshSpec& m = config.mesh;
  out << "\n[mesh]\n";
  out << "generator = " << m.generator << "\n";
  if (m.generator == "interval") {
    out << "n = " << m.n << "\n";
    out << "x0 = " << fmt_double(m.x0) << "\n";
    out << "x1 = " << fmt_double(m.x1) << "\n";
    out << "ratio = " << fmt_double(m.ratio) << "\n";
  } else if (m.generator == "rect") {
    out << "nx = " << m.nx << "\n";
    out << "ny = " << m.ny << "\n";
    out << "lx = " << fmt_double(m.lx) << "\n";
    out << "ly = " << fmt_double(m.ly) << "\n";
    out << "element = "
        << (m.element == ElementKind::quad4 ? "quad4" : "tri3") << "\n";
    out << "y_ratio = " << fmt_double(m.y_ratio) << "\n";
  } else {
    out << "path = " << m.path << "\n";
  }
  if (m.has_membrane) {
    out << "membrane_edge = " << m.membrane_edge << "\n";
    out << "membrane_from = " << fmt_double(m.membrane_from) << "\n";
    out << "membrane_to = " << fmt_double(m.membrane_to) << "\n";
    out << "membrane_tag = " << m.membrane_tag << "\n";
    out << "membrane_name = " << m.membrane_name << "\n";
  }

  for (const auto& [suffix, section] : config.bc) {
    out << "\n[bc." << suffix << "]\n";
    for (const auto& [key, bc] : section.scalars) {
      out << key << " = " << render_scalar_bc(bc) << "\n";
    }
    if (section.noslip) out << "u = noslip\n";
    for (const auto& [comp, bc] : section.velocity) {
      out << (comp == 0 ? "ux" : "uy") << " = "
          << (bc.strong ? "strong " + render_datum(bc.datum)
                        : std::string("natural"))
          << "\n";
    }
  }

  out << "\n[time]\n";
  out << "dt = " << fmt_double(config.time.dt) << "\n";
  out << "n_steps = " << config.time.n_steps << "\n";
  out << "steady_tol = " << fmt_double(config.time.steady_tol) << "\n";

  const SolverSpec& s = config.solver;
  out << "\n[solver]\n";
  out << "block_tol = " << fmt_double(s.block_tol) << "\n";
  out << "block_max_iters = " << s.block_max_iters << "\n";
  out << "linear = "
      << (s.linear == LinearSolveConfig::Method::direct_lu ? "direct"
                                                           : "gmres")
      << "\n";
  out << "rel_tol = " << fmt_double(s.rel_tol) << "\n";
  out << "restart = " << s.restart << "\n";
  out << "max_iterations = " << s.max_iterations << "\n";
  const char* pc = "ilu0";
  if (s.preconditioner == LinearSolveConfig::Preconditioner::none) pc = "none";
  if (s.preconditioner == LinearSolveConfig::Preconditioner::jacobi) {
    pc = "jacobi";
  }
  out << "preconditioner = " << pc << "\n";
  out << "newton_abs_tol = " << fmt_double(s.newton_abs_tol) << "\n";
  out << "newton_rel_tol = " << fmt_double(s.newton_rel_tol) << "\n";
  out << "newton_max_iters = " << s.newton_max_iters << "\n";

  const OutputSpec& o = config.output;
  out << "\n[output]\n";
  out << "vtk_every = " << o.vtk_every << "\n";
  out << "vtk_final = " << (o.vtk_final ? "true" : "false") << "\n";
  out << "flux = " << (o.flux ? "true" : "false") << "\n";
  if (o.profile) {
    out << "profile = " << fmt_double(o.profile->x0) << " "
        << fmt_double(o.profile->y0) << " " << fmt_double(o.profile->x1) << " "
        << fmt_double(o.profile->y1) << " " << o.profile->n << "\n";
  }

  return out.str();
}

Mesh build_configured_mesh(const MeshSpec& spec) {
  Mesh mesh;
  if (spec.generator == "interval") {
    mesh = build_interval_mesh(spec.n, spec.x0, spec.x1, spec.ratio);
  } else if (spec.generator == "rect") {
    mesh = build_rect_mesh(spec.nx, spec.ny, spec.lx, spec.ly, spec.element,
                           spec.y_ratio);
  } else if (spec.generator == "msh") {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw ConfigError("mesh.path: cannot open " + spec.path);
    mesh = import_msh(in);
  } else {
    throw ConfigError("mesh.generator: unknown generator " + spec.generator);
  }

  if (spec.has_membrane) {
    int edge = 0;
    const std::string& e = spec.membrane_edge;
    if (!e.empty() && e.find_first_not_of("0123456789") == std::string::npos) {
      edge = std::stoi(e);
    } else {
      edge = -1;
      for (const auto& [id, name] : mesh.tag_names) {
        if (name == e) {
          edge = id;
          break;
        }
      }
      if (edge < 0) {
        throw ConfigError("mesh.membrane_edge: unknown tag name " + e);
      }
    }
    const int n = retag_edge_segment(mesh, edge, spec.membrane_from,
                                     spec.membrane_to, spec.membrane_tag,
                                     spec.membrane_name);
    if (n == 0) {
      throw ConfigError(
          "mesh.membrane_from: no boundary facets inside the segment");
    }
  }
  return mesh;
}

namespace {

int resolve_tag(const std::string& s, const Mesh& mesh) {
  if (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos) {
    const int id = std::stoi(s);
    if (!mesh.has_tag(id)) {
      fail("bc." + s, "mesh has no boundary facets with this tag");
    }
    return id;
  }
  for (const auto& [id, name] : mesh.tag_names) {
    if (name == s && mesh.has_tag(id)) return id;
  }
  fail("bc." + s, "unknown boundary tag");
}

}  // namespace

BoundaryTable build_boundary_table(const CaseConfig& config, const Mesh& mesh) {
  BoundaryTable table;
  for (const auto& [suffix, section] : config.bc) {
    const int tag = resolve_tag(suffix, mesh);
    for (const auto& [key, bc] : section.scalars) {
      ScalarVar var = ScalarVar::potential();
      if (key != "phi") {
        const int i = std::stoi(key.substr(1));
        if (i >= config.params.species_count()) {
          fail("bc." + suffix + "." + key,
               "species index out of range (have " +
                   std::to_string(config.params.species_count()) +
                   " species)");
        }
        var = ScalarVar::concentration(i);
      }
      table.set_scalar(tag, var, {bc.kind, bc.datum.datum(), bc.penalty});
    }
    if (section.noslip) table.set_velocity_noslip(tag);
    for (const auto& [comp, bc] : section.velocity) {
      table.set_velocity(tag, comp, {bc.strong, bc.datum.datum()});
    }
  }
  try {
    table.validate_scalar_coverage(mesh, config.params.species_count());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return table;
}

Problem make_problem(const CaseConfig& config, const Mesh& mesh) {
  Problem problem;
  problem.mesh = &mesh;
  problem.params = config.params;
  problem.coeffs = equation_coefficients(config.params);
  problem.bc = build_boundary_table(config, mesh);
  problem.solve_flow = config.flow;
  if (config.flow && mesh.dim != 2) {
    throw ConfigError("case.flow: flow needs a 2D mesh");
  }
  return problem;
}

SolverSuite make_solver_suite(const SolverSpec& spec) {
  SolverSuite suite;
  LinearSolveConfig lin;
  lin.method = spec.linear;
  lin.rel_tol = spec.rel_tol;
  lin.restart = spec.restart;
  lin.max_iterations = spec.max_iterations;
  lin.preconditioner = spec.preconditioner;
  suite.poisson = lin;
  suite.np = lin;
  suite.ns_linear = lin;
  suite.ns_newton.abs_tol = spec.newton_abs_tol;
  suite.ns_newton.rel_tol = spec.newton_rel_tol;
  suite.ns_newton.max_iterations = spec.newton_max_iters;
  return suite;
}

TransientConfig make_transient_config(const CaseConfig& config) {
  TransientConfig cfg;
  cfg.dt = config.time.dt;
  cfg.n_steps = config.time.n_steps;
  cfg.steady_tol = config.time.steady_tol;
  cfg.block.tol = config.solver.block_tol;
  cfg.block.max_iterations = config.solver.block_max_iters;
  return cfg;
}

void apply_override(CaseConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override \"" + assignment +
                      "\": expected section.key=value");
  }
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw ConfigError("override \"" + assignment +
                      "\": expected section.key=value");
  }
  apply_key(config, path.substr(0, dot), path.substr(dot + 1), value);
  validate_config(config);
}

std::vector<CaseInfo> list_cases() {
  return {
      {"mms",
       "Manufactured-solution convergence study on the unit square; verifies "
       "second-order accuracy of velocity, concentrations and potential."},
      {"eof",
       "Electroosmotic flow in a 2D channel driven by a wall zeta potential "
       "and an axial field; plug velocity compared against the analytic "
       "reference 0.0429."},
      {"depletion1d",
       "1D ion depletion at a permselective membrane with weakly imposed "
       "concentration; weak-side outflux compared against the strong-side "
       "influx."},
      {"icp2d",
       "Ion concentration polarization at a permselective membrane segment "
       "of a 2D half-channel (ion transport only); membrane flux under mesh "
       "refinement."},
      {"instability2d",
       "Qualitative smoke case: truncated electroconvective-instability run "
       "at large applied voltage on a wall-refined 1280x180 mesh."},
  };
}

std::string find_case_file(const std::string& name) {
  namespace fs = std::filesystem;
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("PNPFEM_CASES")) dirs.emplace_back(env);
  dirs.emplace_back("cases");
  dirs.emplace_back("../cases");
#ifdef PNPFEM_CASE_DIR
  dirs.emplace_back(PNPFEM_CASE_DIR);
#endif
  for (const auto& dir : dirs) {
    const fs::path candidate = dir / (name + ".cfg");
    std::error_code ec;
    if (fs::exists(candidate, ec)) return candidate.string();
  }
  throw ConfigError("case \"" + name +
                    "\": no config file found (searched $PNPFEM_CASES, "
                    "./cases, ../cases and the build-time case directory)");
}

}  // namespace pnpfem
