#pragma once

#include "pnpfem/bc.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"
#include "pnpfem/solvers.hpp"
#include "pnpfem/stepping.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnpfem {

/// Invalid or inconsistent case configuration. The message is path-qualified
/// ("time.dt", "bc.left.c0", ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CaseType { transient, mms_convergence };

/// [mesh] section: one of the structured generators or an MSH import, plus an
/// optional re-tag of an edge segment (carves a membrane out of a generated
/// edge).
struct MeshSpec {
  std::string generator;  ///< "interval", "rect" or "msh"
  // interval
  int n = 0;
  double x0 = 0.0, x1 = 1.0, ratio = 1.0;
  // rect
  int nx = 0, ny = 0;
  double lx = 1.0, ly = 1.0, y_ratio = 1.0;
  ElementKind element = ElementKind::quad4;
  // msh
  std::string path;
  // optional membrane segment re-tag
  bool has_membrane = false;
  std::string membrane_edge;  ///< source edge, by tag name or number
  double membrane_from = 0.0, membrane_to = 0.0;
  int membrane_tag = 5;
  std::string membrane_name = "membrane";

  bool operator==(const MeshSpec&) const = default;
};

/// Affine boundary datum a0 + ax·x + ay·y as written in config files.
struct ConfigDatum {
  double a0 = 0.0, ax = 0.0, ay = 0.0;
  bool operator==(const ConfigDatum&) const = default;

  BoundaryDatum datum() const { return {a0, ax, ay, nullptr}; }
};

struct ConfigScalarBc {
  ScalarBcKind kind = ScalarBcKind::zero_flux;
  ConfigDatum datum;
  double penalty = 4.0;  ///< Nitsche constant, weak conditions only
  bool operator==(const ConfigScalarBc&) const = default;
};

struct ConfigVelocityBc {
  bool strong = false;  ///< false = explicit `natural`
  ConfigDatum datum;
  bool operator==(const ConfigVelocityBc&) const = default;
};

/// One [bc.<tag>] section. Scalar keys: "c0".."c<N-1>" and "phi". Velocity:
/// `u = noslip` shorthand, or per-component `ux`/`uy` entries; components
/// without an entry are natural (do-nothing).
struct ConfigBcSection {
  std::map<std::string, ConfigScalarBc> scalars;
  std::map<int, ConfigVelocityBc> velocity;
  bool noslip = false;
  bool operator==(const ConfigBcSection&) const = default;
};

struct TimeSpec {
  double dt = 0.0;
  int n_steps = 0;
  double steady_tol = 0.0;  ///< 0 disables steady detection
  bool operator==(const TimeSpec&) const = default;
};

struct SolverSpec {
  double block_tol = 1e-3;
  int block_max_iters = 100;
  LinearSolveConfig::Method linear = LinearSolveConfig::Method::direct_lu;
  double rel_tol = 1e-10;
  int restart = 100;
  int max_iterations = 5000;
  LinearSolveConfig::Preconditioner preconditioner =
      LinearSolveConfig::Preconditioner::ilu0;
  double newton_abs_tol = 1e-8;
  double newton_rel_tol = 1e-6;
  int newton_max_iters = 50;
  bool operator==(const SolverSpec&) const = default;
};

/// Line profile sampled into profile.csv: n evenly spaced points from
/// (x0,y0) to (x1,y1).
struct ProfileSpec {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  int n = 0;
  bool operator==(const ProfileSpec&) const = default;
};

struct OutputSpec {
  int vtk_every = 0;       ///< snapshot every N steps (0 = none)
  bool vtk_final = false;  ///< snapshot of the final state
  bool flux = true;        ///< write flux.csv boundary-flux report
  std::optional<ProfileSpec> profile;
  bool operator==(const OutputSpec&) const = default;
};

/// [mms] section for CaseType::mms_convergence.
struct MmsSpec {
  std::vector<int> sizes;  ///< n for the n×n mesh sequence
  double dt = 1e-4;
  double t_final = 0.01;
  bool operator==(const MmsSpec&) const = default;
};

struct CaseConfig {
  std::string name;
  CaseType type = CaseType::transient;
  bool flow = false;
  MeshSpec mesh;
  NondimParams params;
  std::map<std::string, ConfigBcSection> bc;  ///< key = tag name or number
  TimeSpec time;
  SolverSpec solver;
  OutputSpec output;
  MmsSpec mms;
  bool operator==(const CaseConfig&) const = default;
};

/// Parse a config document (INI-style sections, `key = value`, `#` comments).
/// Strict: unknown sections or keys, malformed values, and missing mandatory
/// keys all throw ConfigError naming the offending path.
CaseConfig parse_config(const std::string& text);

/// parse_config over a file's contents; the filename prefixes error messages.
CaseConfig parse_config_file(const std::string& path);

/// Render a config as a document that parses back to an identical CaseConfig
/// (defaults are materialized explicitly).
std::string render_config(const CaseConfig& config);

/// Apply one `--override section.key=value` to a parsed config, routed
/// through the same strict key handling as parse_config.
void apply_override(CaseConfig& config, const std::string& assignment);

/// Build the mesh described by [mesh], including the membrane re-tag.
Mesh build_configured_mesh(const MeshSpec& spec);

/// Resolve the [bc.*] sections against the mesh tags into a BoundaryTable
/// (ConfigError on unknown tag names or variables) and validate coverage.
BoundaryTable build_boundary_table(const CaseConfig& config, const Mesh& mesh);

/// Assemble the full Problem for a transient case.
Problem make_problem(const CaseConfig& config, const Mesh& mesh);

SolverSuite make_solver_suite(const SolverSpec& spec);

TransientConfig make_transient_config(const CaseConfig& config);

/// Built-in case library: name + one-line description.
struct CaseInfo {
  std::string name;
  std::string description;
};

/// The five shipped cases, in presentation order.
std::vector<CaseInfo> list_cases();

/// Locate a shipped case config file: $PNPFEM_CASES, else ./cases, else
/// ../cases. Throws ConfigError when the file cannot be found.
std::string find_case_file(const std::string& name);

}  // namespace pnpfem
