#pragma once

#include "pnpfem/bc.hpp"
#include "pnpfem/fields.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/nitsche.hpp"
#include "pnpfem/scales.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pnpfem {

enum class FluxMode { strong, weak };

/// Boundary flux of one species through one tagged boundary segment,
/// evaluated from the variational boundary functional with unit test
/// function:
///   consistency = −∮ d·(∇c_i·n + z_i c_i ∇φ·n),
///   penalty     = +∮ (C/h_el)(c_i − g)         (weak mode only),
///   total       = consistency + penalty,
/// with d the NP diffusion factor (1 in bulk scaling) and one-sided facet
/// gradients from the owning elements.
struct FluxEntry {
  int tag = 0;
  int species = 0;
  FluxMode mode = FluxMode::strong;
  double consistency_term = 0.0;
  double penalty_term = 0.0;
  double total = 0.0;
};

/// Per-(tag, species) flux table of one state snapshot.
struct FluxReport {
  std::vector<FluxEntry> entries;

  const FluxEntry* find(int tag, int species) const;
};

/// Evaluate the flux of species i through the facets of `tag`. Weak mode
/// requires the weak datum (g and C); strong mode keeps only the consistency
/// term. Throws std::invalid_argument when the tag has no facets or weak mode
/// lacks a datum.
FluxEntry boundary_flux(const Mesh& mesh, const SolutionState& state,
                        const NondimParams& params,
                        const EquationCoefficients& coeffs, int tag,
                        int species, FluxMode mode,
                        const WeakDirichlet* weak = nullptr);

/// Net boundary flux per species, summed over every boundary tag. The mode
/// per (tag, species) follows the boundary table: weak conditions use the
/// weak-mode flux (with their datum and penalty constant), everything else
/// the strong-mode flux. Throws std::invalid_argument when some boundary tag
/// lacks a condition for some species.
std::vector<double> conservation_audit(const Mesh& mesh,
                                       const SolutionState& state,
                                       const NondimParams& params,
                                       const EquationCoefficients& coeffs,
                                       const BoundaryTable& bc);

/// Full per-tag, per-species flux table with modes from the boundary table.
FluxReport flux_report(const Mesh& mesh, const SolutionState& state,
                       const NondimParams& params,
                       const EquationCoefficients& coeffs,
                       const BoundaryTable& bc);

/// ‖field − exact‖_L² by high-accuracy element quadrature; `exact` is
/// evaluated at physical points (x, y).
double l2_error(const Mesh& mesh, const std::vector<double>& field,
                const std::function<double(double, double)>& exact);

/// Locate the element containing (x, y) and its reference coordinates.
/// Returns element index or -1 when outside the mesh (tolerance: 1e-10
/// reference-domain slack).
int locate_point(const Mesh& mesh, double x, double y,
                 std::array<double, 2>& ref);

/// Interpolate a nodal field at (x, y); throws std::invalid_argument when the
/// point lies outside the mesh.
double sample_field(const Mesh& mesh, const std::vector<double>& field,
                    double x, double y);

/// Legacy-format VTK writer (ASCII, DATASET UNSTRUCTURED_GRID, POINT_DATA).
/// Scalars and 2-component vectors (z written as 0) are emitted in map order.
/// All numbers use 17 significant digits so coordinates round-trip exactly.
/// Throws std::runtime_error on I/O failure.
void write_vtk(
    const Mesh& mesh, const std::string& path,
    const std::map<std::string, const std::vector<double>*>& scalars,
    const std::map<std::string, std::array<const std::vector<double>*, 2>>&
        vectors = {});

/// Sample nodal fields along the segment a→b at n_samples evenly spaced
/// points (endpoints included) and write CSV: header "x,y,<names>", '.'
/// decimal separator, ',' field separator, LF line endings, 17 significant
/// digits. Throws std::invalid_argument when a sample falls outside the mesh
/// and std::runtime_error on I/O failure.
void write_csv_profile(
    const Mesh& mesh, const std::array<double, 2>& a,
    const std::array<double, 2>& b, int n_samples,
    const std::vector<std::pair<std::string, const std::vector<double>*>>&
        fields,
    const std::string& path);

}  // namespace pnpfem
