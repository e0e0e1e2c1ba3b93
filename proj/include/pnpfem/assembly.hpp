#pragma once

#include "pnpfem/bc.hpp"
#include "pnpfem/fields.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"
#include "pnpfem/sparse.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace pnpfem {

/// Stabilization coefficient
///   τ = [ (2/dt)² + (2·speed/h)² + (4·diffusivity/h²)² ]^{-1/2},
/// the reciprocal-root combination of the transient, advective and diffusive
/// element time scales. Requires h_el > 0, dt > 0, diffusivity ≥ 0.
double tau_supg(double h_el, double effective_speed, double dt,
                double diffusivity);

/// Sparsity patterns shared across repeated assemblies on one mesh:
/// one scalar pattern (node-indexed) reused by the potential and every
/// species, and one monolithic velocity/pressure pattern with interleaved
/// dofs (3·node + component, components 0/1 = velocity, 2 = pressure).
/// The flow pattern is only built for 2D meshes.
struct SystemCache {
  std::shared_ptr<const CsrPattern> scalar;
  std::shared_ptr<const CsrPattern> ns;
};

/// Build the shared patterns; with_flow = false skips the (larger) flow
/// pattern for pure ion-transport problems.
SystemCache make_system_cache(const Mesh& mesh, bool with_flow = true);

/// Monolithic flow dof index.
inline int ns_dof(int node, int comp) { return 3 * node + comp; }

/// Optional analytic volumetric source f(t, x, y), used by the manufactured-
/// solution drivers; a default-constructed (empty) function means zero.
using ScalarForcing = std::function<double(double, double, double)>;
using VectorForcing = std::function<std::array<double, 2>(double, double, double)>;

/// Assemble the potential system at the current block iterate:
///   poisson_factor·(∇q, ∇φ) − weak-Dirichlet facet terms
///     = (q, ρ_e) + (q, forcing)
/// with ρ_e = Σ z_i c_i taken from `state`, weak facets handled by the
/// Nitsche terms, and strong Dirichlet rows eliminated symmetrically
/// afterward. Boundary data and the forcing are evaluated at state.t.
LinearSystem assemble_poisson(const Mesh& mesh, const SolutionState& state,
                              const NondimParams& params,
                              const EquationCoefficients& coeffs,
                              const BoundaryTable& bc, const SystemCache& cache,
                              const ScalarForcing& forcing = {});

/// Assemble the backward-Euler system for species i, linear in c_i^{n+1}:
///   (q, (c − cⁿ)/dt) + a·(q, u·∇c) + d·(∇q, ∇c + z c ∇φ)
///     + Σ_e τ_e (a(u + z∇φ)·∇q, (c − cⁿ)/dt + a u·∇c)_e
///     − weak-Dirichlet facet terms = (q, forcing)
/// with a/d the advection/diffusion factors, φ and u frozen from `state`
/// (block iteration), cⁿ from `prev`, τ_e from tau_supg with the
/// effective speed a·|u + z∇φ| at the element centroid and h_el the element
/// diameter. Strong Dirichlet rows are eliminated symmetrically afterward.
/// Boundary data and the forcing are evaluated at state.t. Requires dt > 0.
LinearSystem assemble_nernst_planck(const Mesh& mesh, int species,
                                    const SolutionState& state,
                                    const SolutionState& prev, double dt,
                                    const NondimParams& params,
                                    const EquationCoefficients& coeffs,
                                    const BoundaryTable& bc,
                                    const SystemCache& cache,
                                    const ScalarForcing& forcing = {});

/// Extra controls for the flow assembly.
struct NsOptions {
  /// Pressure gauge: when set, the pressure dof of node 0 is pinned to this
  /// value; when unset, it is pinned to 0 exactly when no boundary segment
  /// leaves its normal velocity component natural (otherwise the do-nothing
  /// condition anchors the pressure level and no pin is applied).
  std::optional<double> pressure_pin;

  /// State at which the stabilization coefficient τ and the stabilization
  /// advection velocity ū are frozen (typically the state entering the block
  /// iterate). Freezing keeps the returned Jacobian the exact derivative of
  /// the returned residual. nullptr freezes at `prev`.
  const SolutionState* stab_state = nullptr;

  /// Frozen charge state adding the electric body force
  /// −body_force_factor·ρ_e·∇φ; nullptr disables it.
  const SolutionState* charge_state = nullptr;

  /// Additional analytic body force (manufactured solutions).
  VectorForcing extra_forcing;
};

/// Residual and exact Jacobian of the stabilized monolithic flow system.
struct NsAssembly {
  /// Full residual, including constrained rows in the form (value − datum) so
  /// the Jacobian is the exact derivative of the residual everywhere.
  std::vector<double> residual;
  /// Newton step system J·δ = rhs with rhs = −residual and constrained rows
  /// replaced by identity.
  LinearSystem newton;
};

/// Assemble the stabilized momentum + continuity residual at `guess` and its
/// Jacobian, with backward-Euler time terms against `prev`:
///   momentum: α_t(w,(u−uⁿ)/dt) + α_c(w,u·∇u) + (∇w,∇u) − (∇·w,p) − (w,f)
///             + Σ_e τ_e (α_c ū·∇w, r_M)_e
///   continuity: (q,∇·u) + Σ_e τ_e (∇q, r_M)_e
/// where α_t/α_c are the flow time/convection factors, f collects the electric
/// body force and extra forcing, and r_M = α_t(u−uⁿ)/dt + α_c ū·∇u + ∇p − f is
/// the strong momentum residual without the elementwise-zero viscous term.
/// τ_e = tau_supg(diameter, α_c·|ū|, dt/α_t, 1) with ū from the frozen
/// stabilization state. The convection Jacobian carries both derivative
/// terms (u·∇δu and δu·∇u). Strong velocity rows (and the pressure pin, when
/// engaged) become r = value − datum with identity Jacobian rows.
/// Requires a 2D mesh and dt > 0.
NsAssembly assemble_ns_residual_jacobian(const Mesh& mesh,
                                         const SolutionState& guess,
                                         const SolutionState& prev, double dt,
                                         const NondimParams& params,
                                         const EquationCoefficients& coeffs,
                                         const BoundaryTable& bc,
                                         const SystemCache& cache,
                                         const NsOptions& opts = {});

/// Residual of the same stabilized system without assembling the Jacobian
/// (used by the Newton line search).
std::vector<double> assemble_ns_residual(const Mesh& mesh,
                                         const SolutionState& guess,
                                         const SolutionState& prev, double dt,
                                         const NondimParams& params,
                                         const EquationCoefficients& coeffs,
                                         const BoundaryTable& bc,
                                         const NsOptions& opts = {});

/// Constrain `dofs` to `values`: each constrained row becomes the identity
/// with rhs = value, and the corresponding column entries move to the rhs so
/// a symmetric matrix stays symmetric.
void apply_strong_dirichlet(LinearSystem& system, const std::vector<int>& dofs,
                            const std::vector<double>& values);

/// Strong-Dirichlet node set of a scalar variable: nodes of every facet whose
/// tag carries a strong condition for `var`, with data evaluated at (t, x, y).
void collect_strong_scalar_nodes(const Mesh& mesh, const BoundaryTable& bc,
                                 ScalarVar var, double t,
                                 std::vector<int>& dofs,
                                 std::vector<double>& values);

}  // namespace pnpfem
