#pragma once

#include "pnpfem/bc.hpp"
#include "pnpfem/fields.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"

#include <array>

namespace pnpfem {

/// Weak Dirichlet condition data for one facet integral.
struct WeakDirichlet {
  BoundaryDatum g;       ///< boundary datum (possibly spatially varying)
  double penalty = 4.0;  ///< penalty constant C (> 0)
};

/// Element-local matrix/rhs contribution of one boundary facet.
struct FacetBlock {
  std::array<int, 4> nodes{};  ///< global node ids of the owning element
  int nn = 0;
  double K[4][4] = {};
  double F[4] = {};
};

/// The three weak-Dirichlet boundary terms (consistency, adjoint consistency,
/// penalty) for a scalar variable v with datum g on one facet:
///
///   -(q, Fl(v)·n)  -(A(q)·n, v - g)  +(C/h_el)(q, v - g)
///
/// where for phi: Fl(v) = 2Λ²∇φ, A(q) = 2Λ²∇q; for species i:
/// Fl(v) = d·(∇c_i + z_i c_i ∇φ), A(q) = d·∇q with d the NP diffusion factor
/// and φ taken from `state` as frozen data (block iteration). Unknown-
/// dependent parts land in K, datum-dependent parts in F, with the system
/// convention K v = F. The datum is evaluated at time state.t.
FacetBlock nitsche_scalar_facet(const Mesh& mesh, const BoundaryFacet& facet,
                                ScalarVar var, const SolutionState& state,
                                const NondimParams& params,
                                const EquationCoefficients& coeffs,
                                const WeakDirichlet& wd);

}  // namespace pnpfem
