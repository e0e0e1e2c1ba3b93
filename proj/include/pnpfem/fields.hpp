#pragma once

#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"

#include <array>
#include <string>
#include <vector>

namespace pnpfem {

/// Nodal solution fields at one time level. Every array has mesh-node length;
/// vel[1] is unused (empty) on 1D meshes.
struct SolutionState {
  std::vector<std::vector<double>> c;  ///< concentrations, one array per species
  std::vector<double> phi;             ///< electric potential
  std::array<std::vector<double>, 2> vel;  ///< velocity components
  std::vector<double> p;               ///< pressure
  double t = 0.0;

  int species_count() const { return static_cast<int>(c.size()); }
};

/// Zero-velocity, zero-potential, unit-concentration state sized for a mesh.
SolutionState make_state(const Mesh& mesh, int n_species,
                         double c_init = 1.0);

/// A nodal scalar derived from the solution.
struct DerivedField {
  std::vector<double> values;
  std::string label;  ///< "charge_density", "ionic_strength" or "flux_component"
};

/// Normalized charge density rho_e = sum_i z_i c_i (nodal).
DerivedField charge_density(const SolutionState& state, const NondimParams& params);

/// Ionic strength I = 1/2 sum_i c_i z_i^2 (nodal).
DerivedField ionic_strength(const SolutionState& state, const NondimParams& params);

/// Species flux j_i = -grad c_i - z_i c_i grad phi + u c_i evaluated at a
/// reference point of an element, using the element-local P1 gradients.
std::array<double, 2> species_flux_at(const SolutionState& state,
                                      const NondimParams& params,
                                      const Mesh& mesh, int element,
                                      const std::array<double, 2>& ref_point,
                                      int species);

}  // namespace pnpfem
