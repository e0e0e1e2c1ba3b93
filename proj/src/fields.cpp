#include "pnpfem/fields.hpp"

#include "pnpfem/element.hpp"

#include <stdexcept>

namespace pnpfem {

SolutionState make_state(const Mesh& mesh, int n_species, double c_init) {
  if (n_species < 1) throw std::invalid_argument("make_state: need at least one species");
  SolutionState s;
  const size_t n = mesh.nodes.size();
  s.c.assign(n_species, std::vector<double>(n, c_init));
  s.phi.assign(n, 0.0);
  s.vel[0].assign(n, 0.0);
  if (mesh.dim >= 2) s.vel[1].assign(n, 0.0);
  s.p.assign(n, 0.0);
  return s;
}

DerivedField charge_density(const SolutionState& state, const NondimParams& params) {
  if (params.species_count() != state.species_count()) {
    throw std::invalid_argument("charge_density: species count mismatch");
  }
  DerivedField f;
  f.label = "charge_density";
  f.values.assign(state.phi.size(), 0.0);
  for (int i = 0; i < state.species_count(); ++i) {
    const double z = params.valences[i];
    for (size_t k = 0; k < f.values.size(); ++k) f.values[k] += z * state.c[i][k];
  }
  return f;
}

DerivedField ionic_strength(const SolutionState& state, const NondimParams& params) {
  if (params.species_count() != state.species_count()) {
    throw std::invalid_argument("ionic_strength: species count mismatch");
  }
  DerivedField f;
  f.label = "ionic_strength";
  f.values.assign(state.phi.size(), 0.0);
  for (int i = 0; i < state.species_count(); ++i) {
    const double z2 = static_cast<double>(params.valences[i]) * params.valences[i];
    for (size_t k = 0; k < f.values.size(); ++k) {
      f.values[k] += 0.5 * z2 * state.c[i][k];
    }
  }
  return f;
}

std::array<double, 2> species_flux_at(const SolutionState& state,
                                      const NondimParams& params,
                                      const Mesh& mesh, int element,
                                      const std::array<double, 2>& ref_point,
                                      int species) {
  const Element& el = mesh.elements[element];
  const MappedBasis mb = map_basis(mesh, element, ref_point.data());
  const double z = params.valences.at(species);

  const auto gc = gradient(mb, el, state.c[species]);
  const auto gphi = gradient(mb, el, state.phi);
  const double ci = interpolate(mb, el, state.c[species]);
  const double ux = interpolate(mb, el, state.vel[0]);
  const double uy = state.vel[1].empty() ? 0.0 : interpolate(mb, el, state.vel[1]);

  return {-gc[0] - z * ci * gphi[0] + ux * ci,
          -gc[1] - z * ci * gphi[1] + uy * ci};
}

}  // namespace pnpfem
