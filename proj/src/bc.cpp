#include "pnpfem/bc.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace pnpfem {

bool BoundaryTable::pressure_anchored_by_bc(const Mesh& mesh) const {
  for (const auto& f : mesh.boundary_facets) {
    // Normal component at (axis-aligned or general) facets: pick the
    // dominant normal direction.
    const int normal_comp = (std::abs(f.normal[1]) > std::abs(f.normal[0])) ? 1 : 0;
    if (mesh.dim == 1) {
      if (velocity(f.tag, 0) == nullptr) return true;
      continue;
    }
    if (velocity(f.tag, normal_comp) == nullptr) return true;
  }
  return false;
}

void BoundaryTable::validate_scalar_coverage(const Mesh& mesh, int n_species) const {
  std::set<int> tags;
  for (const auto& f : mesh.boundary_facets) tags.insert(f.tag);

  bool phi_anchored = false;
  for (int tag : tags) {
    for (int i = 0; i < n_species; ++i) {
      if (scalar(tag, ScalarVar::concentration(i)) == nullptr) {
        throw std::invalid_argument("boundary tag " + std::to_string(tag) +
                                    " has no condition for species c" +
                                    std::to_string(i));
      }
    }
    const ScalarCondition* phi = scalar(tag, ScalarVar::potential());
    if (phi == nullptr) {
      throw std::invalid_argument("boundary tag " + std::to_string(tag) +
                                  " has no condition for phi");
    }
    if (phi->kind != ScalarBcKind::zero_flux) phi_anchored = true;
  }
  if (!phi_anchored) {
    throw std::invalid_argument(
        "phi needs at least one strong or weak Dirichlet condition");
  }
}

}  // namespace pnpfem
