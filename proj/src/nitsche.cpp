#include "pnpfem/nitsche.hpp"

#include "pnpfem/element.hpp"

#include <stdexcept>

namespace pnpfem {

FacetBlock nitsche_scalar_facet(const Mesh& mesh, const BoundaryFacet& facet,
                                ScalarVar var, const SolutionState& state,
                                const NondimParams& params,
                                const EquationCoefficients& coeffs,
                                const WeakDirichlet& wd) {
  if (!(wd.penalty > 0.0)) {
    throw std::invalid_argument("nitsche_scalar_facet: penalty must be positive");
  }
  const double h_el = facet_h_el(mesh, facet);
  if (!(h_el > 0.0)) {
    throw std::invalid_argument("nitsche_scalar_facet: h_el must be positive");
  }

  const Element& el = mesh.elements[facet.element];
  const auto [measure, normal] = facet_measure_and_normal(mesh, facet);

  FacetBlock blk;
  blk.nn = nodes_per_element(el.kind);
  for (int a = 0; a < blk.nn; ++a) blk.nodes[a] = el.nodes[a];

  // The operator factor: 2Λ² for phi, the NP diffusion factor for species.
  const double d = var.is_phi() ? coeffs.poisson_factor : coeffs.np_diffusion_factor;
  const double z = var.is_phi() ? 0.0 : params.valences.at(var.species);
  const double pen = wd.penalty / h_el;

  // Facet quadrature: 2-point Gauss along the edge in 2D, the point itself
  // in 1D (exact for the nodal trace).
  const double g2 = 0.5 / 1.7320508075688772;  // 1/(2*sqrt(3))
  const double spts[2] = {0.5 - g2, 0.5 + g2};
  const double swts[2] = {0.5, 0.5};
  const int nq = (facet.n_nodes == 1) ? 1 : 2;

  for (int q = 0; q < nq; ++q) {
    double ref[2];
    facet_ref_point(el.kind, facet.local_facet, (nq == 1) ? 0.0 : spts[q], ref);
    const MappedBasis mb = map_basis(mesh, facet.element, ref);
    const double w = (nq == 1) ? 1.0 : swts[q] * measure;

    // grad phi at the facet point (frozen block-iterate data, species only).
    std::array<double, 2> gphi{0.0, 0.0};
    if (!var.is_phi()) gphi = gradient(mb, el, state.phi);
    const double gphin = gphi[0] * normal[0] + gphi[1] * normal[1];

    const double g = wd.g(state.t, mb.x[0], mb.x[1]);

    for (int a = 0; a < blk.nn; ++a) {
      const double grad_a_n = mb.grad[a][0] * normal[0] + mb.grad[a][1] * normal[1];
      for (int b = 0; b < blk.nn; ++b) {
        const double grad_b_n = mb.grad[b][0] * normal[0] + mb.grad[b][1] * normal[1];
        double k = 0.0;
        // Consistency: -(q, Fl(v)·n); the species flux adds the frozen-phi
        // drift z c grad(phi)·n.
        k -= d * mb.N[a] * (grad_b_n + z * mb.N[b] * gphin);
        // Adjoint consistency: -(A(q)·n, v).
        k -= d * grad_a_n * mb.N[b];
        // Penalty: +(C/h)(q, v).
        k += pen * mb.N[a] * mb.N[b];
        blk.K[a][b] += w * k;
      }
      // Datum parts: -(A(q)·n, -g) and +(C/h)(q, -g) move to the rhs.
      blk.F[a] += w * (-d * grad_a_n * g + pen * mb.N[a] * g);
    }
  }
  return blk;
}

}  // namespace pnpfem
