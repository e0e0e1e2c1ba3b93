#pragma once

#include "pnpfem/mesh.hpp"

#include <array>

namespace pnpfem {

/// Reference-element data for the linear element zoo (line2, tri3, quad4).
/// Reference domains: line2 on [-1,1]; tri3 on the unit triangle with
/// vertices (0,0),(1,0),(0,1); quad4 on [-1,1]².

int facet_count(ElementKind kind);

/// Local node indices of a facet (point in 1D, edge in 2D). Returns the
/// number of facet nodes and fills `nodes` (size ≥ 2).
int facet_local_nodes(ElementKind kind, int facet, int* nodes);

/// Shape function values at a reference point (fills N[0..nn-1]).
void shape_values(ElementKind kind, const double* ref, double* N);

/// Reference-coordinate shape gradients at a reference point.
void shape_grads_ref(ElementKind kind, const double* ref, double grad[4][2]);

/// Reference coordinates of a point on facet `facet`, parametrized by
/// s ∈ [0,1] along the facet (ignored for 1D point facets).
void facet_ref_point(ElementKind kind, int facet, double s, double* ref);

/// Volume quadrature rule in reference coordinates. The default rule is
/// 2-point Gauss per direction on line2/quad4 and the 3-point degree-2 rule
/// on tri3. The high-accuracy rule (for error integration) is 5-point Gauss
/// on line2, 4×4 Gauss on quad4, and the 7-point degree-5 rule on tri3.
struct QuadratureRule {
  int n;
  const double (*points)[2];
  const double* weights;  ///< include the reference-domain measure
};
QuadratureRule volume_rule(ElementKind kind, bool high_accuracy = false);

/// Shape data mapped to one physical point of one element.
struct MappedBasis {
  int nn = 0;                          ///< nodes of the element
  std::array<double, 4> N{};           ///< shape values
  std::array<std::array<double, 2>, 4> grad{};  ///< physical gradients
  double detJ = 0.0;                   ///< Jacobian determinant (length scale in 1D)
  std::array<double, 2> x{};           ///< physical coordinates
};

/// Evaluate shape values, physical gradients, Jacobian determinant and the
/// physical location at a reference point of an element. Throws on
/// non-positive Jacobians and on tet4 (3D assembly unsupported).
MappedBasis map_basis(const Mesh& mesh, int element, const double* ref);

/// Interpolate a nodal field at a mapped point.
double interpolate(const MappedBasis& mb, const Element& el,
                   const std::vector<double>& nodal);

/// Physical gradient of a nodal field at a mapped point (2D vector; y = 0 in 1D).
std::array<double, 2> gradient(const MappedBasis& mb, const Element& el,
                               const std::vector<double>& nodal);

}  // namespace pnpfem
