#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pnpfem {

enum class ElementKind { line2, tri3, quad4, tet4 };

/// Number of nodes of an element kind.
int nodes_per_element(ElementKind kind);

/// A single element: homogeneous linear connectivity (unused slots = -1).
struct Element {
  ElementKind kind;
  std::array<int, 4> nodes;
};

/// Boundary facet: a point in 1D, an edge in 2D (a triangle for imported 3D
/// meshes, which assembly rejects). Stores its owning element, the local
/// facet index inside that element, an integer tag, and the outward unit
/// normal computed from the owner's geometry.
struct BoundaryFacet {
  std::array<int, 3> nodes;  ///< facet node ids (unused slots = -1)
  int n_nodes;
  int element;      ///< owning element index
  int local_facet;  ///< local facet index within the owning element
  int tag;
  std::array<double, 3> normal;  ///< outward unit normal (trailing components 0)
};

/// Lightweight reference to a tagged boundary facet.
struct FacetHandle {
  int element;
  int local_facet;
  int tag;
};

/// Conforming linear mesh: nodes, elements, tagged boundary facets.
/// Immutable after construction; read-only sharing across workers is safe.
struct Mesh {
  int dim = 0;  ///< ambient dimension (1 or 2; 3 only for imported tet meshes)
  std::vector<std::array<double, 3>> nodes;  ///< coordinates, trailing components 0
  std::vector<Element> elements;
  std::vector<BoundaryFacet> boundary_facets;
  std::map<int, std::string> tag_names;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }

  /// Indices into boundary_facets carrying the given tag (in stored order).
  std::vector<int> facets_with_tag(int tag) const;

  /// True if any boundary facet carries the tag.
  bool has_tag(int tag) const;
};

/// Boundary tags used by the structured generators.
inline constexpr int kTagLeft1D = 1;
inline constexpr int kTagRight1D = 2;
inline constexpr int kTagBottom = 1;
inline constexpr int kTagRight = 2;
inline constexpr int kTagTop = 3;
inline constexpr int kTagLeft = 4;

/// 1D mesh of n_elems line2 elements on [x0, x1]. stretch_ratio = 1 gives
/// uniform spacing; otherwise element widths form a geometric progression
/// from x0 with that ratio. Endpoints tagged LEFT=1, RIGHT=2.
Mesh build_interval_mesh(int n_elems, double x0, double x1,
                         double stretch_ratio = 1.0);

/// Tensor-product mesh of nx × ny cells on [0,Lx] × [0,Ly]. kind selects
/// quad4 cells or tri3 (each quad split into two triangles). y spacing is a
/// geometric progression with the given ratio, smallest cell at y = 0.
/// Boundary tags: BOTTOM=1, RIGHT=2, TOP=3, LEFT=4.
Mesh build_rect_mesh(int nx, int ny, double Lx, double Ly, ElementKind kind,
                     double y_stretch_ratio = 1.0);

/// Re-tag the boundary facets of `edge_tag` whose centroid coordinate lies in
/// [from, to] (x for horizontal edges, y for vertical ones) with `new_tag`.
/// Used to carve a membrane segment out of a generated edge. Returns the
/// number of facets re-tagged.
int retag_edge_segment(Mesh& mesh, int edge_tag, double from, double to,
                       int new_tag, const std::string& new_name);

/// Parse an MSH v2 ASCII stream ($MeshFormat "2.2 0 8"). Volume elements
/// (line2 in 1D, tri3/quad4 in 2D, tet4 in 3D) are retained per the ambient
/// dimension; lower-dimensional elements become tagged boundary facets using
/// their physical tag. Throws std::runtime_error with a line number on
/// malformed input or unsupported versions.
Mesh import_msh(std::istream& in);

/// Facet measure (1 for 1D point facets, edge length in 2D) and outward unit
/// normal, recomputed from the owning element's geometry.
std::pair<double, std::array<double, 3>> facet_measure_and_normal(
    const Mesh& mesh, const BoundaryFacet& facet);

/// Element measure (length / area).
double element_measure(const Mesh& mesh, int element);

/// Element diameter (largest vertex-to-vertex distance); the h_el used by
/// interior SUPG terms.
double element_diameter(const Mesh& mesh, int element);

/// Wall-normal length scale for boundary penalty terms: owning element
/// measure divided by facet measure in 2D; owning element length in 1D.
double facet_h_el(const Mesh& mesh, const BoundaryFacet& facet);

}  // namespace pnpfem
