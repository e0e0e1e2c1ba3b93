#include "doctest.h"

#include "pnpfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace pnpfem;

namespace {

double vertical_extent(const Mesh& mesh, const Element& el) {
  double lo = 1e300, hi = -1e300;
  for (int a = 0; a < nodes_per_element(el.kind); ++a) {
    lo = std::min(lo, mesh.nodes[el.nodes[a]][1]);
    hi = std::max(hi, mesh.nodes[el.nodes[a]][1]);
  }
  return hi - lo;
}

const char* kSquareMsh = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 3 "top"
2 10 "fluid"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
5
1 2 2 10 1 1 2 3
2 2 2 10 1 1 3 4
3 1 2 1 1 1 2
4 1 2 2 2 2 3
5 1 2 3 3 3 4
$EndElements
)";

}  // namespace

TEST_SUITE_BEGIN("mesh");

TEST_CASE("interval mesh: uniform spacing, endpoint tags and outward normals") {
  const Mesh mesh = build_interval_mesh(4, 0.0, 1.0);
  REQUIRE(mesh.dim == 1);
  REQUIRE(mesh.node_count() == 5);
  REQUIRE(mesh.element_count() == 4);
  for (int i = 0; i < 5; ++i) {
    CHECK(mesh.nodes[i][0] == doctest::Approx(0.25 * i).epsilon(1e-14));
  }
  REQUIRE(mesh.boundary_facets.size() == 2);
  const auto left = mesh.facets_with_tag(kTagLeft1D);
  const auto right = mesh.facets_with_tag(kTagRight1D);
  REQUIRE(left.size() == 1);
  REQUIRE(right.size() == 1);
  const BoundaryFacet& lf = mesh.boundary_facets[left[0]];
  const BoundaryFacet& rf = mesh.boundary_facets[right[0]];
  CHECK(mesh.nodes[lf.nodes[0]][0] == doctest::Approx(0.0));
  CHECK(mesh.nodes[rf.nodes[0]][0] == doctest::Approx(1.0));
  CHECK(lf.normal[0] == doctest::Approx(-1.0));
  CHECK(rf.normal[0] == doctest::Approx(1.0));
  auto [lm, ln] = facet_measure_and_normal(mesh, lf);
  CHECK(lm == doctest::Approx(1.0));
  CHECK(ln[0] == doctest::Approx(-1.0));
}

TEST_CASE("interval mesh: widths are uniform and sum to the span") {
  const Mesh mesh = build_interval_mesh(100, 0.0, 1.0);
  double total = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double w = element_measure(mesh, e);
    CHECK(w == doctest::Approx(0.01).epsilon(1e-10));
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interval mesh: geometric stretch places the interior node") {
  // Two elements with ratio 3: widths w and 3w, so w = 0.25.
  const Mesh mesh = build_interval_mesh(2, 0.0, 1.0, 3.0);
  REQUIRE(mesh.node_count() == 3);
  CHECK(mesh.nodes[1][0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(element_measure(mesh, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(element_measure(mesh, 1) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("rect mesh: single quad cell with all four boundary tags") {
  const Mesh mesh = build_rect_mesh(1, 1, 1.0, 1.0, ElementKind::quad4);
  REQUIRE(mesh.dim == 2);
  REQUIRE(mesh.node_count() == 4);
  REQUIRE(mesh.element_count() == 1);
  REQUIRE(mesh.boundary_facets.size() == 4);
  for (int tag : {kTagBottom, kTagRight, kTagTop, kTagLeft}) {
    CHECK(mesh.has_tag(tag));
    CHECK(mesh.facets_with_tag(tag).size() == 1);
  }
  const BoundaryFacet& bottom =
      mesh.boundary_facets[mesh.facets_with_tag(kTagBottom)[0]];
  auto [measure, normal] = facet_measure_and_normal(mesh, bottom);
  CHECK(measure == doctest::Approx(1.0));
  CHECK(normal[0] == doctest::Approx(0.0));
  CHECK(normal[1] == doctest::Approx(-1.0));
  CHECK(element_measure(mesh, 0) == doctest::Approx(1.0));
  CHECK(element_diameter(mesh, 0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("rect mesh: element and facet counts at production size") {
  const Mesh mesh = build_rect_mesh(200, 40, 5.0, 1.0, ElementKind::quad4);
  CHECK(mesh.element_count() == 8000);
  CHECK(mesh.node_count() == 201 * 41);
  CHECK(mesh.facets_with_tag(kTagBottom).size() == 200);
  CHECK(mesh.facets_with_tag(kTagTop).size() == 200);
  CHECK(mesh.facets_with_tag(kTagLeft).size() == 40);
  CHECK(mesh.facets_with_tag(kTagRight).size() == 40);
}

TEST_CASE("rect mesh: triangle splitting doubles the cell count") {
  const Mesh mesh = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::tri3);
  CHECK(mesh.element_count() == 8);
  double area = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    CHECK(element_measure(mesh, e) > 0.0);
    area += element_measure(mesh, e);
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rect mesh: y stretching puts the smallest cell at the bottom wall") {
  // ratio 1.021 over 180 rows of a unit-height channel: the geometric-series
  // first term is (r-1)/(r^ny - 1) = 5.106e-4.
  const Mesh mesh = build_rect_mesh(4, 180, 1.0, 1.0, ElementKind::quad4, 1.021);
  double dy_min = 1e300, dy_max = 0.0, height = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double dy = vertical_extent(mesh, mesh.elements[e]);
    dy_min = std::min(dy_min, dy);
    dy_max = std::max(dy_max, dy);
  }
  CHECK(dy_min > 4.5e-4);
  CHECK(dy_min < 5.5e-4);
  CHECK(dy_max > dy_min);
  // The bottom row must own the smallest spacing.
  const double bottom_dy = vertical_extent(mesh, mesh.elements[0]);
  CHECK(bottom_dy == doctest::Approx(dy_min).epsilon(1e-9));
  for (const auto& nd : mesh.nodes) height = std::max(height, nd[1]);
  CHECK(height == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("closed boundary: facet normals integrate to zero, measures to the perimeter") {
  const Mesh mesh = build_rect_mesh(5, 3, 2.0, 1.0, ElementKind::tri3, 1.3);
  double sum_n[2] = {0.0, 0.0};
  double perimeter = 0.0;
  for (const auto& facet : mesh.boundary_facets) {
    auto [measure, normal] = facet_measure_and_normal(mesh, facet);
    sum_n[0] += measure * normal[0];
    sum_n[1] += measure * normal[1];
    perimeter += measure;
    CHECK(std::hypot(normal[0], normal[1]) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(sum_n[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sum_n[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(perimeter == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("retag_edge_segment carves a named membrane strip") {
  Mesh mesh = build_rect_mesh(32, 16, 1.0, 0.5, ElementKind::quad4);
  const int changed = retag_edge_segment(mesh, kTagBottom, 0.5, 1.0, 5, "membrane");
  CHECK(changed == 16);
  CHECK(mesh.facets_with_tag(5).size() == 16);
  CHECK(mesh.facets_with_tag(kTagBottom).size() == 16);
  REQUIRE(mesh.tag_names.count(5) == 1);
  CHECK(mesh.tag_names.at(5) == "membrane");
  for (int f : mesh.facets_with_tag(5)) {
    const BoundaryFacet& facet = mesh.boundary_facets[f];
    const double xc = 0.5 * (mesh.nodes[facet.nodes[0]][0] +
                             mesh.nodes[facet.nodes[1]][0]);
    CHECK(xc >= 0.5);
    CHECK(xc <= 1.0);
  }
}

TEST_CASE("facet_h_el is the wall-normal cell size") {
  const Mesh rect = build_rect_mesh(4, 2, 2.0, 1.0, ElementKind::quad4);
  // Cells are 0.5 x 0.5; a bottom facet has h_el = area / edge = 0.5.
  const BoundaryFacet& bottom =
      rect.boundary_facets[rect.facets_with_tag(kTagBottom)[0]];
  CHECK(facet_h_el(rect, bottom) == doctest::Approx(0.5).epsilon(1e-12));

  const Mesh line = build_interval_mesh(10, 0.0, 1.0);
  const BoundaryFacet& left =
      line.boundary_facets[line.facets_with_tag(kTagLeft1D)[0]];
  CHECK(facet_h_el(line, left) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("import_msh reads a tagged two-triangle square") {
  std::istringstream in(kSquareMsh);
  const Mesh mesh = import_msh(in);
  CHECK(mesh.dim == 2);
  CHECK(mesh.node_count() == 4);
  CHECK(mesh.element_count() == 2);
  REQUIRE(mesh.boundary_facets.size() == 3);
  CHECK(mesh.has_tag(1));
  CHECK(mesh.has_tag(2));
  CHECK(mesh.has_tag(3));
  CHECK(mesh.tag_names.at(3) == "top");
  CHECK(mesh.tag_names.at(10) == "fluid");
  for (int e = 0; e < mesh.element_count(); ++e) {
    CHECK(element_measure(mesh, e) == doctest::Approx(0.5).epsilon(1e-12));
  }
  const BoundaryFacet& bottom =
      mesh.boundary_facets[mesh.facets_with_tag(1)[0]];
  auto [measure, normal] = facet_measure_and_normal(mesh, bottom);
  CHECK(measure == doctest::Approx(1.0));
  CHECK(normal[1] == doctest::Approx(-1.0));
}

TEST_CASE("import_msh repairs inverted triangles") {
  std::string text = kSquareMsh;
  // Flip the winding of the first triangle (1 2 3 -> 1 3 2).
  const std::string fwd = "1 2 2 10 1 1 2 3";
  const std::string rev = "1 2 2 10 1 1 3 2";
  text.replace(text.find(fwd), fwd.size(), rev);
  std::istringstream in(text);
  const Mesh mesh = import_msh(in);
  for (int e = 0; e < mesh.element_count(); ++e) {
    CHECK(element_measure(mesh, e) > 0.0);
  }
}

TEST_CASE("import_msh skips unknown sections") {
  std::string text = kSquareMsh;
  text += "$Periodic\n0\n$EndPeriodic\n";
  std::istringstream in(text);
  CHECK(import_msh(in).element_count() == 2);
}

TEST_CASE("import_msh rejects format version 4") {
  std::istringstream in("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");
  CHECK_THROWS_WITH_AS(import_msh(in),
                       doctest::Contains("unsupported MSH version"),
                       std::runtime_error);
}

TEST_CASE("import_msh rejects a tagged interior facet") {
  std::string text = kSquareMsh;
  const std::string marker = "$EndElements";
  // Add a line element on the shared diagonal (nodes 1-3) and bump the count.
  text.replace(text.find("\n5\n1 2 2 10"), 2, "\n6\n");
  text.replace(text.find(marker), marker.size(),
               "6 1 2 7 7 1 3\n$EndElements");
  std::istringstream in(text);
  CHECK_THROWS_WITH_AS(import_msh(in), doctest::Contains("interior"),
                       std::runtime_error);
}

TEST_CASE("import_msh rejects a boundary element matching no facet") {
  std::string text = kSquareMsh;
  const std::string marker = "$EndElements";
  // Nodes 2-4 form the un-meshed diagonal of the square.
  text.replace(text.find("\n5\n1 2 2 10"), 2, "\n6\n");
  text.replace(text.find(marker), marker.size(),
               "6 1 2 7 7 2 4\n$EndElements");
  std::istringstream in(text);
  CHECK_THROWS_WITH_AS(import_msh(in),
                       doctest::Contains("does not match any volume element"),
                       std::runtime_error);
}

TEST_SUITE_END();
