#include "doctest.h"

#include "pnpfem/element.hpp"
#include "pnpfem/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace pnpfem;

namespace {

/// Integrate f over every element of a mesh with the selected rule.
template <typename F>
double integrate(const Mesh& mesh, bool high_accuracy, F&& f) {
  double total = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const QuadratureRule rule = volume_rule(mesh.elements[e].kind, high_accuracy);
    for (int q = 0; q < rule.n; ++q) {
      const MappedBasis mb = map_basis(mesh, e, rule.points[q]);
      total += rule.weights[q] * mb.detJ * f(mb.x[0], mb.x[1]);
    }
  }
  return total;
}

Mesh single_tet_mesh() {
  Mesh mesh;
  mesh.dim = 3;
  mesh.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  mesh.elements.push_back({ElementKind::tet4, {0, 1, 2, 3}});
  return mesh;
}

}  // namespace

TEST_SUITE_BEGIN("element");

TEST_CASE("shape values form a partition of unity at interior points") {
  const double pts_line[][2] = {{-0.3, 0.0}, {0.7, 0.0}};
  const double pts_tri[][2] = {{0.2, 0.3}, {0.1, 0.05}};
  const double pts_quad[][2] = {{-0.5, 0.25}, {0.9, -0.9}};
  double N[4];
  for (const auto& p : pts_line) {
    shape_values(ElementKind::line2, p, N);
    CHECK(N[0] + N[1] == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (const auto& p : pts_tri) {
    shape_values(ElementKind::tri3, p, N);
    CHECK(N[0] + N[1] + N[2] == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (const auto& p : pts_quad) {
    shape_values(ElementKind::quad4, p, N);
    CHECK(N[0] + N[1] + N[2] + N[3] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("reference shape gradients sum to zero") {
  double grad[4][2];
  const double p[2] = {0.3, -0.2};
  shape_grads_ref(ElementKind::quad4, p, grad);
  double sx = 0.0, sy = 0.0;
  for (int a = 0; a < 4; ++a) {
    sx += grad[a][0];
    sy += grad[a][1];
  }
  CHECK(sx == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sy == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("quadrature weights integrate the reference measures") {
  // line2 reference [-1,1] has measure 2; quad4 [-1,1]^2 has 4; the unit
  // triangle has 1/2.
  for (bool high : {false, true}) {
    double sum = 0.0;
    QuadratureRule rule = volume_rule(ElementKind::line2, high);
    for (int q = 0; q < rule.n; ++q) sum += rule.weights[q];
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));

    sum = 0.0;
    rule = volume_rule(ElementKind::quad4, high);
    for (int q = 0; q < rule.n; ++q) sum += rule.weights[q];
    CHECK(sum == doctest::Approx(4.0).epsilon(1e-14));

    sum = 0.0;
    rule = volume_rule(ElementKind::tri3, high);
    for (int q = 0; q < rule.n; ++q) sum += rule.weights[q];
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("default rules integrate quadratics exactly on stretched meshes") {
  const Mesh line = build_interval_mesh(3, 0.0, 2.0, 1.7);
  // ∫_0^2 x^2 dx = 8/3.
  CHECK(integrate(line, false, [](double x, double) { return x * x; }) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-13));

  const Mesh quads = build_rect_mesh(3, 2, 2.0, 1.0, ElementKind::quad4, 1.4);
  // ∫∫ x^2 y dx dy over [0,2]x[0,1] = (8/3)(1/2) = 4/3.
  CHECK(integrate(quads, false, [](double x, double y) { return x * x * y; }) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-13));

  const Mesh tris = build_rect_mesh(3, 2, 2.0, 1.0, ElementKind::tri3, 1.4);
  CHECK(integrate(tris, false, [](double x, double y) { return x * x * y; }) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("high-accuracy rules integrate quartics exactly") {
  const Mesh line = build_interval_mesh(2, 0.0, 1.0);
  // ∫_0^1 x^4 dx = 1/5.
  CHECK(integrate(line, true, [](double x, double) { return std::pow(x, 4); }) ==
        doctest::Approx(0.2).epsilon(1e-13));

  const Mesh tris = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::tri3);
  // ∫∫ x^4 = 1/5; degree-5 triangle rule is exact.
  CHECK(integrate(tris, true, [](double x, double) { return std::pow(x, 4); }) ==
        doctest::Approx(0.2).epsilon(1e-13));

  const Mesh quads = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::quad4);
  CHECK(integrate(quads, true, [](double x, double) { return std::pow(x, 4); }) ==
        doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("map_basis reproduces linear fields and their gradients") {
  const Mesh mesh = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::quad4, 1.5);
  std::vector<double> field(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    field[i] = 3.0 + 2.0 * mesh.nodes[i][0] - 5.0 * mesh.nodes[i][1];
  }
  for (int e = 0; e < mesh.element_count(); ++e) {
    const QuadratureRule rule = volume_rule(ElementKind::quad4);
    for (int q = 0; q < rule.n; ++q) {
      const MappedBasis mb = map_basis(mesh, e, rule.points[q]);
      CHECK(mb.detJ > 0.0);
      CHECK(interpolate(mb, mesh.elements[e], field) ==
            doctest::Approx(3.0 + 2.0 * mb.x[0] - 5.0 * mb.x[1]).epsilon(1e-12));
      const auto g = gradient(mb, mesh.elements[e], field);
      CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(g[1] == doctest::Approx(-5.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("map_basis detJ carries the element length in 1D") {
  const Mesh mesh = build_interval_mesh(2, 0.0, 1.0, 3.0);
  const double ref[2] = {0.0, 0.0};
  // Reference measure 2, element lengths 0.25 and 0.75 -> detJ = L/2.
  CHECK(map_basis(mesh, 0, ref).detJ == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(map_basis(mesh, 1, ref).detJ == doctest::Approx(0.375).epsilon(1e-13));
}

TEST_CASE("facet reference points land on the facet endpoints") {
  double ref[2];
  int nodes[4];
  for (ElementKind kind : {ElementKind::tri3, ElementKind::quad4}) {
    for (int f = 0; f < facet_count(kind); ++f) {
      const int nfn = facet_local_nodes(kind, f, nodes);
      REQUIRE(nfn == 2);
      double N[4];
      facet_ref_point(kind, f, 0.0, ref);
      shape_values(kind, ref, N);
      CHECK(N[nodes[0]] == doctest::Approx(1.0).epsilon(1e-13));
      facet_ref_point(kind, f, 1.0, ref);
      shape_values(kind, ref, N);
      CHECK(N[nodes[1]] == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("facet counts match the element zoo") {
  CHECK(facet_count(ElementKind::line2) == 2);
  CHECK(facet_count(ElementKind::tri3) == 3);
  CHECK(facet_count(ElementKind::quad4) == 4);
}

TEST_CASE("map_basis rejects tet4 and inverted elements") {
  const Mesh tet = single_tet_mesh();
  const double ref[2] = {0.25, 0.25};
  CHECK_THROWS_AS(map_basis(tet, 0, ref), std::runtime_error);

  Mesh bad;
  bad.dim = 2;
  bad.nodes = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
  bad.elements.push_back({ElementKind::tri3, {0, 2, 1, -1}});  // clockwise
  CHECK_THROWS_AS(map_basis(bad, 0, ref), std::runtime_error);
}

TEST_SUITE_END();
