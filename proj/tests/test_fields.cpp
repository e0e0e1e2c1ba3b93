#include "doctest.h"

#include "pnpfem/fields.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"

#include <cmath>
#include <vector>

using namespace pnpfem;

namespace {

NondimParams binary_params() {
  NondimParams p;
  p.lambda = 0.01;
  p.valences = {1, -1};
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("fields");

TEST_CASE("make_state sizes every array and applies the fill value") {
  const Mesh mesh = build_rect_mesh(3, 2, 1.0, 1.0, ElementKind::quad4);
  const SolutionState s = make_state(mesh, 2, 1.5);
  REQUIRE(s.species_count() == 2);
  REQUIRE(static_cast<int>(s.phi.size()) == mesh.node_count());
  REQUIRE(static_cast<int>(s.p.size()) == mesh.node_count());
  REQUIRE(static_cast<int>(s.vel[0].size()) == mesh.node_count());
  REQUIRE(static_cast<int>(s.vel[1].size()) == mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(s.c[0][i] == 1.5);
    CHECK(s.c[1][i] == 1.5);
    CHECK(s.phi[i] == 0.0);
    CHECK(s.vel[0][i] == 0.0);
    CHECK(s.p[i] == 0.0);
  }
  CHECK(s.t == 0.0);

  const Mesh line = build_interval_mesh(4, 0.0, 1.0);
  const SolutionState s1 = make_state(line, 1);
  CHECK(s1.vel[1].empty());
  CHECK(s1.c[0][0] == 1.0);
}

TEST_CASE("charge density is the valence-weighted sum") {
  const Mesh mesh = build_interval_mesh(2, 0.0, 1.0);
  SolutionState s = make_state(mesh, 2);
  NondimParams p = binary_params();

  // Equal binary concentrations: electroneutral.
  DerivedField rho = charge_density(s, p);
  CHECK(rho.label == "charge_density");
  for (double v : rho.values) CHECK(v == doctest::Approx(0.0));

  // c+ = 2, c- = 1 -> rho = 1.
  s.c[0].assign(s.c[0].size(), 2.0);
  rho = charge_density(s, p);
  for (double v : rho.values) CHECK(v == doctest::Approx(1.0));

  // z = (2, -1), c = (1, 1) -> rho = 1.
  p.valences = {2, -1};
  s.c[0].assign(s.c[0].size(), 1.0);
  rho = charge_density(s, p);
  for (double v : rho.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("ionic strength uses squared valences") {
  const Mesh mesh = build_interval_mesh(2, 0.0, 1.0);
  SolutionState s = make_state(mesh, 2);
  NondimParams p = binary_params();

  // Binary unit concentrations: I = (1 + 1)/2 = 1.
  DerivedField is = ionic_strength(s, p);
  CHECK(is.label == "ionic_strength");
  for (double v : is.values) CHECK(v == doctest::Approx(1.0));

  // c+ = 2, c- = 1: I = 1.5.
  s.c[0].assign(s.c[0].size(), 2.0);
  is = ionic_strength(s, p);
  for (double v : is.values) CHECK(v == doctest::Approx(1.5));

  // Divalent counterion: z = (2, -1), c = (1, 1) -> I = (4 + 1)/2 = 2.5.
  p.valences = {2, -1};
  s.c[0].assign(s.c[0].size(), 1.0);
  is = ionic_strength(s, p);
  for (double v : is.values) CHECK(v == doctest::Approx(2.5));
}

TEST_CASE("charge density is linear in the concentrations") {
  const Mesh mesh = build_interval_mesh(5, 0.0, 1.0);
  NondimParams p = binary_params();
  SolutionState a = make_state(mesh, 2);
  SolutionState b = make_state(mesh, 2);
  for (int i = 0; i < mesh.node_count(); ++i) {
    a.c[0][i] = 1.0 + 0.3 * i;
    a.c[1][i] = 2.0 - 0.1 * i;
    b.c[0][i] = 0.5 * i;
    b.c[1][i] = 0.25 * i * i;
  }
  SolutionState sum = make_state(mesh, 2);
  for (int i = 0; i < mesh.node_count(); ++i) {
    sum.c[0][i] = a.c[0][i] + 2.0 * b.c[0][i];
    sum.c[1][i] = a.c[1][i] + 2.0 * b.c[1][i];
  }
  const auto ra = charge_density(a, p).values;
  const auto rb = charge_density(b, p).values;
  const auto rs = charge_density(sum, p).values;
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(rs[i] == doctest::Approx(ra[i] + 2.0 * rb[i]).epsilon(1e-13));
  }
}

TEST_CASE("binary identity: rho_e/ionic strength stay consistent") {
  // For z = (1,-1): rho = c+ - c-, I = (c+ + c-)/2, so c+ = I + rho/2.
  const Mesh mesh = build_interval_mesh(3, 0.0, 1.0);
  NondimParams p = binary_params();
  SolutionState s = make_state(mesh, 2);
  for (int i = 0; i < mesh.node_count(); ++i) {
    s.c[0][i] = 1.0 + 0.2 * i;
    s.c[1][i] = 0.8 + 0.05 * i;
  }
  const auto rho = charge_density(s, p).values;
  const auto is = ionic_strength(s, p).values;
  for (int i = 0; i < mesh.node_count(); ++i) {
    CHECK(is[i] + 0.5 * rho[i] == doctest::Approx(s.c[0][i]).epsilon(1e-13));
  }
}

TEST_CASE("species flux: pure diffusion against a linear profile") {
  // c = 3x on [0,1], z = 0, no flow: j = -grad c = (-3, 0).
  const Mesh mesh = build_interval_mesh(4, 0.0, 1.0);
  NondimParams p;
  p.lambda = 0.01;
  p.valences = {0};
  SolutionState s = make_state(mesh, 1);
  for (int i = 0; i < mesh.node_count(); ++i) s.c[0][i] = 3.0 * mesh.nodes[i][0];
  const auto j = species_flux_at(s, p, mesh, 1, {0.0, 0.0}, 0);
  CHECK(j[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(j[1] == doctest::Approx(0.0));
}

TEST_CASE("species flux: drift and advection terms") {
  const Mesh mesh = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::quad4);
  NondimParams p = binary_params();
  SolutionState s = make_state(mesh, 2);
  // c+ = 2 uniform, phi = 5x: j+ = -z c grad phi = (-10, 0).
  for (int i = 0; i < mesh.node_count(); ++i) {
    s.c[0][i] = 2.0;
    s.phi[i] = 5.0 * mesh.nodes[i][0];
  }
  auto j = species_flux_at(s, p, mesh, 0, {0.0, 0.0}, 0);
  CHECK(j[0] == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(j[1] == doctest::Approx(0.0));

  // Anion in the same field drifts the other way: -(-1)(1)(5) = +5.
  j = species_flux_at(s, p, mesh, 0, {0.0, 0.0}, 1);
  CHECK(j[0] == doctest::Approx(5.0).epsilon(1e-12));

  // Add u = (4, 1): advective contribution u c.
  for (int i = 0; i < mesh.node_count(); ++i) {
    s.vel[0][i] = 4.0;
    s.vel[1][i] = 1.0;
  }
  j = species_flux_at(s, p, mesh, 0, {0.0, 0.0}, 0);
  CHECK(j[0] == doctest::Approx(-10.0 + 8.0).epsilon(1e-12));
  CHECK(j[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_SUITE_END();
