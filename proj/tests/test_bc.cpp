#include "doctest.h"

#include "pnpfem/bc.hpp"
#include "pnpfem/mesh.hpp"

#include <stdexcept>
#include <string>

using namespace pnpfem;

namespace {

/// Cover every tag of a mesh with zero-flux species + strong phi conditions.
BoundaryTable full_coverage(const Mesh& mesh, int n_species) {
  BoundaryTable bc;
  for (const auto& facet : mesh.boundary_facets) {
    for (int s = 0; s < n_species; ++s) {
      bc.set_scalar(facet.tag, ScalarVar::concentration(s), {});
    }
    ScalarCondition phi;
    phi.kind = ScalarBcKind::strong;
    phi.datum = BoundaryDatum::constant(0.0);
    bc.set_scalar(facet.tag, ScalarVar::potential(), phi);
  }
  return bc;
}

std::string what_of(const BoundaryTable& bc, const Mesh& mesh, int n_species) {
  try {
    bc.validate_scalar_coverage(mesh, n_species);
  } catch (const std::invalid_argument& err) {
    return err.what();
  }
  return {};
}

}  // namespace

TEST_SUITE_BEGIN("bc");

TEST_CASE("boundary datum evaluates its affine form and custom functions") {
  BoundaryDatum affine{1.0, 2.0, -3.0, nullptr};
  CHECK(affine(0.0, 0.5, 1.0) == doctest::Approx(1.0 + 1.0 - 3.0));
  CHECK(BoundaryDatum::constant(7.5)(9.0, 1.0, 2.0) == doctest::Approx(7.5));

  BoundaryDatum timed;
  timed.fn = [](double t, double x, double y) { return t * x + y; };
  CHECK(timed(2.0, 3.0, 4.0) == doctest::Approx(10.0));
}

TEST_CASE("scalar table lookup distinguishes variables and tags") {
  BoundaryTable bc;
  ScalarCondition weak;
  weak.kind = ScalarBcKind::weak;
  weak.datum = BoundaryDatum::constant(2.0);
  weak.penalty = 6.0;
  bc.set_scalar(1, ScalarVar::concentration(0), weak);
  ScalarCondition strong;
  strong.kind = ScalarBcKind::strong;
  strong.datum = BoundaryDatum::constant(50.0);
  bc.set_scalar(1, ScalarVar::potential(), strong);

  const ScalarCondition* c0 = bc.scalar(1, ScalarVar::concentration(0));
  REQUIRE(c0 != nullptr);
  CHECK(c0->kind == ScalarBcKind::weak);
  CHECK(c0->penalty == doctest::Approx(6.0));
  CHECK(c0->datum(0, 0, 0) == doctest::Approx(2.0));

  const ScalarCondition* phi = bc.scalar(1, ScalarVar::potential());
  REQUIRE(phi != nullptr);
  CHECK(phi->kind == ScalarBcKind::strong);
  CHECK(phi->datum(0, 0, 0) == doctest::Approx(50.0));

  CHECK(bc.scalar(1, ScalarVar::concentration(1)) == nullptr);
  CHECK(bc.scalar(2, ScalarVar::concentration(0)) == nullptr);
}

TEST_CASE("velocity lookup returns strong conditions only") {
  BoundaryTable bc;
  bc.set_velocity(3, 0, {true, BoundaryDatum::constant(1.0)});
  bc.set_velocity(3, 1, {false, {}});  // explicitly natural
  REQUIRE(bc.velocity(3, 0) != nullptr);
  CHECK(bc.velocity(3, 0)->datum(0, 0, 0) == doctest::Approx(1.0));
  CHECK(bc.velocity(3, 1) == nullptr);
  CHECK(bc.velocity(4, 0) == nullptr);

  BoundaryTable ns;
  ns.set_velocity_noslip(2);
  REQUIRE(ns.velocity(2, 0) != nullptr);
  REQUIRE(ns.velocity(2, 1) != nullptr);
  CHECK(ns.velocity(2, 0)->datum(0, 5, 5) == doctest::Approx(0.0));
}

TEST_CASE("coverage validation passes on a fully specified table") {
  const Mesh mesh = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::quad4);
  const BoundaryTable bc = full_coverage(mesh, 2);
  CHECK_NOTHROW(bc.validate_scalar_coverage(mesh, 2));
}

TEST_CASE("coverage validation names the first missing condition") {
  const Mesh mesh = build_interval_mesh(4, 0.0, 1.0);
  // Species 1 on the right boundary is left unspecified.
  BoundaryTable partial;
  partial.set_scalar(kTagLeft1D, ScalarVar::concentration(0), {});
  partial.set_scalar(kTagLeft1D, ScalarVar::concentration(1), {});
  ScalarCondition phi;
  phi.kind = ScalarBcKind::strong;
  partial.set_scalar(kTagLeft1D, ScalarVar::potential(), phi);
  partial.set_scalar(kTagRight1D, ScalarVar::concentration(0), {});
  partial.set_scalar(kTagRight1D, ScalarVar::potential(), phi);

  CHECK_THROWS_AS(partial.validate_scalar_coverage(mesh, 2),
                  std::invalid_argument);
  const std::string msg = what_of(partial, mesh, 2);
  // The message must identify both the tag and the variable.
  CHECK(msg.find("2") != std::string::npos);
  CHECK(msg.find("1") != std::string::npos);
}

TEST_CASE("coverage validation requires a potential anchor") {
  const Mesh mesh = build_interval_mesh(4, 0.0, 1.0);
  BoundaryTable bc;
  for (int tag : {kTagLeft1D, kTagRight1D}) {
    bc.set_scalar(tag, ScalarVar::concentration(0), {});
    bc.set_scalar(tag, ScalarVar::potential(), {});  // zero-flux everywhere
  }
  CHECK_THROWS_AS(bc.validate_scalar_coverage(mesh, 1), std::invalid_argument);

  // A weak condition counts as an anchor.
  ScalarCondition weak;
  weak.kind = ScalarBcKind::weak;
  bc.set_scalar(kTagLeft1D, ScalarVar::potential(), weak);
  CHECK_NOTHROW(bc.validate_scalar_coverage(mesh, 1));
}

TEST_CASE("pressure is anchored only when a normal velocity stays natural") {
  const Mesh mesh = build_rect_mesh(2, 2, 1.0, 1.0, ElementKind::quad4);

  // All walls no-slip -> enclosed flow -> needs a gauge pin.
  BoundaryTable closed;
  for (int tag : {kTagBottom, kTagRight, kTagTop, kTagLeft}) {
    closed.set_velocity_noslip(tag);
  }
  CHECK(!closed.pressure_anchored_by_bc(mesh));

  // Open left/right ends (natural normal component): anchored.
  BoundaryTable open = closed;
  open.set_velocity(kTagLeft, 0, {false, {}});
  open.set_velocity(kTagRight, 0, {false, {}});
  CHECK(open.pressure_anchored_by_bc(mesh));

  // Natural component parallel to the wall does not anchor: on the bottom
  // wall the normal is y, so releasing ux changes nothing.
  BoundaryTable slip = closed;
  slip.set_velocity(kTagBottom, 0, {false, {}});
  CHECK(!slip.pressure_anchored_by_bc(mesh));
}

TEST_SUITE_END();
