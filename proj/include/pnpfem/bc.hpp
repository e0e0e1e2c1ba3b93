#pragma once

#include "pnpfem/mesh.hpp"

#include <functional>
#include <map>
#include <utility>

namespace pnpfem {

/// Boundary datum: the affine form a0 + ax·x + ay·y (covers constants and
/// linear potential ramps), or an arbitrary (t,x,y) function when `fn` is
/// set (used by the manufactured-solution drivers).
struct BoundaryDatum {
  double a0 = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  std::function<double(double, double, double)> fn;

  double operator()(double t, double x, double y) const {
    return fn ? fn(t, x, y) : a0 + ax * x + ay * y;
  }

  static BoundaryDatum constant(double v) { return {v, 0.0, 0.0, nullptr}; }
};

enum class ScalarBcKind { strong, weak, zero_flux };

/// Condition for one scalar variable on one boundary tag.
struct ScalarCondition {
  ScalarBcKind kind = ScalarBcKind::zero_flux;
  BoundaryDatum datum;
  double penalty = 4.0;  ///< Nitsche constant C, used when kind == weak
};

/// Velocity is imposed per component: strongly, or left natural (the
/// do-nothing pseudo-traction condition handles open segments and the
/// tangential part of symmetry lines).
struct VelocityComponentCondition {
  bool strong = false;
  BoundaryDatum datum;
};

/// Identifier of a scalar unknown: species index 0..N-1, or the potential.
struct ScalarVar {
  int species = -1;  ///< -1 encodes phi

  static ScalarVar concentration(int i) { return {i}; }
  static ScalarVar potential() { return {-1}; }
  bool is_phi() const { return species < 0; }
};

/// Per-(tag, variable) boundary condition table.
class BoundaryTable {
 public:
  void set_scalar(int tag, ScalarVar var, ScalarCondition cond) {
    scalar_[{tag, var.species}] = std::move(cond);
  }
  void set_velocity(int tag, int component, VelocityComponentCondition cond) {
    velocity_[{tag, component}] = std::move(cond);
  }
  void set_velocity_noslip(int tag) {
    set_velocity(tag, 0, {true, BoundaryDatum::constant(0.0)});
    set_velocity(tag, 1, {true, BoundaryDatum::constant(0.0)});
  }

  /// Condition for a scalar variable, or nullptr when none is set.
  const ScalarCondition* scalar(int tag, ScalarVar var) const {
    const auto it = scalar_.find({tag, var.species});
    return it == scalar_.end() ? nullptr : &it->second;
  }

  /// Strong condition for a velocity component, or nullptr (natural).
  const VelocityComponentCondition* velocity(int tag, int component) const {
    const auto it = velocity_.find({tag, component});
    if (it == velocity_.end() || !it->second.strong) return nullptr;
    return &it->second;
  }

  /// True when some boundary facet leaves its normal velocity component
  /// natural — the do-nothing condition then anchors the pressure level and
  /// no gauge pin is needed.
  bool pressure_anchored_by_bc(const Mesh& mesh) const;

  /// Check that every boundary tag has a condition for every species and for
  /// phi, and that phi has at least one Dirichlet-type (strong or weak)
  /// anchor. Throws std::invalid_argument naming the first gap.
  void validate_scalar_coverage(const Mesh& mesh, int n_species) const;

 private:
  std::map<std::pair<int, int>, ScalarCondition> scalar_;
  std::map<std::pair<int, int>, VelocityComponentCondition> velocity_;
};

}  // namespace pnpfem
