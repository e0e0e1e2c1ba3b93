#pragma once

#include "pnpfem/assembly.hpp"
#include "pnpfem/bc.hpp"
#include "pnpfem/fields.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"
#include "pnpfem/solvers.hpp"

#include <functional>
#include <vector>

namespace pnpfem {

/// Fixed-point loop controls for the per-step block iteration
/// (potential → species → flow).
struct BlockIterationConfig {
  double tol = 1e-3;        ///< relative stagnation tolerance on the state
  int max_iterations = 100;
};

/// One coupled problem: mesh, physics, boundary data and optional analytic
/// forcing (used by the manufactured-solution drivers).
struct Problem {
  const Mesh* mesh = nullptr;
  NondimParams params;
  EquationCoefficients coeffs;
  BoundaryTable bc;
  bool solve_flow = true;  ///< false → pure ion-transport problem

  std::vector<ScalarForcing> species_forcing;  ///< per species; empty = none
  ScalarForcing phi_forcing;
  VectorForcing ns_forcing;
  /// Pressure-pin datum as a function of time; unset → automatic gauge
  /// handling (pin to 0 only when no natural outflow anchors the pressure).
  std::function<double(double)> pressure_pin;
};

/// Linear/nonlinear solver selection for the three subsystems. The potential
/// system's matrix is state-independent, so its direct factorization is
/// cached in `poisson_session` across calls when method == direct_lu.
struct SolverSuite {
  LinearSolveConfig poisson;
  LinearSolveConfig np;
  LinearSolveConfig ns_linear;
  NewtonConfig ns_newton;
  DirectSolverSession poisson_session;

  /// Desk-scale default: sparse direct solves everywhere.
  static SolverSuite all_direct();
};

struct StepStats {
  int block_iterations = 0;
  double block_diff = 0.0;     ///< final relative inter-iterate change
  int newton_iterations = 0;   ///< flow Newton iterations, summed over blocks
};

/// Advance `state` to time prev.t + dt by one backward-Euler step using the
/// block iteration: solve the potential from the latest concentrations, each
/// species from the latest potential/velocity, then the flow with the
/// electric body force frozen at the latest scalars; repeat until the
/// concatenated state change drops below tol·‖state‖. `state` carries the
/// warm start in (typically a copy of prev) and the accepted iterate out.
/// Throws SolverError when the loop fails to stagnate within max_iterations.
StepStats block_step(const Problem& problem, const SolutionState& prev,
                     SolutionState& state, double dt,
                     const BlockIterationConfig& cfg, SolverSuite& solvers,
                     const SystemCache& cache);

struct TransientConfig {
  double dt = 0.0;
  int n_steps = 0;
  /// Steady-state detection: stop when ‖U^{n+1} − U^n‖/(dt·‖U^{n+1}‖) drops
  /// below this; 0 disables detection.
  double steady_tol = 0.0;
  BlockIterationConfig block;
};

struct TransientResult {
  SolutionState state;
  int steps_taken = 0;
  bool reached_steady = false;
  long total_block_iterations = 0;
};

/// Observer invoked after every completed step.
using StepObserver =
    std::function<void(int step, const SolutionState& state, const StepStats&)>;

/// March n_steps backward-Euler steps from `initial`, stopping early on
/// steady detection. Verifies the state stays finite after every step and
/// throws SolverError naming the step otherwise.
TransientResult run_transient(const Problem& problem, SolutionState initial,
                              const TransientConfig& cfg, SolverSuite& solvers,
                              const StepObserver& observer = {});

/// Relative steady-state indicator ‖a − b‖ / (dt·‖a‖) over the concatenated
/// concentration/potential/velocity/pressure arrays (0/0 → 0).
double steady_indicator(const SolutionState& a, const SolutionState& b,
                        double dt);

}  // namespace pnpfem
