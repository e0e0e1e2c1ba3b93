#include "pnpfem/stepping.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pnpfem {

namespace {

/// Accumulate ‖a − b‖² and ‖a‖² over one pair of arrays.
void diff_norms(const std::vector<double>& a, const std::vector<double>& b,
                double& diff2, double& norm2) {
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    diff2 += d * d;
    norm2 += a[i] * a[i];
  }
}

void state_diff(const SolutionState& a, const SolutionState& b, double& diff,
                double& scale) {
  double d2 = 0.0, n2 = 0.0;
  for (int s = 0; s < a.species_count(); ++s) diff_norms(a.c[s], b.c[s], d2, n2);
  diff_norms(a.phi, b.phi, d2, n2);
  for (int k = 0; k < 2; ++k) diff_norms(a.vel[k], b.vel[k], d2, n2);
  diff_norms(a.p, b.p, d2, n2);
  diff = std::sqrt(d2);
  scale = std::sqrt(n2);
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool state_finite(const SolutionState& s) {
  for (const auto& c : s.c) {
    if (!all_finite(c)) return false;
  }
  return all_finite(s.phi) && all_finite(s.vel[0]) && all_finite(s.vel[1]) &&
         all_finite(s.p);
}

std::vector<double> solve_poisson_system(const LinearSystem& sys,
                                         SolverSuite& solvers) {
  if (solvers.poisson.method == LinearSolveConfig::Method::direct_lu) {
    return solvers.poisson_session.solve(sys);
  }
  return solve_linear(sys, solvers.poisson);
}

/// Newton solve of the flow subsystem in place on state.vel / state.p.
int solve_flow(const Problem& problem, const SolutionState& prev,
               SolutionState& state, const SolutionState& entry, double dt,
               SolverSuite& solvers, const SystemCache& cache) {
  const Mesh& mesh = *problem.mesh;
  const int n = mesh.node_count();

  NsOptions opts;
  opts.stab_state = &entry;
  opts.charge_state = &state;
  opts.extra_forcing = problem.ns_forcing;
  if (problem.pressure_pin) opts.pressure_pin = problem.pressure_pin(state.t);

  std::vector<double> x(3 * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[3 * i] = state.vel[0][i];
    x[3 * i + 1] = state.vel[1][i];
    x[3 * i + 2] = state.p[i];
  }

  // Scratch state sharing the frozen scalars; only vel/p vary with x.
  SolutionState scratch = state;
  const auto unpack = [n, &scratch](const std::vector<double>& y) {
    for (int i = 0; i < n; ++i) {
      scratch.vel[0][i] = y[3 * i];
      scratch.vel[1][i] = y[3 * i + 1];
      scratch.p[i] = y[3 * i + 2];
    }
  };

  const ResidualJacobianFn rj = [&](const std::vector<double>& y,
                                    std::vector<double>& r, LinearSystem& jac) {
    unpack(y);
    NsAssembly a = assemble_ns_residual_jacobian(mesh, scratch, prev, dt,
                                                 problem.params, problem.coeffs,
                                                 problem.bc, cache, opts);
    r = std::move(a.residual);
    jac = std::move(a.newton);
  };
  const ResidualFn rf = [&](const std::vector<double>& y,
                            std::vector<double>& r) {
    unpack(y);
    r = assemble_ns_residual(mesh, scratch, prev, dt, problem.params,
                             problem.coeffs, problem.bc, opts);
  };

  const NewtonReport rep =
      newton_solve(rj, rf, x, solvers.ns_newton, solvers.ns_linear);

  for (int i = 0; i < n; ++i) {
    state.vel[0][i] = x[3 * i];
    state.vel[1][i] = x[3 * i + 1];
    state.p[i] = x[3 * i + 2];
  }
  return rep.iterations;
}

}  // namespace

SolverSuite SolverSuite::all_direct() {
  SolverSuite s;
  s.poisson.method = LinearSolveConfig::Method::direct_lu;
  s.np.method = LinearSolveConfig::Method::direct_lu;
  s.ns_linear.method = LinearSolveConfig::Method::direct_lu;
  return s;
}

double steady_indicator(const SolutionState& a, const SolutionState& b,
                        double dt) {
  double diff = 0.0, scale = 0.0;
  state_diff(a, b, diff, scale);
  if (diff == 0.0) return 0.0;
  return diff / (dt * scale);
}

StepStats block_step(const Problem& problem, const SolutionState& prev,
                     SolutionState& state, double dt,
                     const BlockIterationConfig& cfg, SolverSuite& solvers,
                     const SystemCache& cache) {
  if (!(dt > 0.0)) throw std::invalid_argument("block_step: dt must be positive");
  if (!problem.mesh) throw std::invalid_argument("block_step: problem has no mesh");
  const Mesh& mesh = *problem.mesh;

  StepStats stats;
  state.t = prev.t + dt;

  SolutionState entry = state;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    if (k > 1) entry = state;

    {
      const LinearSystem sys =
          assemble_poisson(mesh, state, problem.params, problem.coeffs,
                           problem.bc, cache, problem.phi_forcing);
      state.phi = solve_poisson_system(sys, solvers);
    }

    for (int s = 0; s < problem.params.species_count(); ++s) {
      const ScalarForcing forcing =
          s < static_cast<int>(problem.species_forcing.size())
              ? problem.species_forcing[s]
              : ScalarForcing{};
      const LinearSystem sys = assemble_nernst_planck(
          mesh, s, state, prev, dt, problem.params, problem.coeffs, problem.bc,
          cache, forcing);
      state.c[s] = solve_linear(sys, solvers.np);
    }

    if (problem.solve_flow) {
      stats.newton_iterations +=
          solve_flow(problem, prev, state, entry, dt, solvers, cache);
    }

    double diff = 0.0, scale = 0.0;
    state_diff(state, entry, diff, scale);
    stats.block_iterations = k;
    stats.block_diff = scale > 0.0 ? diff / scale : diff;
    if (diff <= cfg.tol * scale) return stats;
  }
  throw SolverError("block_step: fixed-point loop failed to stagnate within " +
                        std::to_string(cfg.max_iterations) + " iterations",
                    stats.block_diff);
}

TransientResult run_transient(const Problem& problem, SolutionState initial,
                              const TransientConfig& cfg, SolverSuite& solvers,
                              const StepObserver& observer) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("run_transient: dt must be positive");
  if (cfg.n_steps < 0) throw std::invalid_argument("run_transient: n_steps must be >= 0");
  if (!problem.mesh) throw std::invalid_argument("run_transient: problem has no mesh");

  const SystemCache cache =
      make_system_cache(*problem.mesh, problem.solve_flow);

  TransientResult result;
  result.state = std::move(initial);

  SolutionState prev = result.state;
  for (int step = 1; step <= cfg.n_steps; ++step) {
    prev = result.state;
    const StepStats stats = block_step(problem, prev, result.state, cfg.dt,
                                       cfg.block, solvers, cache);
    result.steps_taken = step;
    result.total_block_iterations += stats.block_iterations;

    if (!state_finite(result.state)) {
      throw SolverError(
          "run_transient: non-finite state after step " + std::to_string(step),
          stats.block_diff);
    }
    if (observer) observer(step, result.state, stats);

    if (cfg.steady_tol > 0.0 &&
        steady_indicator(result.state, prev, cfg.dt) < cfg.steady_tol) {
      result.reached_steady = true;
      break;
    }
  }
  return result;
}

}  // namespace pnpfem
