#pragma once

#include "pnpfem/config.hpp"
#include "pnpfem/fields.hpp"
#include "pnpfem/postprocess.hpp"

#include <map>
#include <string>
#include <vector>

namespace pnpfem {

/// Outcome of one case execution.
struct RunResult {
  int steps_taken = 0;
  bool reached_steady = false;
  long total_block_iterations = 0;
  SolutionState state;  ///< final state (transient cases)
  FluxReport flux;      ///< boundary-flux table (transient cases)
  std::vector<double> net_flux;  ///< per-species net boundary flux
  /// mms_convergence cases: observed orders per field, coarse→fine pairs.
  std::map<std::string, std::vector<double>> mms_orders;
};

/// Execute a case and write its artifacts into out_dir (created if missing):
/// summary.csv always; flux.csv, profile.csv, VTK snapshots and final.vtk per
/// [output]; convergence.csv for mms_convergence cases. Deterministic: two
/// runs of the same config produce byte-identical CSV files.
RunResult run_case(const CaseConfig& config, const std::string& out_dir);

/// One row of the Λ-sweep table.
struct SweepRow {
  double lambda = 0.0;
  ScalingMode mode = ScalingMode::Bulk;
  double dt = 0.0;
  int steps_taken = 0;
  bool reached_steady = false;
  double membrane_flux = 0.0;  ///< weak-side cation flux (outflux)
  double far_flux = 0.0;       ///< strong-side cation flux (influx)
  double mismatch = 0.0;       ///< ||membrane| − |far|| / |far|
};

/// Λ sweep over a 1D membrane case: for each Λ the case is re-run with
/// membrane scaling below `membrane_below` and a time step shrunk with Λ² to
/// keep the segregated charge coupling contractive; runs warm-start from the
/// previous Λ's steady state. Writes sweep.csv into out_dir and returns the
/// rows (ordered as `lambdas`).
std::vector<SweepRow> run_lambda_sweep(const CaseConfig& base,
                                       const std::vector<double>& lambdas,
                                       const std::string& out_dir,
                                       double membrane_below = 1e-2);

}  // namespace pnpfem
