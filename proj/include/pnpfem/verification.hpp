#pragma once

#include "pnpfem/fields.hpp"
#include "pnpfem/mesh.hpp"
#include "pnpfem/scales.hpp"
#include "pnpfem/solvers.hpp"
#include "pnpfem/stepping.hpp"

#include <map>
#include <string>
#include <vector>

namespace pnpfem {

/// Manufactured solution fields at one space-time point (binary ±1
/// electrolyte):
///   u  =  cos(2πt)·sin(2πx)·cos(2πy)
///   v  = −cos(2πt)·cos(2πx)·sin(2πy)
///   p  =  cos(2πt)·sin(2πx)·cos(2πy)
///   c₊ =  cos(2πt)·cos(2πx)·sin(2πy)
///   c₋ =  cos(2πt)·sin(2πx)·cos(2πy)
///   φ  = −cos(2πt)·cos(2πx)·sin(2πy)
/// The velocity is divergence-free by construction.
struct MmsPoint {
  double u, v, p, c_plus, c_minus, phi;
};

MmsPoint mms_exact(double t, double x, double y);

/// Analytic residual of the manufactured fields in the governing equations
/// (per-equation body forces):
///   f_ci  = ∂c/∂t + a·u·∇c − d·[∇²c + z(∇c·∇φ + c∇²φ)]
///   f_φ   = −poisson_factor·∇²φ − Σ z_i c_i
///   f_u,v = α_t·∂u/∂t + α_c·u·∇u + ∇p − ∇²u + body_force_factor·ρ_e∇φ
/// with a/d the NP advection/diffusion factors and α_t/α_c the flow factors.
struct MmsForcing {
  double c_plus, c_minus, phi;
  double u, v;
};

MmsForcing mms_forcing(double t, double x, double y, const NondimParams& params,
                       const EquationCoefficients& coeffs);

/// The same residuals evaluated by central finite differences of mms_exact
/// (step h in t, x and y) — the independent oracle for mms_forcing.
MmsForcing mms_fd_forcing(double t, double x, double y,
                          const NondimParams& params,
                          const EquationCoefficients& coeffs, double h);

/// Nodal interpolant of the manufactured fields at time t (2 species).
SolutionState mms_interpolant(const Mesh& mesh, double t);

/// Build the fully-specified manufactured problem on a mesh: strong Dirichlet
/// data for every variable on every boundary tag, analytic forcing for every
/// equation, and the pressure pinned to the exact value at node 0.
Problem make_mms_problem(const Mesh& mesh, const NondimParams& params);

/// Mesh-refinement study result: per field, L² errors on strictly finer
/// meshes and observed orders log₂(e_k/e_{k+1}) for mesh halving.
struct ConvergenceReport {
  std::vector<double> h;  ///< strictly decreasing element size
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, std::vector<double>> orders;
};

/// Run the manufactured problem on n×n structured quad meshes for each n in
/// `mesh_sizes`, marching to t_final with step dt, and report the final-time
/// L² errors and observed orders for fields "u" (vector), "c_plus",
/// "c_minus" and "phi". Block iteration runs at a tight tolerance so the
/// measured error is the spatial discretization error.
ConvergenceReport convergence_study(const std::vector<int>& mesh_sizes,
                                    double dt, double t_final,
                                    const NondimParams& params);

/// Final-time L² errors of one manufactured run on an n×n quad mesh
/// (keys as in ConvergenceReport), exposed for single-mesh checks.
std::map<std::string, double> mms_run_errors(int n, double dt, double t_final,
                                             const NondimParams& params);

/// CSV form of a ConvergenceReport: header
/// "h,<field>_error,<field>_order,..." with an empty order on the first row.
void write_convergence_csv(const ConvergenceReport& report,
                           const std::string& path);

}  // namespace pnpfem
