#pragma once

#include "pnpfem/sparse.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnpfem {

/// Thrown on solver breakdown / non-convergence; carries the last residual.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double final_residual)
      : std::runtime_error(what + " (final residual " +
                           std::to_string(final_residual) + ")"),
        final_residual_(final_residual) {}

  double final_residual() const { return final_residual_; }

 private:
  double final_residual_;
};

struct LinearSolveConfig {
  enum class Method { direct_lu, gmres };
  enum class Preconditioner { none, jacobi, ilu0 };

  Method method = Method::gmres;
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;  ///< strictly positive; effectively "off" by default
  int max_iterations = 5000;
  int restart = 100;
  Preconditioner preconditioner = Preconditioner::jacobi;
};

struct LinearSolveReport {
  int iterations = 0;
  double final_residual = 0.0;
};

/// Solve A x = rhs. direct_lu is exact up to roundoff; gmres iterates until
/// ||rhs - A x|| <= max(abs_tol, rel_tol * ||rhs||). Throws SolverError on
/// breakdown or non-convergence and std::invalid_argument on a structurally
/// singular matrix.
std::vector<double> solve_linear(const LinearSystem& system,
                                 const LinearSolveConfig& config,
                                 LinearSolveReport* report = nullptr);

/// Direct-solve session that reuses the sparse LU factorization as long as
/// the matrix (pattern and values) is unchanged between calls. The Poisson
/// matrix is state-independent, so transient runs factorize it once.
class DirectSolverSession {
 public:
  DirectSolverSession();
  ~DirectSolverSession();
  DirectSolverSession(DirectSolverSession&&) noexcept;
  DirectSolverSession& operator=(DirectSolverSession&&) noexcept;

  std::vector<double> solve(const LinearSystem& system);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct NewtonConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  int max_iterations = 50;
  double ls_contraction = 0.5;  ///< backtracking factor, in (0,1)
  double min_step = 1e-10;
  double armijo_c = 1e-4;       ///< sufficient-decrease constant
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  ///< ||R|| after each accepted step
};

/// Residual-only evaluation r(x) (used inside the line search).
using ResidualFn =
    std::function<void(const std::vector<double>&, std::vector<double>&)>;
/// Joint evaluation of r(x) and its Jacobian.
using ResidualJacobianFn = std::function<void(
    const std::vector<double>&, std::vector<double>&, LinearSystem&)>;

/// Newton iteration with Armijo backtracking on ||r||: steps are accepted
/// when ||r(x + a d)|| <= (1 - armijo_c * a) ||r(x)||. Converges when
/// ||r|| <= max(abs_tol, rel_tol * ||r0||). Throws SolverError when the
/// iteration budget is exhausted or the line search stalls below min_step.
NewtonReport newton_solve(const ResidualJacobianFn& residual_jacobian,
                          const ResidualFn& residual,
                          std::vector<double>& x, const NewtonConfig& config,
                          const LinearSolveConfig& linear_config);

}  // namespace pnpfem
