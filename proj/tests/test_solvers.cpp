#include "doctest.h"

#include "pnpfem/solvers.hpp"
#include "pnpfem/sparse.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace pnpfem;

namespace {

/// 1D Laplacian tridiagonal system of size n with rhs = e_0 (positive
/// definite, well conditioned at these sizes).
LinearSystem laplacian_system(int n) {
  std::vector<Triplet> trips;
  for (int i = 0; i < n; ++i) {
    trips.push_back({i, i, 2.0});
    if (i > 0) trips.push_back({i, i - 1, -1.0});
    if (i + 1 < n) trips.push_back({i, i + 1, -1.0});
  }
  LinearSystem sys;
  sys.A = CsrMatrix::from_triplets(n, trips);
  sys.rhs.assign(n, 0.0);
  sys.rhs[0] = 1.0;
  return sys;
}

double residual_norm(const LinearSystem& sys, const std::vector<double>& x) {
  std::vector<double> ax(sys.n());
  sys.A.mat_vec(x, ax);
  double s = 0.0;
  for (int i = 0; i < sys.n(); ++i) s += (sys.rhs[i] - ax[i]) * (sys.rhs[i] - ax[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE_BEGIN("solvers");

TEST_CASE("CSR from_triplets sums duplicates and sorts columns") {
  const std::vector<Triplet> trips = {
      {0, 1, 2.0}, {0, 0, 1.0}, {0, 1, 3.0}, {1, 1, 4.0}, {1, 0, -1.0}};
  const CsrMatrix A = CsrMatrix::from_triplets(2, trips);
  CHECK(A.rows() == 2);
  CHECK(A.coeff(0, 0) == doctest::Approx(1.0));
  CHECK(A.coeff(0, 1) == doctest::Approx(5.0));
  CHECK(A.coeff(1, 0) == doctest::Approx(-1.0));
  CHECK(A.coeff(1, 1) == doctest::Approx(4.0));
  CHECK(A.coeff(1, 5) == 0.0);  // out-of-pattern reads as zero

  std::vector<double> y(2);
  A.mat_vec({1.0, 2.0}, y);
  CHECK(y[0] == doctest::Approx(11.0));
  CHECK(y[1] == doctest::Approx(7.0));
}

TEST_CASE("CsrPattern from element dofs includes couplings and the diagonal") {
  const auto pat = CsrPattern::from_element_dofs(4, {{0, 1}, {1, 2}});
  CHECK(pat->n() == 4);
  CHECK(pat->find(0, 1) >= 0);
  CHECK(pat->find(1, 0) >= 0);
  CHECK(pat->find(2, 1) >= 0);
  CHECK(pat->find(0, 2) == -1);   // never share an element
  CHECK(pat->find(3, 3) >= 0);    // isolated dof still has its diagonal
  CsrMatrix A(pat);
  A.add(1, 2, 4.0);
  A.add(1, 2, 0.5);
  CHECK(A.coeff(1, 2) == doctest::Approx(4.5));
  CHECK_THROWS_AS(A.add(0, 2, 1.0), std::exception);
}

TEST_CASE("direct solve reproduces a hand-inverted 2x2 system") {
  // [[2,1],[1,3]] x = (3, 5): det = 5, x = ((9-5)/5, (10-3)/5) = (0.8, 1.4).
  LinearSystem sys;
  sys.A = CsrMatrix::from_triplets(
      2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  sys.rhs = {3.0, 5.0};
  LinearSolveConfig cfg;
  cfg.method = LinearSolveConfig::Method::direct_lu;
  const auto x = solve_linear(sys, cfg);
  CHECK(x[0] == doctest::Approx(0.8).epsilon(1e-13));
  CHECK(x[1] == doctest::Approx(1.4).epsilon(1e-13));
}

TEST_CASE("gmres with jacobi and ilu0 match the direct solution") {
  const LinearSystem sys = laplacian_system(50);
  LinearSolveConfig direct;
  direct.method = LinearSolveConfig::Method::direct_lu;
  const auto xd = solve_linear(sys, direct);

  for (auto pre : {LinearSolveConfig::Preconditioner::none,
                   LinearSolveConfig::Preconditioner::jacobi,
                   LinearSolveConfig::Preconditioner::ilu0}) {
    LinearSolveConfig cfg;
    cfg.method = LinearSolveConfig::Method::gmres;
    cfg.preconditioner = pre;
    cfg.rel_tol = 1e-12;
    LinearSolveReport report;
    const auto xg = solve_linear(sys, cfg, &report);
    for (int i = 0; i < sys.n(); ++i) {
      CHECK(xg[i] == doctest::Approx(xd[i]).epsilon(1e-8));
    }
    CHECK(report.iterations > 0);
    CHECK(residual_norm(sys, xg) <= 1e-10);
  }
}

TEST_CASE("solvers reject a structurally singular matrix") {
  // Row 1 has no entries at all (empty row in the pattern).
  LinearSystem sys;
  sys.A = CsrMatrix::from_triplets(2, {{0, 0, 1.0}});
  sys.rhs = {1.0, 1.0};
  LinearSolveConfig direct;
  direct.method = LinearSolveConfig::Method::direct_lu;
  CHECK_THROWS_AS(solve_linear(sys, direct), std::invalid_argument);
}

TEST_CASE("gmres reports non-convergence through SolverError") {
  const LinearSystem sys = laplacian_system(200);
  LinearSolveConfig cfg;
  cfg.method = LinearSolveConfig::Method::gmres;
  cfg.preconditioner = LinearSolveConfig::Preconditioner::none;
  cfg.rel_tol = 1e-14;
  cfg.max_iterations = 3;  // far too few for an unpreconditioned Laplacian
  cfg.restart = 3;
  CHECK_THROWS_AS(solve_linear(sys, cfg), SolverError);
  try {
    solve_linear(sys, cfg);
  } catch (const SolverError& err) {
    CHECK(err.final_residual() > 0.0);
  }
}

TEST_CASE("direct session reuses its factorization across solves") {
  LinearSystem sys = laplacian_system(80);
  DirectSolverSession session;
  const auto x1 = session.solve(sys);
  CHECK(residual_norm(sys, x1) <= 1e-10);

  // Same matrix, new rhs: must still be solved correctly.
  sys.rhs.assign(sys.n(), 1.0);
  const auto x2 = session.solve(sys);
  CHECK(residual_norm(sys, x2) <= 1e-9);

  // Changed values: the session must refactorize, not reuse stale factors.
  sys.A.values()[0] = 10.0;
  const auto x3 = session.solve(sys);
  CHECK(residual_norm(sys, x3) <= 1e-9);
}

TEST_CASE("newton solves a linear problem in one step") {
  // r(x) = A x - b with the 2x2 system above.
  LinearSystem base;
  base.A = CsrMatrix::from_triplets(
      2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}});
  base.rhs = {3.0, 5.0};

  auto residual = [&](const std::vector<double>& x, std::vector<double>& r) {
    base.A.mat_vec(x, r);
    for (int i = 0; i < 2; ++i) r[i] -= base.rhs[i];
  };
  auto residual_jacobian = [&](const std::vector<double>& x,
                               std::vector<double>& r, LinearSystem& jac) {
    residual(x, r);
    jac.A = base.A;
    jac.rhs = r;
    for (double& v : jac.rhs) v = -v;
  };

  std::vector<double> x = {0.0, 0.0};
  LinearSolveConfig lin;
  lin.method = LinearSolveConfig::Method::direct_lu;
  const NewtonReport report =
      newton_solve(residual_jacobian, residual, x, NewtonConfig{}, lin);
  CHECK(report.converged);
  CHECK(report.iterations == 1);
  CHECK(x[0] == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx(1.4).epsilon(1e-10));
}

TEST_CASE("newton converges quadratically on x^2 = 4") {
  auto residual = [](const std::vector<double>& x, std::vector<double>& r) {
    r.assign(1, x[0] * x[0] - 4.0);
  };
  auto residual_jacobian = [&](const std::vector<double>& x,
                               std::vector<double>& r, LinearSystem& jac) {
    residual(x, r);
    jac.A = CsrMatrix::from_triplets(1, {{0, 0, 2.0 * x[0]}});
    jac.rhs = {-r[0]};
  };
  std::vector<double> x = {3.0};
  LinearSolveConfig lin;
  lin.method = LinearSolveConfig::Method::direct_lu;
  NewtonConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 0.0;
  const NewtonReport report = newton_solve(residual_jacobian, residual, x, cfg, lin);
  CHECK(report.converged);
  CHECK(report.iterations <= 8);
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(report.final_residual <= 1e-12);
  REQUIRE(!report.residual_history.empty());
  // Residuals decrease monotonically under the Armijo safeguard.
  double prev = report.initial_residual;
  for (double r : report.residual_history) {
    CHECK(r <= prev + 1e-15);
    prev = r;
  }
}

TEST_CASE("newton raises SolverError when the budget is exhausted") {
  auto residual = [](const std::vector<double>& x, std::vector<double>& r) {
    r.assign(1, std::cos(x[0]) + 2.0);  // never zero
  };
  auto residual_jacobian = [&](const std::vector<double>& x,
                               std::vector<double>& r, LinearSystem& jac) {
    residual(x, r);
    jac.A = CsrMatrix::from_triplets(1, {{0, 0, -std::sin(x[0]) + 1e-3}});
    jac.rhs = {-r[0]};
  };
  std::vector<double> x = {0.5};
  LinearSolveConfig lin;
  lin.method = LinearSolveConfig::Method::direct_lu;
  NewtonConfig cfg;
  cfg.max_iterations = 4;
  CHECK_THROWS_AS(newton_solve(residual_jacobian, residual, x, cfg, lin),
                  SolverError);
}

TEST_CASE("dot and norm2 helpers") {
  CHECK(dot({1.0, 2.0, 3.0}, {4.0, -5.0, 6.0}) == doctest::Approx(12.0));
  CHECK(norm2({3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(norm2({}) == 0.0);
}

TEST_SUITE_END();
