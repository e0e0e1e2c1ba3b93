#include "pnpfem/solvers.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pnpfem {

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const CsrMatrix& A) {
  const int n = A.rows();
  const Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> map(
      n, n, A.nnz(), A.pattern().row_ptr().data(), A.pattern().cols().data(),
      A.values().data());
  return EigenSparse(map);
}

std::vector<double> solve_direct(const LinearSystem& system) {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  const EigenSparse A = to_eigen(system.A);
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) {
    throw std::invalid_argument("direct_lu: matrix is singular (" +
                                lu.lastErrorMessage() + ")");
  }
  Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), system.rhs.size());
  const Eigen::VectorXd x = lu.solve(b);
  return std::vector<double>(x.data(), x.data() + x.size());
}

/// Preconditioner application interface: z = M^{-1} r.
struct Preconditioner {
  virtual ~Preconditioner() = default;
  virtual void apply(const std::vector<double>& r, std::vector<double>& z) const = 0;
};

struct IdentityPrecond final : Preconditioner {
  void apply(const std::vector<double>& r, std::vector<double>& z) const override {
    z = r;
  }
};

struct JacobiPrecond final : Preconditioner {
  std::vector<double> inv_diag;

  explicit JacobiPrecond(const CsrMatrix& A) {
    const int n = A.rows();
    inv_diag.assign(n, 0.0);
    for (int r = 0; r < n; ++r) {
      const double d = A.coeff(r, r);
      if (d == 0.0) {
        throw std::invalid_argument("jacobi preconditioner: zero diagonal at row " +
                                    std::to_string(r));
      }
      inv_diag[r] = 1.0 / d;
    }
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) const override {
    z.resize(r.size());
    for (size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inv_diag[i];
  }
};

/// Zero-fill incomplete LU on the matrix's own sparsity pattern.
struct Ilu0Precond final : Preconditioner {
  const CsrPattern* pattern;
  std::vector<double> vals;
  std::vector<int> diag;  ///< value index of the diagonal per row

  explicit Ilu0Precond(const CsrMatrix& A)
      : pattern(&A.pattern()), vals(A.values()) {
    const int n = pattern->n();
    const auto& rp = pattern->row_ptr();
    const auto& cols = pattern->cols();
    diag.assign(n, -1);
    for (int r = 0; r < n; ++r) {
      for (int k = rp[r]; k < rp[r + 1]; ++k) {
        if (cols[k] == r) diag[r] = k;
      }
      if (diag[r] < 0) {
        throw std::invalid_argument("ilu0: missing diagonal entry at row " +
                                    std::to_string(r));
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int kk = rp[i]; kk < rp[i + 1] && cols[kk] < i; ++kk) {
        const int k = cols[kk];
        const double pivot = vals[diag[k]];
        if (pivot == 0.0) {
          throw std::invalid_argument("ilu0: zero pivot at row " + std::to_string(k));
        }
        const double lik = vals[kk] / pivot;
        vals[kk] = lik;
        for (int jj = diag[k] + 1; jj < rp[k + 1]; ++jj) {
          const int pos = pattern->find(i, cols[jj]);
          if (pos >= 0) vals[pos] -= lik * vals[jj];
        }
      }
      if (vals[diag[i]] == 0.0) {
        throw std::invalid_argument("ilu0: zero pivot at row " + std::to_string(i));
      }
    }
  }

  void apply(const std::vector<double>& r, std::vector<double>& z) const override {
    const int n = pattern->n();
    const auto& rp = pattern->row_ptr();
    const auto& cols = pattern->cols();
    z.resize(n);
    // Forward solve with unit-diagonal L.
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      for (int k = rp[i]; k < diag[i]; ++k) s -= vals[k] * z[cols[k]];
      z[i] = s;
    }
    // Backward solve with U.
    for (int i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (int k = diag[i] + 1; k < rp[i + 1]; ++k) s -= vals[k] * z[cols[k]];
      z[i] = s / vals[diag[i]];
    }
  }
};

std::unique_ptr<Preconditioner> make_precond(const CsrMatrix& A,
                                             LinearSolveConfig::Preconditioner kind) {
  switch (kind) {
    case LinearSolveConfig::Preconditioner::none:
      return std::make_unique<IdentityPrecond>();
    case LinearSolveConfig::Preconditioner::jacobi:
      return std::make_unique<JacobiPrecond>(A);
    case LinearSolveConfig::Preconditioner::ilu0:
      return std::make_unique<Ilu0Precond>(A);
  }
  throw std::invalid_argument("unknown preconditioner");
}

/// Restarted GMRES with right preconditioning: the Arnoldi recursion runs on
/// A M^{-1}, so the minimized quantity is the true residual and restarts
/// cannot increase it.
std::vector<double> solve_gmres(const LinearSystem& system,
                                const LinearSolveConfig& cfg,
                                LinearSolveReport* report) {
  const CsrMatrix& A = system.A;
  const int n = A.rows();
  if (static_cast<int>(system.rhs.size()) != n) {
    throw std::invalid_argument("solve_linear: rhs length does not match matrix");
  }
  const auto precond = make_precond(A, cfg.preconditioner);

  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(system.rhs);
  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * bnorm);
  if (bnorm == 0.0) {
    if (report) *report = {0, 0.0};
    return x;
  }

  std::vector<double> r = system.rhs;  // r = b - A*0
  double beta = bnorm;
  int total_iters = 0;
  const int m = std::max(1, cfg.restart);

  std::vector<std::vector<double>> V;
  std::vector<std::vector<double>> H;  // H[j] holds column j (length j+2)
  std::vector<double> cs(m), sn(m), g(m + 1);
  std::vector<double> z(n), w(n);

  while (true) {
    if (beta <= tol) break;
    if (total_iters >= cfg.max_iterations) {
      throw SolverError("gmres: max iterations exceeded", beta);
    }

    V.assign(1, r);
    for (double& v : V[0]) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    H.clear();

    int j = 0;
    bool happy = false;
    for (; j < m && total_iters < cfg.max_iterations; ++j) {
      ++total_iters;
      precond->apply(V[j], z);
      A.mat_vec(z, w);

      H.emplace_back(j + 2, 0.0);
      auto& hj = H[j];
      for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
        const double h = dot(w, V[i]);
        hj[i] = h;
        for (int k = 0; k < n; ++k) w[k] -= h * V[i][k];
      }
      const double hnext = norm2(w);
      hj[j + 1] = hnext;
      if (hnext > 0.0) {
        V.emplace_back(w);
        for (double& v : V.back()) v /= hnext;
      }

      // Apply the accumulated Givens rotations, then create the new one.
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * hj[i] + sn[i] * hj[i + 1];
        hj[i + 1] = -sn[i] * hj[i] + cs[i] * hj[i + 1];
        hj[i] = t;
      }
      const double denom = std::hypot(hj[j], hj[j + 1]);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = hj[j] / denom;
        sn[j] = hj[j + 1] / denom;
      }
      hj[j] = cs[j] * hj[j] + sn[j] * hj[j + 1];
      hj[j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];

      if (std::abs(g[j + 1]) <= tol || hnext == 0.0) {
        happy = (hnext == 0.0);
        ++j;
        break;
      }
    }

    // Solve the triangular system and update x through the preconditioner.
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H[k][i] * y[k];
      y[i] = s / H[i][i];
    }
    std::vector<double> update(n, 0.0);
    for (int i = 0; i < j; ++i) {
      for (int k = 0; k < n; ++k) update[k] += y[i] * V[i][k];
    }
    precond->apply(update, z);
    for (int k = 0; k < n; ++k) x[k] += z[k];

    A.mat_vec(x, w);
    const double beta_prev = beta;
    for (int k = 0; k < n; ++k) r[k] = system.rhs[k] - w[k];
    beta = norm2(r);
    if (beta <= tol) break;
    if (happy) {
      throw SolverError("gmres: breakdown (Krylov space exhausted)", beta);
    }
    if (beta >= beta_prev * (1.0 - 1e-14)) {
      throw SolverError("gmres: stagnation across a restart cycle", beta);
    }
  }

  if (report) *report = {total_iters, beta};
  return x;
}

}  // namespace

std::vector<double> solve_linear(const LinearSystem& system,
                                 const LinearSolveConfig& config,
                                 LinearSolveReport* report) {
  if (system.A.rows() == 0) throw std::invalid_argument("solve_linear: empty system");
  if (static_cast<int>(system.rhs.size()) != system.A.rows()) {
    throw std::invalid_argument("solve_linear: rhs length does not match matrix");
  }
  if (config.method == LinearSolveConfig::Method::direct_lu) {
    auto x = solve_direct(system);
    if (report) {
      std::vector<double> Ax;
      system.A.mat_vec(x, Ax);
      for (size_t i = 0; i < Ax.size(); ++i) Ax[i] -= system.rhs[i];
      *report = {1, norm2(Ax)};
    }
    return x;
  }
  return solve_gmres(system, config, report);
}

struct DirectSolverSession::Impl {
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  std::vector<int> row_ptr;
  std::vector<int> cols;
  std::vector<double> vals;
  bool ready = false;

  bool matches(const CsrMatrix& A) const {
    return ready && row_ptr == A.pattern().row_ptr() &&
           cols == A.pattern().cols() && vals == A.values();
  }
};

DirectSolverSession::DirectSolverSession() : impl_(std::make_unique<Impl>()) {}
DirectSolverSession::~DirectSolverSession() = default;
DirectSolverSession::DirectSolverSession(DirectSolverSession&&) noexcept = default;
DirectSolverSession& DirectSolverSession::operator=(DirectSolverSession&&) noexcept =
    default;

std::vector<double> DirectSolverSession::solve(const LinearSystem& system) {
  if (!impl_->matches(system.A)) {
    const EigenSparse A = to_eigen(system.A);
    impl_->lu.analyzePattern(A);
    impl_->lu.factorize(A);
    if (impl_->lu.info() != Eigen::Success) {
      impl_->ready = false;
      throw std::invalid_argument("direct_lu: matrix is singular (" +
                                  impl_->lu.lastErrorMessage() + ")");
    }
    impl_->row_ptr = system.A.pattern().row_ptr();
    impl_->cols = system.A.pattern().cols();
    impl_->vals = system.A.values();
    impl_->ready = true;
  }
  Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), system.rhs.size());
  const Eigen::VectorXd x = impl_->lu.solve(b);
  return std::vector<double>(x.data(), x.data() + x.size());
}

NewtonReport newton_solve(const ResidualJacobianFn& residual_jacobian,
                          const ResidualFn& residual, std::vector<double>& x,
                          const NewtonConfig& config,
                          const LinearSolveConfig& linear_config) {
  if (!(config.ls_contraction > 0.0 && config.ls_contraction < 1.0)) {
    throw std::invalid_argument("newton_solve: ls_contraction must be in (0,1)");
  }

  NewtonReport rep;
  std::vector<double> r;
  LinearSystem jac;

  residual_jacobian(x, r, jac);
  double rnorm = norm2(r);
  rep.initial_residual = rnorm;
  rep.residual_history.push_back(rnorm);
  const double tol = std::max(config.abs_tol, config.rel_tol * rnorm);

  if (rnorm <= config.abs_tol) {
    rep.converged = true;
    rep.final_residual = rnorm;
    return rep;
  }

  std::vector<double> trial(x.size()), r_trial;
  for (int it = 1; it <= config.max_iterations; ++it) {
    // Newton direction: J d = -r.
    LinearSystem step_system;
    step_system.A = jac.A;
    step_system.rhs.resize(r.size());
    for (size_t i = 0; i < r.size(); ++i) step_system.rhs[i] = -r[i];
    const std::vector<double> d = solve_linear(step_system, linear_config);

    // Backtracking line search with the Armijo sufficient-decrease test.
    double alpha = 1.0;
    double trial_norm = 0.0;
    while (true) {
      for (size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * d[i];
      residual(trial, r_trial);
      trial_norm = norm2(r_trial);
      if (trial_norm <= (1.0 - config.armijo_c * alpha) * rnorm) break;
      alpha *= config.ls_contraction;
      if (alpha < config.min_step) {
        throw SolverError("newton_solve: line search stalled below min step",
                          rnorm);
      }
    }

    x = trial;
    rnorm = trial_norm;
    rep.iterations = it;
    rep.residual_history.push_back(rnorm);
    if (rnorm <= tol) {
      rep.converged = true;
      break;
    }
    if (it == config.max_iterations) {
      throw SolverError("newton_solve: max iterations exceeded", rnorm);
    }
    residual_jacobian(x, r, jac);
    rnorm = norm2(r);  // refresh (identical up to evaluation determinism)
  }

  rep.final_residual = rnorm;
  return rep;
}

}  // namespace pnpfem
