#pragma once

#include <memory>
#include <vector>

namespace pnpfem {

/// Immutable CSR sparsity pattern (row pointers + sorted column indices),
/// shareable across repeated assemblies of systems with identical structure.
class CsrPattern {
 public:
  CsrPattern(int n, std::vector<int> row_ptr, std::vector<int> cols);

  /// Build from per-element dof lists: every (r,c) pair of each list becomes
  /// an entry; the diagonal is always included. Columns are sorted and
  /// deduplicated, so assembly order is deterministic.
  static std::shared_ptr<const CsrPattern> from_element_dofs(
      int n_dofs, const std::vector<std::vector<int>>& element_dofs);

  int n() const { return n_; }
  int nnz() const { return static_cast<int>(cols_.size()); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }

  /// Value index of entry (r,c), or -1 when the pattern lacks it.
  int find(int r, int c) const;

 private:
  int n_;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
};

struct Triplet {
  int r;
  int c;
  double v;
};

/// Square sparse matrix in CSR form with sorted, duplicate-free columns.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  explicit CsrMatrix(std::shared_ptr<const CsrPattern> pattern);

  /// Finalize a triplet list: duplicates are summed, columns sorted.
  static CsrMatrix from_triplets(int n, const std::vector<Triplet>& triplets);

  int rows() const { return pattern_ ? pattern_->n() : 0; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const CsrPattern& pattern() const { return *pattern_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  void set_zero();

  /// Accumulate into an existing entry; throws if (r,c) is outside the pattern.
  void add(int r, int c, double v);

  /// Value of entry (r,c); zero when absent from the pattern.
  double coeff(int r, int c) const;

  /// y = A x.
  void mat_vec(const std::vector<double>& x, std::vector<double>& y) const;

 private:
  std::shared_ptr<const CsrPattern> pattern_;
  std::vector<double> values_;
};

/// Assembled linear system A x = rhs.
struct LinearSystem {
  CsrMatrix A;
  std::vector<double> rhs;

  int n() const { return A.rows(); }
};

/// Euclidean norm / dot product helpers shared by the solvers.
double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

}  // namespace pnpfem
