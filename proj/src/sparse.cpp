#include "pnpfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pnpfem {

CsrPattern::CsrPattern(int n, std::vector<int> row_ptr, std::vector<int> cols)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)) {
  if (static_cast<int>(row_ptr_.size()) != n_ + 1) {
    throw std::invalid_argument("CsrPattern: row_ptr size must be n+1");
  }
}

std::shared_ptr<const CsrPattern> CsrPattern::from_element_dofs(
    int n_dofs, const std::vector<std::vector<int>>& element_dofs) {
  std::vector<std::vector<int>> adj(n_dofs);
  for (int r = 0; r < n_dofs; ++r) adj[r].push_back(r);  // always keep the diagonal
  for (const auto& dofs : element_dofs) {
    for (int r : dofs) {
      if (r < 0 || r >= n_dofs) throw std::invalid_argument("CsrPattern: dof out of range");
      auto& row = adj[r];
      row.insert(row.end(), dofs.begin(), dofs.end());
    }
  }
  std::vector<int> row_ptr(n_dofs + 1, 0);
  size_t total = 0;
  for (int r = 0; r < n_dofs; ++r) {
    auto& row = adj[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    total += row.size();
    row_ptr[r + 1] = static_cast<int>(total);
  }
  std::vector<int> cols;
  cols.reserve(total);
  for (auto& row : adj) {
    cols.insert(cols.end(), row.begin(), row.end());
    row.clear();
    row.shrink_to_fit();
  }
  return std::make_shared<CsrPattern>(n_dofs, std::move(row_ptr), std::move(cols));
}

int CsrPattern::find(int r, int c) const {
  const auto first = cols_.begin() + row_ptr_[r];
  const auto last = cols_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return -1;
  return static_cast<int>(it - cols_.begin());
}

CsrMatrix::CsrMatrix(std::shared_ptr<const CsrPattern> pattern)
    : pattern_(std::move(pattern)) {
  values_.assign(pattern_->nnz(), 0.0);
}

CsrMatrix CsrMatrix::from_triplets(int n, const std::vector<Triplet>& triplets) {
  std::vector<Triplet> t = triplets;
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  std::vector<int> row_ptr(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(t.size());
  vals.reserve(t.size());
  for (size_t i = 0; i < t.size();) {
    const int r = t[i].r;
    const int c = t[i].c;
    if (r < 0 || r >= n || c < 0 || c >= n) {
      throw std::invalid_argument("from_triplets: index out of range");
    }
    double v = 0.0;
    while (i < t.size() && t[i].r == r && t[i].c == c) v += t[i++].v;
    cols.push_back(c);
    vals.push_back(v);
    row_ptr[r + 1] = static_cast<int>(cols.size());
  }
  for (int r = 0; r < n; ++r) row_ptr[r + 1] = std::max(row_ptr[r + 1], row_ptr[r]);
  CsrMatrix m;
  m.pattern_ = std::make_shared<CsrPattern>(n, std::move(row_ptr), std::move(cols));
  m.values_ = std::move(vals);
  return m;
}

void CsrMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void CsrMatrix::add(int r, int c, double v) {
  const int idx = pattern_->find(r, c);
  if (idx < 0) {
    throw std::invalid_argument("CsrMatrix::add: entry (" + std::to_string(r) +
                                "," + std::to_string(c) + ") outside the pattern");
  }
  values_[idx] += v;
}

double CsrMatrix::coeff(int r, int c) const {
  const int idx = pattern_->find(r, c);
  return idx < 0 ? 0.0 : values_[idx];
}

void CsrMatrix::mat_vec(const std::vector<double>& x, std::vector<double>& y) const {
  const auto& rp = pattern_->row_ptr();
  const auto& cols = pattern_->cols();
  const int n = pattern_->n();
  y.resize(n);
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = rp[r]; k < rp[r + 1]; ++k) s += values_[k] * x[cols[k]];
    y[r] = s;
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace pnpfem
