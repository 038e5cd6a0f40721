#pragma once

#include <cstddef>
#include <vector>

namespace hiphome {

// Row-pivoted dense LU of a small square block, factored in place.
class DenseLU {
 public:
  DenseLU() = default;
  // a is row-major n x n; throws SolverError when singular to rounding.
  DenseLU(const double* a, int n);

  int size() const { return n_; }
  void solve(double* x) const;                 // single right-hand side
  void solve_many(double* cols, int k) const;  // k column vectors, column-major

 private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> pivot_;
};

// Block-tridiagonal matrix: `blocks` diagonal blocks of order `block_size`,
// off-diagonals stored row-major; lower[i] couples block row i+1 to column i.
class BlockTriDiag {
 public:
  BlockTriDiag(int blocks, int block_size);

  int blocks() const { return blocks_; }
  int block_size() const { return size_; }
  std::size_t order() const { return static_cast<std::size_t>(blocks_) * size_; }

  double* diag(int i) { return diag_.data() + static_cast<std::size_t>(i) * size_ * size_; }
  double* lower(int i) { return lower_.data() + static_cast<std::size_t>(i) * size_ * size_; }
  double* upper(int i) { return upper_.data() + static_cast<std::size_t>(i) * size_ * size_; }
  const double* diag(int i) const {
    return diag_.data() + static_cast<std::size_t>(i) * size_ * size_;
  }
  const double* lower(int i) const {
    return lower_.data() + static_cast<std::size_t>(i) * size_ * size_;
  }
  const double* upper(int i) const {
    return upper_.data() + static_cast<std::size_t>(i) * size_ * size_;
  }

  std::vector<double> apply(const std::vector<double>& x) const;

 private:
  int blocks_;
  int size_;
  std::vector<double> diag_, lower_, upper_;
};

// Block Thomas factorisation; reusable across right-hand sides (cached for
// time stepping).  solve() runs forward/backward substitution only.
class BlockThomas {
 public:
  explicit BlockThomas(const BlockTriDiag& a);

  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  int blocks_;
  int size_;
  std::vector<DenseLU> factors_;     // LU of the transformed diagonal blocks
  std::vector<double> transformed_;  // W_i = inv(D'_i) U_i, column-major per block
  std::vector<double> lower_;        // copy of the sub-diagonal blocks, row-major
};

// Factor, solve, verify: relative residual above 1e-10 after one refinement
// step is a solver error.
std::vector<double> solve_block_tridiagonal(const BlockTriDiag& a, const std::vector<double>& rhs);

}  // namespace hiphome
