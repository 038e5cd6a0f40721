#pragma once

#include <vector>

namespace hiphome {

// Tridiagonal matrix with n rows; lower/upper hold n-1 entries.
struct TriDiag {
  std::vector<double> lower, diag, upper;

  explicit TriDiag(std::size_t n = 0) { resize(n); }
  void resize(std::size_t n) {
    diag.assign(n, 0.0);
    lower.assign(n > 0 ? n - 1 : 0, 0.0);
    upper.assign(n > 0 ? n - 1 : 0, 0.0);
  }
  std::size_t rows() const { return diag.size(); }

  std::vector<double> apply(const std::vector<double>& x) const;
};

// Thomas algorithm; the system must not require pivoting (diagonally
// dominant or otherwise well-behaved rows).  Throws SolverError on a zero
// pivot.
std::vector<double> solve_tridiagonal(const TriDiag& m, const std::vector<double>& rhs);

}  // namespace hiphome
