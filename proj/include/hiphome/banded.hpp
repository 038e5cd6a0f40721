#pragma once

#include <vector>

namespace hiphome {

// General banded matrix in LAPACK band storage with room for the
// factorisation fill-in; solved by dgbtrf/dgbtrs.
class BandedLU {
 public:
  BandedLU(int n, int kl, int ku);

  int order() const { return n_; }

  // Entry (i, j), 0-based; |i - j| must lie inside the band.
  double& at(int i, int j);
  void add(int i, int j, double v) { at(i, j) += v; }

  void factor();                                // throws SolverError on failure
  void solve(std::vector<double>& rhs) const;   // in place; requires factor()

 private:
  int n_, kl_, ku_, ldab_;
  bool factored_ = false;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

}  // namespace hiphome
