#include "hiphome/banded.hpp"

#include <string>

#include "hiphome/errors.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab,
             const int* ldab, int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const double* ab, const int* ldab, const int* ipiv, double* b, const int* ldb,
             int* info);
}

namespace hiphome {

BandedLU::BandedLU(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
  if (n < 1 || kl < 0 || ku < 0) throw ArgumentError("banded: invalid dimensions");
  ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
  ipiv_.assign(n_, 0);
}

double& BandedLU::at(int i, int j) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || i - j > kl_ || j - i > ku_)
    throw ArgumentError("banded: entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") outside the band");
  return ab_[static_cast<std::size_t>(j) * ldab_ + (kl_ + ku_ + i - j)];
}

void BandedLU::factor() {
  int info = 0;
  dgbtrf_(&n_, &n_, &kl_, &ku_, ab_.data(), &ldab_, ipiv_.data(), &info);
  if (info != 0)
    throw SolverError("banded factorisation failed (dgbtrf info = " + std::to_string(info) + ")");
  factored_ = true;
}

void BandedLU::solve(std::vector<double>& rhs) const {
  if (!factored_) throw SolverError("banded solve before factorisation");
  if (rhs.size() != static_cast<std::size_t>(n_))
    throw ArgumentError("banded solve: rhs size mismatch");
  const char trans = 'N';
  const int nrhs = 1;
  int info = 0;
  dgbtrs_(&trans, &n_, &kl_, &ku_, &nrhs, ab_.data(), &ldab_, ipiv_.data(), rhs.data(), &n_,
          &info);
  if (info != 0)
    throw SolverError("banded solve failed (dgbtrs info = " + std::to_string(info) + ")");
}

}  // namespace hiphome
