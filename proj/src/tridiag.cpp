#include "hiphome/tridiag.hpp"

#include <cmath>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

std::vector<double> TriDiag::apply(const std::vector<double>& x) const {
  const std::size_t n = rows();
  if (x.size() != n) throw ArgumentError("tridiag apply: size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    out[i] = s;
  }
  return out;
}

std::vector<double> solve_tridiagonal(const TriDiag& m, const std::vector<double>& rhs) {
  const std::size_t n = m.rows();
  if (rhs.size() != n) throw ArgumentError("tridiag solve: size mismatch");
  if (n == 0) return {};
  std::vector<double> c(n, 0.0), d(n, 0.0);
  double piv = m.diag[0];
  if (piv == 0.0) throw SolverError("tridiag solve: zero pivot at row 0");
  if (n > 1) c[0] = m.upper[0] / piv;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = m.diag[i] - m.lower[i - 1] * c[i - 1];
    if (piv == 0.0) throw SolverError("tridiag solve: zero pivot at row " + std::to_string(i));
    if (i + 1 < n) c[i] = m.upper[i] / piv;
    d[i] = (rhs[i] - m.lower[i - 1] * d[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

}  // namespace hiphome
