#include "hiphome/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiphome/errors.hpp"
#include "hiphome/tridiag.hpp"

namespace hiphome {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_samples(const std::vector<double>& values) {
  if (values.size() < 3 || values.size() % 2 == 0)
    throw ArgumentError("transverse samples: count must be odd and >= 3");
}

}  // namespace

double transverse_average(const std::vector<double>& values, double half_width) {
  check_samples(values);
  if (!(half_width > 0.0)) throw ArgumentError("transverse average: half width must be positive");
  const double dy = 2.0 * half_width / (values.size() - 1);
  return simpson_integral(values, dy) / (2.0 * half_width);
}

std::vector<double> fluctuation(const std::vector<double>& values, double half_width) {
  const double mean = transverse_average(values, half_width);
  std::vector<double> out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) out[j] = values[j] - mean;
  // A spread at rounding level is an exactly constant input; collapse it so
  // downstream quantities built from the fluctuation vanish identically.
  if (max_abs(out) <= 4.0 * 1e-16 * std::max(1.0, std::abs(mean)))
    std::fill(out.begin(), out.end(), 0.0);
  return out;
}

CubicInterpolant CorrectorSet::interpolant(int i) const {
  if (i < 0 || i > order) throw ArgumentError("corrector interpolant: index out of range");
  return CubicInterpolant(y.front(), spacing(), chi[static_cast<std::size_t>(i)]);
}

std::pair<double, double> CorrectorSet::boundary_flux(int i) const {
  if (i < 1 || i > order) throw ArgumentError("boundary flux: index out of range");
  const std::vector<double>& f = flux[static_cast<std::size_t>(i)];
  return {std::abs(f.front()), std::abs(f.back())};
}

CorrectorSet compute_correctors(const VelocityProfile& profile, const ChannelDomain& dom,
                                double diffusion, int order, const CorrectorOptions& opts) {
  if (order < 0) throw ArgumentError("correctors: order must be non-negative");
  if (!(diffusion > 0.0)) throw ArgumentError("correctors: diffusion must be positive");
  if (opts.grid_panels < 64 || opts.grid_panels % 2 != 0)
    throw ArgumentError("correctors: grid_panels must be even and >= 64");

  const int n = opts.grid_panels;
  const double Y = dom.half_width_rescaled();
  const double dy = 2.0 * Y / n;

  CorrectorSet set;
  set.domain = dom;
  set.diffusion = diffusion;
  set.order = order;
  set.y.resize(n + 1);
  set.u_hat.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    set.y[j] = -Y + j * dy;
    set.u_hat[j] = rescaled_velocity(profile, dom, set.y[j]);
    if (!std::isfinite(set.u_hat[j]))
      throw DomainError("correctors: velocity not finite at y = " + std::to_string(set.y[j]));
  }
  set.u_mean = transverse_average(set.u_hat, Y);
  const std::vector<double> u_fluct = fluctuation(set.u_hat, Y);

  set.chi.assign(order + 1, {});
  set.source.assign(order + 1, {});
  set.antider.assign(order + 1, {});
  set.flux.assign(order + 1, {});
  set.source_average.assign(order + 1, 0.0);
  set.chi[0].assign(n + 1, 1.0);

  const int mid = n / 2;
  for (int i = 1; i <= order; ++i) {
    std::vector<double> phi(n + 1);
    const std::vector<double>& prev = set.chi[i - 1];
    if (i >= 2) {
      const std::vector<double>& prev2 = set.chi[i - 2];
      for (int j = 0; j <= n; ++j) phi[j] = u_fluct[j] * prev[j] - diffusion * prev2[j];
    } else {
      phi = u_fluct;
    }

    // The reflection-equivariant antiderivative keeps correctors of even
    // profiles symmetric to rounding, which later orthonormalisation
    // amplifies by the inverse of each order's shrinking amplitude.
    std::vector<double> cum = cumulative_simpson_symmetric(phi, dy);
    const double phi_mean = (cum.back() - cum.front()) / (2.0 * Y);
    std::vector<double> Phi(n + 1);
    for (int j = 0; j <= n; ++j) Phi[j] = cum[j] - cum[mid];

    std::vector<double> cum2 = cumulative_simpson_symmetric(Phi, dy);
    const double phi_at_left = Phi[0];
    std::vector<double> chi(n + 1), flux(n + 1);
    for (int j = 0; j <= n; ++j) {
      const double yj = set.y[j];
      const double Psi = cum2[j] - cum2[mid];
      chi[j] = (Psi - phi_at_left * yj - (Y * yj + 0.5 * yj * yj) * phi_mean) / diffusion;
      flux[j] = Phi[j] - phi_at_left - (Y + yj) * phi_mean;
    }

    const double tol = opts.tol_bc_rel * std::max(1.0, max_abs(phi));
    const double res = std::max(std::abs(flux.front()), std::abs(flux.back()));
    if (!(res <= tol))
      throw ResolutionError(res, "correctors: boundary flux residual " + std::to_string(res) +
                                     " exceeds tolerance at order " + std::to_string(i));

    set.source[i] = std::move(phi);
    set.antider[i] = std::move(Phi);
    set.flux[i] = std::move(flux);
    set.source_average[i] = phi_mean;
    set.chi[i] = std::move(chi);
  }
  return set;
}

std::vector<double> oracle_corrector_bvp(const CorrectorSet& lower, int i) {
  if (i < 1) throw ArgumentError("corrector oracle: index must be >= 1");
  if (i - 1 > lower.order)
    throw ArgumentError("corrector oracle: lower-order correctors up to i-1 required");
  const int n = static_cast<int>(lower.y.size()) - 1;
  const double Y = lower.domain.half_width_rescaled();
  const double dy = lower.spacing();
  const double D = lower.diffusion;

  // Rebuild the source from the lower-order correctors, then subtract its
  // average to obtain the right-hand side of D chi'' = fluct(phi).
  std::vector<double> u_fluct = fluctuation(lower.u_hat, Y);
  std::vector<double> phi(n + 1);
  for (int j = 0; j <= n; ++j) {
    double v = u_fluct[j] * lower.chi[i - 1][j];
    if (i >= 2) v -= D * lower.chi[i - 2][j];
    phi[j] = v;
  }
  std::vector<double> g = fluctuation(phi, Y);

  // Second-order scheme: ghost-point Neumann rows at both walls, interior
  // three-point Laplacian, and the centre node pinned to zero.  Rows are
  // scaled by dy^2 / D.
  const double s = dy * dy / D;
  TriDiag m(static_cast<std::size_t>(n + 1));
  std::vector<double> rhs(n + 1);
  m.diag[0] = -2.0;
  m.upper[0] = 2.0;
  rhs[0] = s * g[0];
  for (int j = 1; j < n; ++j) {
    m.lower[j - 1] = 1.0;
    m.diag[j] = -2.0;
    m.upper[j] = 1.0;
    rhs[j] = s * g[j];
  }
  m.lower[n - 1] = 2.0;
  m.diag[n] = -2.0;
  rhs[n] = s * g[n];

  const int mid = n / 2;
  m.diag[mid] = 1.0;
  if (mid > 0) m.lower[mid - 1] = 0.0;
  if (mid < n) m.upper[mid] = 0.0;
  rhs[mid] = 0.0;

  return solve_tridiagonal(m, rhs);
}

EffectiveCoefficients taylor_dispersion(const CorrectorSet& set) {
  if (set.order < 1)
    throw ArgumentError("dispersion: corrector set must contain at least order 1");
  const double Y = set.domain.half_width_rescaled();
  const std::vector<double>& chi1 = set.chi[1];
  std::vector<double> prod(set.u_hat.size());
  for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = set.u_hat[j] * chi1[j];

  const double chi1_mean = transverse_average(chi1, Y);
  const double prod_mean = transverse_average(prod, Y);
  const double base = set.domain.epsilon * set.diffusion;
  const double correction = (set.u_mean * chi1_mean - prod_mean) / set.diffusion;

  EffectiveCoefficients eff;
  eff.mean_velocity = set.u_mean;
  eff.base_diffusion = base;
  eff.dispersion = base * (1.0 + correction);
  if (eff.dispersion < base * (1.0 - 1e-13))
    throw SolverError("dispersion: computed D_eff fell below epsilon D");
  if (eff.dispersion < base) eff.dispersion = base;
  return eff;
}

}  // namespace hiphome
