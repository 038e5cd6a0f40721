#include "hiphome/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hiphome/errors.hpp"
#include "hiphome/quadrature.hpp"

namespace hiphome {

namespace {

void check_lattice(int nx, int nz) {
  if (nx < 8 || nz < 8) throw ArgumentError("l2 norm: lattice coarser than 8 x 8");
  if (nx % 2 == 0 || nz % 2 == 0)
    throw ArgumentError("l2 norm: node counts must be odd for the Simpson rule");
}

}  // namespace

double l2_norm(const FieldEvaluator& field, const ChannelDomain& domain, int nx, int nz,
               Exec exec) {
  check_lattice(nx, nz);
  const double dx = domain.length / (nx - 1);
  const double dz = domain.width / (nz - 1);
  std::vector<double> row(nx, 0.0);
  parallel_for(static_cast<std::size_t>(nx), exec, [&](std::size_t i) {
    const double x = domain.length * static_cast<double>(i) / (nx - 1);
    std::vector<double> sq(nz);
    for (int j = 0; j < nz; ++j) {
      const double z = -0.5 * domain.width + domain.width * j / (nz - 1);
      const double v = field(x, z);
      sq[j] = v * v;
    }
    row[i] = simpson_integral(sq, dz);
  });
  const double total = simpson_integral(row, dx);
  return std::sqrt(std::max(total, 0.0));
}

double qoi_error(const FieldEvaluator& ref, const FieldEvaluator& red, const ChannelDomain& domain,
                 int nx, int nz, Exec exec) {
  return std::abs(l2_norm(ref, domain, nx, nz, exec) - l2_norm(red, domain, nx, nz, exec));
}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& params) {
  if (errors.size() != params.size()) throw ArgumentError("eoc: size mismatch");
  if (errors.size() < 2) throw ArgumentError("eoc: need at least two points");
  for (double e : errors)
    if (!(e > 0.0)) throw ArgumentError("eoc: errors must be positive");
  const bool inc = params[1] > params[0];
  for (std::size_t i = 0; i + 1 < params.size(); ++i) {
    if (!(params[i] > 0.0)) throw ArgumentError("eoc: parameters must be positive");
    if (inc ? params[i + 1] <= params[i] : params[i + 1] >= params[i])
      throw ArgumentError("eoc: parameters must be strictly monotone");
  }
  std::vector<double> rates(errors.size() - 1);
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    rates[i] = std::log(errors[i] / errors[i + 1]) / std::log(params[i] / params[i + 1]);
  return rates;
}

RateFit fit_rate_pre_plateau(const std::vector<double>& errors, const std::vector<double>& params,
                             double plateau_ratio) {
  if (errors.size() != params.size() || errors.size() < 2)
    throw ArgumentError("rate fit: need matching sequences with at least two points");
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!(errors[i] > 0.0) || !(params[i] > 0.0))
      throw ArgumentError("rate fit: errors and parameters must be positive");

  // First stagnating transition: error no longer at least (1 - ratio) below
  // its predecessor (increases count as stagnation too).
  std::size_t count = errors.size();
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    if (errors[i + 1] >= plateau_ratio * errors[i]) {
      count = i + 1;
      break;
    }
  count = std::max<std::size_t>(count, 2);

  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sx += std::log(params[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dxi = std::log(params[i]) - mx;
    sxx += dxi * dxi;
    sxy += dxi * (std::log(errors[i]) - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("rate fit: parameters must differ");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.points = static_cast<int>(count);
  return fit;
}

ErrorRecord make_record(const std::string& family, int m, double h, double dt, double t,
                        double l2_error, double qoi_error, double wall_ms) {
  if (l2_error < 0.0 || qoi_error < 0.0) throw ArgumentError("record: negative error");
  if (qoi_error > l2_error * (1.0 + 1e-12) + 1e-300)
    throw ArgumentError("record: qoi error exceeds the l2 error (triangle inequality)");
  ErrorRecord rec;
  rec.family = family;
  rec.m = m;
  rec.h = h;
  rec.dt = dt;
  rec.t = t;
  rec.l2_error = l2_error;
  rec.qoi_error = qoi_error;
  rec.wall_ms = wall_ms;
  return rec;
}

}  // namespace hiphome
