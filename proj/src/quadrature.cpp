#include "hiphome/quadrature.hpp"

#include <cmath>
#include <cstddef>

#include "hiphome/errors.hpp"

namespace hiphome {

double simpson_integral(const std::vector<double>& values, double dx) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0)
    throw ArgumentError("simpson_integral: sample count must be odd and >= 3");
  double s4 = 0.0, s2 = 0.0;
  for (std::size_t j = 1; j + 1 < n; j += 2) s4 += values[j];
  for (std::size_t j = 2; j + 1 < n; j += 2) s2 += values[j];
  return dx / 3.0 * (values.front() + values.back() + 4.0 * s4 + 2.0 * s2);
}

std::vector<double> cumulative_simpson(const std::vector<double>& values, double dx) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0)
    throw ArgumentError("cumulative_simpson: sample count must be odd and >= 3");
  std::vector<double> out(n);
  out[0] = 0.0;
  const double c = dx / 12.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double inc;
    if (j % 2 == 0) {
      // Parabola through j, j+1, j+2; first half of the pair.
      inc = c * (5.0 * values[j] + 8.0 * values[j + 1] - values[j + 2]);
    } else {
      // Same parabola through j-1, j, j+1; second half of the pair.
      inc = c * (-values[j - 1] + 8.0 * values[j] + 5.0 * values[j + 1]);
    }
    out[j + 1] = out[j] + inc;
  }
  return out;
}

std::vector<double> cumulative_simpson_symmetric(const std::vector<double>& values,
                                                 double dx) {
  const std::size_t n = values.size();
  std::vector<double> left = cumulative_simpson(values, dx);
  std::vector<double> rev(values.rbegin(), values.rend());
  std::vector<double> right = cumulative_simpson(rev, dx);
  // right[n-1-j] integrates from the right end down to node j; anchor both
  // estimates at the left end and average.
  const double total = 0.5 * (left[n - 1] + right[n - 1]);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j)
    out[j] = 0.5 * (left[j] + (total - right[n - 1 - j]));
  return out;
}

CubicInterpolant::CubicInterpolant(double x0, double dx, const std::vector<double>& values)
    : x0_(x0), dx_(dx), values_(&values) {
  if (values.size() < 4) throw ArgumentError("CubicInterpolant: need at least 4 samples");
  if (dx <= 0.0) throw ArgumentError("CubicInterpolant: spacing must be positive");
}

void CubicInterpolant::stencil(double x, int& j0, double& t) const {
  const int n = static_cast<int>(values_->size());
  double u = (x - x0_) / dx_;
  int i = static_cast<int>(std::floor(u));
  // Centre the 4-point stencil around the containing panel, clamped.
  j0 = i - 1;
  if (j0 < 0) j0 = 0;
  if (j0 > n - 4) j0 = n - 4;
  t = u - j0;  // local coordinate, node k of the stencil sits at t = k
}

double CubicInterpolant::value(double x) const {
  int j0;
  double t;
  stencil(x, j0, t);
  const std::vector<double>& v = *values_;
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return v[j0] * l0 + v[j0 + 1] * l1 + v[j0 + 2] * l2 + v[j0 + 3] * l3;
}

double CubicInterpolant::derivative(double x) const {
  int j0;
  double t;
  stencil(x, j0, t);
  const std::vector<double>& v = *values_;
  const double d0 = -(3.0 * t * t - 12.0 * t + 11.0) / 6.0;
  const double d1 = (3.0 * t * t - 10.0 * t + 6.0) / 2.0;
  const double d2 = -(3.0 * t * t - 8.0 * t + 3.0) / 2.0;
  const double d3 = (3.0 * t * t - 6.0 * t + 2.0) / 6.0;
  return (v[j0] * d0 + v[j0 + 1] * d1 + v[j0 + 2] * d2 + v[j0 + 3] * d3) / dx_;
}

Quadrature Quadrature::gauss_legendre(int panels) {
  if (panels < 1) throw ArgumentError("Quadrature: panel count must be positive");
  // 4-point Gauss-Legendre abscissae and weights on [-1, 1].
  const double a1 = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double a2 = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
  const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
  const double xs[4] = {-a2, -a1, a1, a2};
  const double ws[4] = {w2, w1, w1, w2};

  Quadrature quad;
  quad.panels = panels;
  quad.nodes.reserve(4 * panels);
  quad.weights.reserve(4 * panels);
  const double width = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * width;
    for (int k = 0; k < 4; ++k) {
      quad.nodes.push_back(mid + 0.5 * width * xs[k]);
      quad.weights.push_back(0.5 * width * ws[k]);
    }
  }
  return quad;
}

}  // namespace hiphome
