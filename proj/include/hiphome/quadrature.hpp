#pragma once

#include <cstddef>
#include <vector>

namespace hiphome {

// Composite Simpson integral of uniformly spaced samples.  values.size()
// must be odd (an even number of panels of width dx).
double simpson_integral(const std::vector<double>& values, double dx);

// Running antiderivative F with F[0] = 0 built from local parabolas, one
// half-step at a time.  The increments over each panel pair sum exactly to
// the composite Simpson rule, so F.back() == simpson_integral(values, dx)
// up to rounding.  values.size() must be odd and >= 3.
std::vector<double> cumulative_simpson(const std::vector<double>& values, double dx);

// Reflection-equivariant antiderivative: the average of the left-anchored
// rule above and its mirror anchored at the right end.  Reflecting the
// samples reflects the result (up to rounding), so antiderivatives of even
// samples are odd about the midpoint to machine precision; differences
// F[last] - F[0] still reproduce the composite Simpson integral.
std::vector<double> cumulative_simpson_symmetric(const std::vector<double>& values, double dx);

// Local cubic Lagrange interpolation on a uniform grid.  The 4-point
// stencil is clamped at the ends; value error is O(dx^4), derivative error
// O(dx^3).  Does not own the samples it reads.
class CubicInterpolant {
 public:
  CubicInterpolant(double x0, double dx, const std::vector<double>& values);
  double value(double x) const;
  double derivative(double x) const;

 private:
  double x0_, dx_;
  const std::vector<double>* values_;
  void stencil(double x, int& j0, double& t) const;
};

// Composite Gauss-Legendre rule on [0, 1]: `panels` equal panels with four
// nodes each, exact per panel up to degree 7.
struct Quadrature {
  std::vector<double> nodes;    // ascending in (0, 1)
  std::vector<double> weights;  // sum to 1
  int panels = 0;

  static Quadrature gauss_legendre(int panels);
  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) s += weights[q] * f(nodes[q]);
    return s;
  }
};

}  // namespace hiphome
