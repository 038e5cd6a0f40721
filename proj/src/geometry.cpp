#include "hiphome/geometry.hpp"

#include <cmath>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

namespace {

// Slack for coordinate range checks; endpoints reached through the inverse
// maps may overshoot by a few ulp.
constexpr double kRangeSlack = 1e-12;

void check_range(double v, double lo, double hi, const char* what) {
  const double slack = kRangeSlack * (std::abs(lo) + std::abs(hi) + 1.0);
  if (!(v >= lo - slack && v <= hi + slack))
    throw DomainError(std::string(what) + " = " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

ChannelDomain make_domain(double length, double width, double epsilon) {
  if (!(length > 0.0)) throw ArgumentError("domain: length must be positive");
  if (!(width > 0.0 && width < length))
    throw ArgumentError("domain: width must lie in (0, length)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ArgumentError("domain: epsilon must lie in (0, 1)");
  return ChannelDomain{length, width, epsilon};
}

ChannelDomain make_domain(double length, double width) {
  return make_domain(length, width, width / length);
}

double fibre_map_psi(const ChannelDomain& dom, double z) {
  check_range(z, -0.5 * dom.width, 0.5 * dom.width, "z");
  return (z + 0.5 * dom.width) / dom.width;
}

double fibre_map_psi_inverse(const ChannelDomain& dom, double zhat) {
  check_range(zhat, 0.0, 1.0, "zhat");
  return dom.width * zhat - 0.5 * dom.width;
}

double fibre_map_theta(const ChannelDomain& dom, double y) {
  const double Y = dom.half_width_rescaled();
  check_range(y, -Y, Y, "y");
  return (y + Y) / (2.0 * Y);
}

double fibre_map_theta_inverse(const ChannelDomain& dom, double zhat) {
  check_range(zhat, 0.0, 1.0, "zhat");
  const double Y = dom.half_width_rescaled();
  return Y * (2.0 * zhat - 1.0);
}

ProblemData make_problem(const ChannelDomain& dom, double diffusion, double reaction,
                         double forcing, double inlet_value, double initial_value) {
  if (!(diffusion > 0.0)) throw ArgumentError("problem: diffusion must be positive");
  if (reaction < 0.0) throw ArgumentError("problem: reaction must be non-negative");
  return ProblemData{diffusion, dom.epsilon * diffusion, reaction,
                     forcing,   inlet_value,            initial_value};
}

}  // namespace hiphome
