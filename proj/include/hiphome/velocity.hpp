#pragma once

#include <string>
#include <vector>

#include "hiphome/geometry.hpp"

namespace hiphome {

enum class ProfileKind { Constant, LinearShear, Poiseuille, LogLaw, Tabulated };

const char* to_string(ProfileKind kind);

// Axial velocity as a function of the physical transverse coordinate z.
// Profiles whose formula involves the rescaling (Poiseuille, log-law)
// carry their own epsilon parameter so that u(z) is self-contained.
class VelocityProfile {
 public:
  static VelocityProfile constant(double value);
  // u(z) = shear * z (shear rate in the physical coordinate).
  static VelocityProfile linear_shear(double shear);
  // u(z) = 2 v_mean (1 - (z / epsilon)^2); does not vanish at the walls
  // unless l = 2 epsilon.
  static VelocityProfile poiseuille(double v_mean, double epsilon);
  // u(z) = ln(z + epsilon + d) / kappa + shift; shift defaults to
  // -ln(d) / kappa.  Requires z + epsilon + d > 0.
  static VelocityProfile loglaw(double kappa, double epsilon, double offset);
  static VelocityProfile loglaw(double kappa, double epsilon, double offset, double shift);
  // Piecewise-linear interpolation of (z, u) samples; evaluation outside
  // the tabulated range is a domain error, never extrapolation.
  static VelocityProfile tabulated(std::vector<double> z, std::vector<double> u);
  // Two-column CSV "z,u" with one header row.
  static VelocityProfile tabulated_from_csv(const std::string& path);

  double operator()(double z) const;

  ProfileKind kind() const { return kind_; }
  // True when u(-z) = u(z) holds identically (constant, Poiseuille).
  bool even_in_z() const;

  // Simpson mean and sampled maximum of |u| over the fibre [-l/2, l/2].
  double mean_speed(const ChannelDomain& dom) const;
  double max_speed(const ChannelDomain& dom) const;

  // Named parameters, meaningful per kind (see factories).
  double param_value = 0.0;   // constant value or v_mean
  double param_shear = 0.0;   // linear shear rate
  double param_kappa = 0.0;   // log-law 1/slope
  double param_offset = 0.0;  // log-law d
  double param_shift = 0.0;   // log-law additive constant C
  double param_epsilon = 0.0; // rescaling used by poiseuille / log-law

 private:
  explicit VelocityProfile(ProfileKind kind) : kind_(kind) {}
  ProfileKind kind_;
  std::vector<double> tab_z_, tab_u_;
};

// u_hat(y) = u(epsilon y) for y in [-Y, Y]; checks that epsilon y lies on
// the physical fibre.
double rescaled_velocity(const VelocityProfile& profile, const ChannelDomain& dom, double y);

}  // namespace hiphome
