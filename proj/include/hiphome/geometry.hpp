#pragma once

namespace hiphome {

// Thin channel (0, L) x (-l/2, l/2).  epsilon is the scale-separation
// parameter used by the transverse rescaling y = z / epsilon; it defaults
// to l / L but is kept independent so that published configurations with
// epsilon != l / L can be replicated literally.
struct ChannelDomain {
  double length;   // L > 0, axial extent
  double width;    // l in (0, L), transverse extent
  double epsilon;  // scale ratio in (0, 1)

  // Half-width of the rescaled fibre: Y = l / (2 epsilon); y in [-Y, Y].
  double half_width_rescaled() const { return width / (2.0 * epsilon); }
};

ChannelDomain make_domain(double length, double width, double epsilon);
ChannelDomain make_domain(double length, double width);  // epsilon = l / L

// Affine map of the physical fibre [-l/2, l/2] onto the reference fibre
// [0, 1] and its inverse.
double fibre_map_psi(const ChannelDomain& dom, double z);
double fibre_map_psi_inverse(const ChannelDomain& dom, double zhat);

// Affine map of the rescaled fibre [-Y, Y] onto [0, 1] and its inverse.
double fibre_map_theta(const ChannelDomain& dom, double y);
double fibre_map_theta_inverse(const ChannelDomain& dom, double zhat);

// Physical data of the advection-diffusion-reaction problem.  The solver
// works with the effective diffusion scale D_eps = epsilon * D.
struct ProblemData {
  double diffusion;       // D > 0, order-one diffusion scale
  double diffusion_eff;   // D_eps = epsilon * D
  double reaction;        // sigma >= 0
  double forcing;         // constant source f
  double inlet_value;     // Dirichlet datum c_B at x = 0
  double initial_value;   // initial state for unsteady runs

  // Global Peclet number u_mean L / (2 D_eps).
  double peclet(double u_mean, double length) const {
    return u_mean * length / (2.0 * diffusion_eff);
  }
};

ProblemData make_problem(const ChannelDomain& dom, double diffusion, double reaction,
                         double forcing, double inlet_value, double initial_value = 0.0);

}  // namespace hiphome
