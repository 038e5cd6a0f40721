#pragma once

#include <vector>

#include "hiphome/geometry.hpp"
#include "hiphome/quadrature.hpp"
#include "hiphome/velocity.hpp"

namespace hiphome {

struct CorrectorOptions {
  // Number of panels of the uniform grid on [-Y, Y]; must be even so the
  // grid contains y = 0 and Simpson rules apply.
  int grid_panels = 2048;
  // Boundary-flux residual tolerance, relative to max(1, |source|_inf).
  double tol_bc_rel = 1e-8;
};

// Transverse average (1 / 2Y) * integral over [-Y, Y] of uniform samples
// (odd count) via composite Simpson.
double transverse_average(const std::vector<double>& values, double half_width);

// Samples minus their transverse average ("prime" quantity).  A fluctuation
// below rounding noise collapses to exact zeros.
std::vector<double> fluctuation(const std::vector<double>& values, double half_width);

// Cell correctors of the two-scale expansion, computed on a uniform grid
// over the rescaled fibre [-Y, Y] by the double-antiderivative formula.
// Recursion for i >= 1, with chi_0 = 1 and chi_{-1} = 0:
//   phi_i = fluct(u_hat) * chi_{i-1} - D * chi_{i-2}
//   D chi_i'' = fluct(phi_i),  chi_i'(+-Y) = 0,  chi_i(0) = 0
// closed by antiderivatives with base point 0:
//   chi_i = (Psi_i(y) - Phi_i(-Y) y - (Y y + y^2/2) avg(phi_i)) / D.
struct CorrectorSet {
  ChannelDomain domain;
  double diffusion = 0.0;  // D
  int order = 0;           // highest corrector index computed

  std::vector<double> y;       // grid nodes, size grid_panels + 1
  std::vector<double> u_hat;   // u(epsilon y) samples
  double u_mean = 0.0;         // transverse average of u_hat

  // Index i in [0, order]; index 0 holds the trivial corrector (chi = 1,
  // empty source data).
  std::vector<std::vector<double>> chi;        // corrector samples
  std::vector<std::vector<double>> source;     // phi_i samples, i >= 1
  std::vector<std::vector<double>> antider;    // Phi_i samples, i >= 1
  std::vector<std::vector<double>> flux;       // D * chi_i' samples, i >= 1
  std::vector<double> source_average;          // avg(phi_i), i >= 1

  double spacing() const { return y.size() > 1 ? y[1] - y[0] : 0.0; }
  // Cubic interpolant over the stored samples of chi_i.
  CubicInterpolant interpolant(int i) const;
  // |D chi_i'(-Y)| and |D chi_i'(+Y)| from the stored flux.
  std::pair<double, double> boundary_flux(int i) const;
};

CorrectorSet compute_correctors(const VelocityProfile& profile, const ChannelDomain& dom,
                                double diffusion, int order,
                                const CorrectorOptions& opts = {});

// Independent route to chi_i: solve the corrector two-point boundary-value
// problem by second-order finite differences on the set's grid, using the
// set's lower-order correctors to build the source.  Returns samples on
// the same grid.
std::vector<double> oracle_corrector_bvp(const CorrectorSet& lower, int i);

// Effective axial transport coefficients obtained from the first corrector.
struct EffectiveCoefficients {
  double mean_velocity = 0.0;   // u_bar
  double dispersion = 0.0;      // D_eff >= epsilon D
  double base_diffusion = 0.0;  // epsilon D
  double enhancement() const { return dispersion / base_diffusion; }
};

// D_eff = epsilon D (1 + (u_bar avg(chi_1) - avg(u_hat chi_1)) / D).
EffectiveCoefficients taylor_dispersion(const CorrectorSet& set);

}  // namespace hiphome
