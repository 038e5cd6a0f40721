#pragma once

#include <vector>

#include "hiphome/tridiag.hpp"

namespace hiphome {

// Uniform P1 mesh on [0, length]; spacing * (nodes - 1) == length to rounding.
struct Mesh1D {
  double length = 0.0;
  double spacing = 0.0;
  int nodes = 0;

  double node(int s) const { return length * s / (nodes - 1); }
};

// nodes = round(length / spacing) + 1, spacing re-derived from the node count.
Mesh1D build_mesh(double length, double spacing);

// Time-integration parameters shared by the unsteady solvers; snapshot
// instants must align with the step grid.
struct UnsteadyParams {
  double dt = 0.0;
  double theta = 1.0;
  double horizon = 0.0;
  std::vector<double> snapshots;
};

// Assembled P1 operators.  Convection carries the derivative on the trial
// (column) function: convection[s][r] = integral of theta_s * theta_r', so
// applying it to the nodal interpolant of x reproduces mass * 1 exactly.
struct Operators1D {
  TriDiag mass;
  TriDiag stiffness;
  TriDiag convection;
};

Operators1D assemble_operators(const Mesh1D& mesh);

// Cell-level advection-diffusion ratio; Galerkin without stabilisation is
// refused at or beyond 2.
double mesh_peclet(double speed, double spacing, double diffusion);

// 1D advection-diffusion-reaction on the mesh:
//   c_t + speed c_x - diffusion c_xx + reaction c = forcing,
// Dirichlet inlet c(0) = inlet_value, natural outflow at x = length.
class AdrSolver1D {
 public:
  AdrSolver1D(const Mesh1D& mesh, double diffusion, double speed, double reaction,
              double forcing, double inlet_value);

  double peclet() const { return peclet_; }
  const Mesh1D& mesh() const { return mesh_; }

  std::vector<double> solve_steady() const;

  // One theta-method step; inlet row re-pinned each step.
  std::vector<double> step(const std::vector<double>& state, double dt, double theta) const;

  // P1 interpolation of a nodal vector.
  double interpolate(const std::vector<double>& values, double x) const;

 private:
  Mesh1D mesh_;
  Operators1D ops_;
  TriDiag system_;  // steady operator before constraint rows
  std::vector<double> load_;
  double inlet_;
  double peclet_;
};

}  // namespace hiphome
