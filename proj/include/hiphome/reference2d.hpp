#pragma once

#include <functional>
#include <vector>

#include "hiphome/fem1d.hpp"
#include "hiphome/geometry.hpp"
#include "hiphome/parallel.hpp"
#include "hiphome/velocity.hpp"

namespace hiphome {

// Structured node lattice over the channel; node (i, j) -> index i*nz + j,
// transverse index fastest so the band width follows the short direction.
struct Lattice2D {
  ChannelDomain domain{};
  int nx = 0, nz = 0;

  double dx() const { return domain.length / (nx - 1); }
  double dz() const { return domain.width / (nz - 1); }
  double x(int i) const { return domain.length * i / (nx - 1); }
  double z(int j) const { return -0.5 * domain.width + domain.width * j / (nz - 1); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nz + j; }
  std::size_t nodes() const { return static_cast<std::size_t>(nx) * nz; }
};

Lattice2D make_lattice(const ChannelDomain& domain, int nx, int nz);

// Nodal P1 field on the lattice triangulation (cells split along the
// (i,j)-(i+1,j+1) diagonal).
struct Field2D {
  Lattice2D lattice;
  std::vector<double> values;
  double time = 0.0;

  double evaluate(double x, double z) const;
};

// Simpson average across the channel per axial node; nz must be odd.
std::vector<double> transverse_average(const Field2D& field);

// Full-order P1 Galerkin solver on the structured triangulation; Dirichlet
// inlet, natural walls and outflow.  The assembly gathers complete matrix
// rows so serial and parallel execution produce bitwise-identical systems.
class Reference2D {
 public:
  Reference2D(const ProblemData& problem, const VelocityProfile& profile,
              const ChannelDomain& domain, int nx, int nz, Exec exec = Exec::Parallel);
  // Manufactured-solution variant: position-dependent forcing and inlet.
  Reference2D(const ProblemData& problem, const VelocityProfile& profile,
              const ChannelDomain& domain, int nx, int nz,
              std::function<double(double, double)> forcing,
              std::function<double(double)> inlet, Exec exec = Exec::Parallel);

  const Lattice2D& lattice() const { return lattice_; }
  double peclet() const { return peclet_; }

  Field2D solve_steady() const;
  // Zero initial state, inlet pinned from step one; returns the requested
  // snapshots in time order.
  std::vector<Field2D> solve_unsteady(const UnsteadyParams& params) const;

 private:
  void assemble(const std::function<double(double, double)>& forcing,
                const std::function<double(double)>& inlet);
  std::vector<double> apply(const std::vector<double>& values, bool mass) const;

  Lattice2D lattice_;
  ProblemData problem_;
  Exec exec_;
  double peclet_ = 0.0;
  std::vector<double> u_node_, u_mid_;  // velocity at z levels and midlevels
  // CSR with a fixed 7-point stencil; operator and mass share the pattern.
  std::vector<int> row_ptr_;
  std::vector<int> col_;
  std::vector<double> op_, mass_;
  std::vector<double> load_;
};

}  // namespace hiphome
