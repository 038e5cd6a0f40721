#include "hiphome/fem1d.hpp"

#include <cmath>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

Mesh1D build_mesh(double length, double spacing) {
  if (!(length > 0.0)) throw ArgumentError("mesh: length must be positive");
  if (!(spacing > 0.0) || !(spacing < length))
    throw ArgumentError("mesh: spacing must lie in (0, length)");
  const int nodes = static_cast<int>(std::lround(length / spacing)) + 1;
  if (nodes < 3) throw ArgumentError("mesh: need at least 3 nodes");
  Mesh1D mesh;
  mesh.length = length;
  mesh.nodes = nodes;
  mesh.spacing = length / (nodes - 1);
  return mesh;
}

Operators1D assemble_operators(const Mesh1D& mesh) {
  if (mesh.nodes < 3) throw ArgumentError("operators: invalid mesh");
  const std::size_t n = static_cast<std::size_t>(mesh.nodes);
  const double h = mesh.spacing;
  Operators1D ops;
  ops.mass.resize(n);
  ops.stiffness.resize(n);
  ops.convection.resize(n);
  // Element matrices: mass (h/6)[[2,1],[1,2]], stiffness (1/h)[[1,-1],[-1,1]],
  // convection (trial derivative) (1/2)[[-1,1],[-1,1]].
  for (std::size_t e = 0; e + 1 < n; ++e) {
    ops.mass.diag[e] += h / 3.0;
    ops.mass.diag[e + 1] += h / 3.0;
    ops.mass.upper[e] += h / 6.0;
    ops.mass.lower[e] += h / 6.0;

    ops.stiffness.diag[e] += 1.0 / h;
    ops.stiffness.diag[e + 1] += 1.0 / h;
    ops.stiffness.upper[e] += -1.0 / h;
    ops.stiffness.lower[e] += -1.0 / h;

    ops.convection.diag[e] += -0.5;
    ops.convection.diag[e + 1] += 0.5;
    ops.convection.upper[e] += 0.5;
    ops.convection.lower[e] += -0.5;
  }
  return ops;
}

double mesh_peclet(double speed, double spacing, double diffusion) {
  if (!(diffusion > 0.0)) throw ArgumentError("mesh peclet: diffusion must be positive");
  return std::abs(speed) * spacing / (2.0 * diffusion);
}

AdrSolver1D::AdrSolver1D(const Mesh1D& mesh, double diffusion, double speed, double reaction,
                         double forcing, double inlet_value)
    : mesh_(mesh), ops_(assemble_operators(mesh)), inlet_(inlet_value) {
  if (!(diffusion > 0.0)) throw ArgumentError("adr1d: diffusion must be positive");
  if (reaction < 0.0) throw ArgumentError("adr1d: reaction must be non-negative");
  peclet_ = mesh_peclet(speed, mesh.spacing, diffusion);
  if (peclet_ >= 2.0)
    throw StabilityError(peclet_, "adr1d: mesh Peclet " + std::to_string(peclet_) +
                                      " >= 2; refine the mesh (no stabilisation)");

  const std::size_t n = static_cast<std::size_t>(mesh.nodes);
  system_.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    system_.diag[s] = diffusion * ops_.stiffness.diag[s] + speed * ops_.convection.diag[s] +
                      reaction * ops_.mass.diag[s];
    if (s + 1 < n) {
      system_.upper[s] = diffusion * ops_.stiffness.upper[s] + speed * ops_.convection.upper[s] +
                         reaction * ops_.mass.upper[s];
      system_.lower[s] = diffusion * ops_.stiffness.lower[s] + speed * ops_.convection.lower[s] +
                         reaction * ops_.mass.lower[s];
    }
  }
  load_.assign(n, 0.0);
  std::vector<double> ones(n, 1.0);
  std::vector<double> cell = ops_.mass.apply(ones);
  for (std::size_t s = 0; s < n; ++s) load_[s] = forcing * cell[s];
}

std::vector<double> AdrSolver1D::solve_steady() const {
  TriDiag a = system_;
  std::vector<double> rhs = load_;
  a.diag[0] = 1.0;
  a.upper[0] = 0.0;
  rhs[0] = inlet_;
  return solve_tridiagonal(a, rhs);
}

std::vector<double> AdrSolver1D::step(const std::vector<double>& state, double dt,
                                      double theta) const {
  const std::size_t n = static_cast<std::size_t>(mesh_.nodes);
  if (state.size() != n) throw ArgumentError("adr1d step: state size mismatch");
  if (!(dt > 0.0)) throw ArgumentError("adr1d step: dt must be positive");
  if (theta < 0.0 || theta > 1.0) throw ArgumentError("adr1d step: theta must lie in [0,1]");

  TriDiag lhs;
  lhs.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    lhs.diag[s] = ops_.mass.diag[s] / dt + theta * system_.diag[s];
    if (s + 1 < n) {
      lhs.upper[s] = ops_.mass.upper[s] / dt + theta * system_.upper[s];
      lhs.lower[s] = ops_.mass.lower[s] / dt + theta * system_.lower[s];
    }
  }
  std::vector<double> mc = ops_.mass.apply(state);
  std::vector<double> ac = system_.apply(state);
  std::vector<double> rhs(n);
  for (std::size_t s = 0; s < n; ++s) rhs[s] = mc[s] / dt - (1.0 - theta) * ac[s] + load_[s];

  lhs.diag[0] = 1.0;
  lhs.upper[0] = 0.0;
  rhs[0] = inlet_;
  return solve_tridiagonal(lhs, rhs);
}

double AdrSolver1D::interpolate(const std::vector<double>& values, double x) const {
  if (values.size() != static_cast<std::size_t>(mesh_.nodes))
    throw ArgumentError("adr1d interpolate: value count mismatch");
  const double slack = 1e-12 * std::max(1.0, mesh_.length);
  if (x < -slack || x > mesh_.length + slack)
    throw DomainError("adr1d interpolate: x outside [0, length]");
  double u = x / mesh_.spacing;
  int e = static_cast<int>(std::floor(u));
  if (e < 0) e = 0;
  if (e > mesh_.nodes - 2) e = mesh_.nodes - 2;
  const double t = u - e;
  return values[e] * (1.0 - t) + values[e + 1] * t;
}

}  // namespace hiphome
