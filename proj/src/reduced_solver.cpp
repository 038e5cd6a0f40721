#include "hiphome/reduced_solver.hpp"

#include <cmath>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

double ReducedSolution::evaluate_hat(double x, double zhat) const {
  if (!basis) throw ArgumentError("reduced evaluate: missing basis");
  const double slack = 1e-12 * std::max(1.0, mesh.length);
  if (x < -slack || x > mesh.length + slack)
    throw DomainError("reduced evaluate: x outside the channel");
  double u = x / mesh.spacing;
  int e = static_cast<int>(std::floor(u));
  if (e < 0) e = 0;
  if (e > mesh.nodes - 2) e = mesh.nodes - 2;
  const double t = u - e;

  double modes[64];
  std::vector<double> heap;
  double* vals = modes;
  if (m > 64) {
    heap.resize(m);
    vals = heap.data();
  }
  basis->evaluate_all(zhat, vals);
  const double* left = coeff.data() + static_cast<std::size_t>(e) * m;
  const double* right = left + m;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) acc += ((1.0 - t) * left[k] + t * right[k]) * vals[k];
  return acc;
}

double ReducedSolution::evaluate(double x, double z) const {
  return evaluate_hat(x, fibre_map_psi(domain, z));
}

ReducedSystem::ReducedSystem(const ProblemData& problem, std::shared_ptr<const ModalBasis> basis,
                             const Mesh1D& mesh, const VelocityProfile& profile,
                             const ChannelDomain& domain)
    : m_(basis ? basis->size() : 0),
      mesh_(mesh),
      domain_(domain),
      basis_(std::move(basis)),
      system_(mesh.nodes, basis_ ? basis_->size() : 1),
      mass_(mesh.nodes, basis_ ? basis_->size() : 1) {
  if (!basis_ || m_ < 1) throw ArgumentError("reduced system: basis with at least one mode required");
  if (mesh.nodes < 3) throw ArgumentError("reduced system: mesh with at least 3 nodes required");
  peclet_ = mesh_peclet(profile.max_speed(domain), mesh.spacing, problem.diffusion_eff);
  if (peclet_ >= 2.0)
    throw StabilityError(peclet_, "reduced system: mesh Peclet " + std::to_string(peclet_) +
                                      " >= 2; refine the mesh (no stabilisation)");

  const Operators1D ops = assemble_operators(mesh);
  const CouplingIntegrals cpl = coupling_integrals(*basis_, profile, domain);
  if (cpl.m != m_) throw ArgumentError("reduced system: coupling size mismatch");

  const double l = domain.width;
  const double de = problem.diffusion_eff;
  const double sg = problem.reaction;
  const int m = m_;
  const int n = mesh.nodes;

  // Block entry ((s,j),(r,k)) =
  //   D_eps l M_jk S[s][r] + (D_eps / l) K_jk Mx[s][r] + l A_jk C[s][r]
  //   + sigma l M_jk Mx[s][r];  time-stepping mass = l M_jk Mx[s][r].
  auto fill = [&](double* block, double sx, double mx, double cx) {
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        block[static_cast<std::size_t>(j) * m + k] =
            de * l * cpl.mass_at(j, k) * sx + (de / l) * cpl.stiffness_at(j, k) * mx +
            l * cpl.advection_at(j, k) * cx + sg * l * cpl.mass_at(j, k) * mx;
  };
  auto fill_mass = [&](double* block, double mx) {
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        block[static_cast<std::size_t>(j) * m + k] = l * cpl.mass_at(j, k) * mx;
  };

  for (int s = 0; s < n; ++s) {
    fill(system_.diag(s), ops.stiffness.diag[s], ops.mass.diag[s], ops.convection.diag[s]);
    fill_mass(mass_.diag(s), ops.mass.diag[s]);
    if (s + 1 < n) {
      // upper(s): row block s, column block s+1; lower(s): row s+1, column s.
      fill(system_.upper(s), ops.stiffness.upper[s], ops.mass.upper[s], ops.convection.upper[s]);
      fill(system_.lower(s), ops.stiffness.lower[s], ops.mass.lower[s], ops.convection.lower[s]);
      fill_mass(mass_.upper(s), ops.mass.upper[s]);
      fill_mass(mass_.lower(s), ops.mass.lower[s]);
    }
  }

  // Load: f l (int chi_k dzhat) (int theta_s dx).
  load_.assign(static_cast<std::size_t>(n) * m, 0.0);
  std::vector<double> ones(n, 1.0);
  std::vector<double> cell = ops.mass.apply(ones);
  for (int s = 0; s < n; ++s)
    for (int k = 0; k < m; ++k)
      load_[static_cast<std::size_t>(s) * m + k] =
          problem.forcing * l * basis_->mode_integral(k) * cell[s];

  // Inlet projection of the (constant) Dirichlet datum.
  dirichlet_.assign(m, 0.0);
  for (int k = 0; k < m; ++k) dirichlet_[k] = problem.inlet_value * basis_->mode_integral(k);
}

void ReducedSystem::pin_inlet(BlockTriDiag& a) const {
  const int m = m_;
  double* d = a.diag(0);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) d[static_cast<std::size_t>(j) * m + k] = j == k ? 1.0 : 0.0;
  if (a.blocks() > 1) {
    double* u = a.upper(0);
    for (int jk = 0; jk < m * m; ++jk) u[jk] = 0.0;
  }
}

ReducedSolution ReducedSystem::solve_steady() const {
  BlockTriDiag a = system_;
  std::vector<double> rhs = load_;
  pin_inlet(a);
  for (int k = 0; k < m_; ++k) rhs[k] = dirichlet_[k];

  ReducedSolution sol;
  sol.m = m_;
  sol.mesh = mesh_;
  sol.domain = domain_;
  sol.basis = basis_;
  sol.coeff = solve_block_tridiagonal(a, rhs);
  sol.time = 0.0;
  for (double v : sol.coeff)
    if (!std::isfinite(v)) throw SolverError("reduced solve: non-finite coefficient");
  return sol;
}

ReducedSolution ReducedSystem::initial_state() const {
  ReducedSolution sol;
  sol.m = m_;
  sol.mesh = mesh_;
  sol.domain = domain_;
  sol.basis = basis_;
  sol.coeff.assign(static_cast<std::size_t>(mesh_.nodes) * m_, 0.0);
  sol.time = 0.0;
  return sol;
}

ThetaStepper::ThetaStepper(const ReducedSystem& system, double dt, double theta)
    : system_(&system), dt_(dt), theta_(theta) {
  if (!(dt > 0.0)) throw ArgumentError("theta stepper: dt must be positive");
  if (theta < 0.0 || theta > 1.0) throw ArgumentError("theta stepper: theta must lie in [0,1]");
  const BlockTriDiag& a = system.stiffness();
  const BlockTriDiag& mm = system.mass();
  BlockTriDiag lhs(a.blocks(), a.block_size());
  const std::size_t bs =
      static_cast<std::size_t>(a.block_size()) * static_cast<std::size_t>(a.block_size());
  for (int i = 0; i < a.blocks(); ++i) {
    for (std::size_t jk = 0; jk < bs; ++jk)
      lhs.diag(i)[jk] = mm.diag(i)[jk] / dt + theta * a.diag(i)[jk];
    if (i + 1 < a.blocks())
      for (std::size_t jk = 0; jk < bs; ++jk) {
        lhs.upper(i)[jk] = mm.upper(i)[jk] / dt + theta * a.upper(i)[jk];
        lhs.lower(i)[jk] = mm.lower(i)[jk] / dt + theta * a.lower(i)[jk];
      }
  }
  system.pin_inlet(lhs);
  factored_ = std::make_unique<BlockThomas>(lhs);
}

void ThetaStepper::advance(ReducedSolution& state) {
  const ReducedSystem& sys = *system_;
  if (state.coeff.size() != sys.stiffness().order())
    throw ArgumentError("theta stepper: state size mismatch");
  std::vector<double> mc = sys.mass().apply(state.coeff);
  std::vector<double> ac = sys.stiffness().apply(state.coeff);
  std::vector<double> rhs(mc.size());
  const std::vector<double>& load = sys.load();
  for (std::size_t j = 0; j < rhs.size(); ++j)
    rhs[j] = mc[j] / dt_ - (1.0 - theta_) * ac[j] + load[j];
  for (int k = 0; k < sys.modes(); ++k) rhs[k] = sys.dirichlet()[k];

  state.coeff = factored_->solve(rhs);
  ++steps_;
  state.time += dt_;
  for (double v : state.coeff)
    if (!std::isfinite(v))
      throw BlowUpError(steps_, "theta stepper: non-finite state at step " +
                                    std::to_string(steps_) + " (time " +
                                    std::to_string(state.time) + ")");
}

}  // namespace hiphome
