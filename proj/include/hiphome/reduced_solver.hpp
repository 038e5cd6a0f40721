#pragma once

#include <memory>
#include <vector>

#include "hiphome/block_tridiag.hpp"
#include "hiphome/fem1d.hpp"
#include "hiphome/geometry.hpp"
#include "hiphome/modal_basis.hpp"
#include "hiphome/velocity.hpp"

namespace hiphome {

// Reduced Galerkin field: P1 coefficients along the fibre times the modal
// basis across it.  Coefficients are node-major: coeff[s * m + k].
struct ReducedSolution {
  int m = 0;
  Mesh1D mesh;
  ChannelDomain domain{};
  std::shared_ptr<const ModalBasis> basis;
  std::vector<double> coeff;
  double time = 0.0;

  double coefficient(int k, int s) const { return coeff[static_cast<std::size_t>(s) * m + k]; }

  // Concentration at (x, z) in the physical channel.
  double evaluate(double x, double z) const;
  // Same with the transverse coordinate already on the reference fibre.
  double evaluate_hat(double x, double zhat) const;
};

// Assembled reduced system of m coupled 1D problems, block-tridiagonal in
// the node index with m x m mode-coupling blocks.
class ReducedSystem {
 public:
  ReducedSystem(const ProblemData& problem, std::shared_ptr<const ModalBasis> basis,
                const Mesh1D& mesh, const VelocityProfile& profile, const ChannelDomain& domain);

  int modes() const { return m_; }
  const Mesh1D& mesh() const { return mesh_; }
  const ChannelDomain& domain() const { return domain_; }
  std::shared_ptr<const ModalBasis> basis() const { return basis_; }
  double peclet() const { return peclet_; }

  // Inlet projection g_k = int c_B chi_k dzhat.
  const std::vector<double>& dirichlet() const { return dirichlet_; }

  // Unconstrained operators and load; constraint rows are applied per solve.
  const BlockTriDiag& stiffness() const { return system_; }
  const BlockTriDiag& mass() const { return mass_; }
  const std::vector<double>& load() const { return load_; }

  ReducedSolution solve_steady() const;
  // Zero coefficients at t = 0; the inlet rows are pinned from step one.
  ReducedSolution initial_state() const;

 private:
  friend class ThetaStepper;
  void pin_inlet(BlockTriDiag& a) const;

  int m_;
  Mesh1D mesh_;
  ChannelDomain domain_{};
  std::shared_ptr<const ModalBasis> basis_;
  double peclet_ = 0.0;
  BlockTriDiag system_;
  BlockTriDiag mass_;
  std::vector<double> load_;
  std::vector<double> dirichlet_;
};

// Theta-method integrator with the left-hand operator factored once:
//   (M/dt + theta A) c_next = (M/dt - (1-theta) A) c + F.
class ThetaStepper {
 public:
  ThetaStepper(const ReducedSystem& system, double dt, double theta);

  double dt() const { return dt_; }
  double theta() const { return theta_; }
  int steps_taken() const { return steps_; }

  // Advances the state by dt in place; throws BlowUpError on non-finite
  // values (explicit-Euler instability signal).
  void advance(ReducedSolution& state);

 private:
  const ReducedSystem* system_;
  double dt_;
  double theta_;
  int steps_ = 0;
  std::unique_ptr<BlockThomas> factored_;
};

}  // namespace hiphome
