#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hiphome/corrector.hpp"
#include "hiphome/geometry.hpp"
#include "hiphome/quadrature.hpp"
#include "hiphome/velocity.hpp"

namespace hiphome {

enum class BasisFamily { HiPhome, Educated, Legendre };

const char* to_string(BasisFamily family);

// Scalar function on the reference fibre [0, 1] with its derivative.
struct TransverseFn {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

// L2(0,1)-orthonormal modal basis on the reference fibre.  Mode 0 is the
// constant 1 for every family.  Samples at the quadrature nodes are stored
// for assembling coupling integrals; point evaluation goes through the
// generating functions so it is exactly consistent with the samples.
class ModalBasis {
 public:
  // Modified Gram-Schmidt with one reorthogonalisation pass over the raw
  // functions; modes are scaled so that the value at zhat = 1 is >= 0
  // (value at zhat = 0 breaks ties).  Throws DegeneracyError when a raw
  // function is numerically dependent on the span of the previous ones.
  static ModalBasis gram_schmidt(const std::vector<TransverseFn>& raw, int m,
                                 std::shared_ptr<const Quadrature> quad,
                                 BasisFamily family = BasisFamily::HiPhome);

  // Basis generated from corrector traces chi_i(y(zhat)), i = 0..m-1.
  static ModalBasis from_correctors(std::shared_ptr<const CorrectorSet> set, int m,
                                    std::shared_ptr<const Quadrature> quad);

  // Neumann eigenfunctions of the transverse diffusion operator: mode 0 is
  // 1, mode k is sqrt(2) cos(k pi zhat) with eigenvalue D (k pi)^2.
  static ModalBasis educated(int m, double diffusion,
                             std::shared_ptr<const Quadrature> quad);

  // Shifted Legendre polynomials via Gram-Schmidt on monomials.
  static ModalBasis legendre(int m, std::shared_ptr<const Quadrature> quad);

  int size() const { return m_; }
  BasisFamily family() const { return family_; }
  const Quadrature& quadrature() const { return *quad_; }
  std::shared_ptr<const Quadrature> quadrature_ptr() const { return quad_; }

  const std::vector<double>& values(int k) const { return values_[k]; }
  const std::vector<double>& derivatives(int k) const { return derivs_[k]; }
  // Integral of mode k over [0, 1]; equals delta_{k0} by orthonormality.
  double mode_integral(int k) const { return mode_integral_[k]; }

  double value(int k, double zhat) const;
  double derivative(int k, double zhat) const;
  // Evaluates all modes at once; out must hold size() entries.
  void evaluate_all(double zhat, double* out) const;

  // max_{j,k} |<mode_j, mode_k> - delta_jk| under the stored quadrature.
  double gram_defect() const;

  // Gram-Schmidt record: projection coefficients onto previous modes and
  // the positive normalisation constants (empty for the educated family).
  const std::vector<std::vector<double>>& projections() const { return gs_proj_; }
  const std::vector<double>& norms() const { return gs_norm_; }
  // Transverse operator eigenvalues (educated family only).
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  // First m_small modes as an independent basis.
  ModalBasis truncated(int m_small) const;

 private:
  ModalBasis() = default;
  void finalize_samples();

  BasisFamily family_ = BasisFamily::Educated;
  int m_ = 0;
  std::shared_ptr<const Quadrature> quad_;
  std::vector<TransverseFn> raw_;
  std::vector<std::vector<double>> transform_;  // mode k = sum_i T[k][i] raw_i
  std::vector<std::vector<double>> values_, derivs_;
  std::vector<double> mode_integral_;
  std::vector<std::vector<double>> gs_proj_;
  std::vector<double> gs_norm_;
  std::vector<double> eigenvalues_;
};

// Transverse coupling matrices (row-major m x m):
//   mass[j][k]      = int chi_j chi_k dzhat          (identity up to defect)
//   stiffness[j][k] = int chi_j' chi_k' dzhat
//   advection[j][k] = int u(z(zhat)) chi_j chi_k dzhat
struct CouplingIntegrals {
  int m = 0;
  std::vector<double> mass, stiffness, advection;
  double& at(std::vector<double>& a, int j, int k) { return a[j * m + k]; }
  double mass_at(int j, int k) const { return mass[j * m + k]; }
  double stiffness_at(int j, int k) const { return stiffness[j * m + k]; }
  double advection_at(int j, int k) const { return advection[j * m + k]; }
};

CouplingIntegrals coupling_integrals(const ModalBasis& basis, const VelocityProfile& profile,
                                     const ChannelDomain& dom);

}  // namespace hiphome
