#pragma once

#include <vector>

#include "hiphome/corrector.hpp"
#include "hiphome/fem1d.hpp"
#include "hiphome/geometry.hpp"

namespace hiphome {

// Cross-sectionally averaged 1D surrogate field.
struct EffectiveField1D {
  Mesh1D mesh;
  std::vector<double> values;
  double mean_velocity = 0.0;
  double diffusion = 0.0;  // 0 for the leading-order model
  double time = 0.0;

  double evaluate(double x) const;
};

// Leading-order pure advection-reaction transport, first-order upwind,
// steady regime:  u_mean c' + sigma c = f,  c(0) = c_B.
EffectiveField1D solve_leading_order(const ProblemData& problem, double u_mean,
                                     const Mesh1D& mesh);

// Taylor-dispersion model: 1D advection-diffusion-reaction with the
// enhanced coefficient; Galerkin P1, Dirichlet inlet, natural outflow.
EffectiveField1D solve_effective_steady(const ProblemData& problem,
                                        const EffectiveCoefficients& coeff, const Mesh1D& mesh);

std::vector<EffectiveField1D> solve_effective_unsteady(const ProblemData& problem,
                                                       const EffectiveCoefficients& coeff,
                                                       const Mesh1D& mesh,
                                                       const UnsteadyParams& params);

}  // namespace hiphome
