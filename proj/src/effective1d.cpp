#include "hiphome/effective1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

double EffectiveField1D::evaluate(double x) const {
  const double slack = 1e-12 * std::max(1.0, mesh.length);
  if (x < -slack || x > mesh.length + slack)
    throw DomainError("effective field: x outside [0, length]");
  double u = x / mesh.spacing;
  int e = static_cast<int>(std::floor(u));
  e = std::clamp(e, 0, mesh.nodes - 2);
  const double t = std::clamp(u - e, 0.0, 1.0);
  return values[e] * (1.0 - t) + values[e + 1] * t;
}

EffectiveField1D solve_leading_order(const ProblemData& problem, double u_mean,
                                     const Mesh1D& mesh) {
  if (!(u_mean > 0.0))
    throw ArgumentError("leading order: mean velocity must be positive (inflow transport)");
  EffectiveField1D out;
  out.mesh = mesh;
  out.mean_velocity = u_mean;
  out.diffusion = 0.0;
  out.values.assign(mesh.nodes, 0.0);
  out.values[0] = problem.inlet_value;
  const double a = u_mean / mesh.spacing;
  for (int s = 1; s < mesh.nodes; ++s)
    out.values[s] = (problem.forcing + a * out.values[s - 1]) / (a + problem.reaction);
  return out;
}

EffectiveField1D solve_effective_steady(const ProblemData& problem,
                                        const EffectiveCoefficients& coeff, const Mesh1D& mesh) {
  if (coeff.dispersion < coeff.base_diffusion * (1.0 - 1e-13))
    throw ArgumentError("effective solve: dispersion below the base diffusion");
  AdrSolver1D solver(mesh, coeff.dispersion, coeff.mean_velocity, problem.reaction,
                     problem.forcing, problem.inlet_value);
  EffectiveField1D out;
  out.mesh = mesh;
  out.mean_velocity = coeff.mean_velocity;
  out.diffusion = coeff.dispersion;
  out.values = solver.solve_steady();
  return out;
}

std::vector<EffectiveField1D> solve_effective_unsteady(const ProblemData& problem,
                                                       const EffectiveCoefficients& coeff,
                                                       const Mesh1D& mesh,
                                                       const UnsteadyParams& params) {
  if (!(params.dt > 0.0)) throw ArgumentError("effective unsteady: dt must be positive");
  if (params.theta < 0.0 || params.theta > 1.0)
    throw ArgumentError("effective unsteady: theta must lie in [0,1]");
  const int steps = static_cast<int>(std::lround(params.horizon / params.dt));
  if (!(std::abs(steps * params.dt - params.horizon) <= 1e-9 * std::max(1.0, params.horizon)))
    throw ArgumentError("effective unsteady: horizon must be a multiple of dt");
  std::vector<int> snap_steps;
  for (double t : params.snapshots) {
    const int k = static_cast<int>(std::lround(t / params.dt));
    if (k < 1 || k > steps || !(std::abs(k * params.dt - t) <= 1e-9 * std::max(1.0, t)))
      throw ArgumentError("effective unsteady: snapshot " + std::to_string(t) +
                          " not aligned with the step grid");
    snap_steps.push_back(k);
  }

  AdrSolver1D solver(mesh, coeff.dispersion, coeff.mean_velocity, problem.reaction,
                     problem.forcing, problem.inlet_value);
  std::vector<double> state(mesh.nodes, problem.initial_value);
  std::vector<EffectiveField1D> out;
  std::size_t next = 0;
  for (int k = 1; k <= steps && next < snap_steps.size(); ++k) {
    state = solver.step(state, params.dt, params.theta);
    for (double v : state)
      if (!std::isfinite(v))
        throw BlowUpError(k, "effective unsteady: non-finite state at step " + std::to_string(k));
    if (k == snap_steps[next]) {
      EffectiveField1D field;
      field.mesh = mesh;
      field.mean_velocity = coeff.mean_velocity;
      field.diffusion = coeff.dispersion;
      field.values = state;
      field.time = k * params.dt;
      out.push_back(std::move(field));
      ++next;
    }
  }
  return out;
}

}  // namespace hiphome
