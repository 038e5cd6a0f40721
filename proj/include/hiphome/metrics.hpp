#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hiphome/geometry.hpp"
#include "hiphome/parallel.hpp"

namespace hiphome {

using FieldEvaluator = std::function<double(double, double)>;

// L2(Omega) norm by tensor-product composite Simpson on an nx x nz node
// lattice (both odd, >= 9).  Row integrals are accumulated independently,
// so serial and parallel execution agree bitwise.
double l2_norm(const FieldEvaluator& field, const ChannelDomain& domain, int nx, int nz,
               Exec exec = Exec::Serial);

// | ||ref|| - ||red|| | on a shared lattice.
double qoi_error(const FieldEvaluator& ref, const FieldEvaluator& red,
                 const ChannelDomain& domain, int nx, int nz, Exec exec = Exec::Serial);

// Pairwise estimated orders: r_i = log(e_i/e_{i+1}) / log(p_i/p_{i+1}).
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& params);

// Least-squares slope of ln(error) against ln(param) over the pre-plateau
// prefix.  The plateau starts at the first point whose error is no longer
// at least 5% below its predecessor; at least two points are always kept.
struct RateFit {
  double slope = 0.0;
  int points = 0;  // number of pre-plateau points used
};

RateFit fit_rate_pre_plateau(const std::vector<double>& errors, const std::vector<double>& params,
                             double plateau_ratio = 0.95);

// One sweep-point measurement; qoi <= l2 by the reverse triangle inequality
// (validated on construction via make_record).
struct ErrorRecord {
  std::string family;
  int m = 0;
  double h = 0.0;
  double dt = 0.0;  // 0 marks a steady record
  double t = 0.0;
  double l2_error = 0.0;
  double qoi_error = 0.0;
  double wall_ms = 0.0;
};

ErrorRecord make_record(const std::string& family, int m, double h, double dt, double t,
                        double l2_error, double qoi_error, double wall_ms);

}  // namespace hiphome
