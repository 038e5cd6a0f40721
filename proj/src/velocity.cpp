#include "hiphome/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hiphome/errors.hpp"
#include "hiphome/quadrature.hpp"

namespace hiphome {

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::LinearShear: return "linear_shear";
    case ProfileKind::Poiseuille: return "poiseuille";
    case ProfileKind::LogLaw: return "loglaw";
    case ProfileKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

VelocityProfile VelocityProfile::constant(double value) {
  VelocityProfile p(ProfileKind::Constant);
  p.param_value = value;
  return p;
}

VelocityProfile VelocityProfile::linear_shear(double shear) {
  VelocityProfile p(ProfileKind::LinearShear);
  p.param_shear = shear;
  return p;
}

VelocityProfile VelocityProfile::poiseuille(double v_mean, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("poiseuille: epsilon must be positive");
  VelocityProfile p(ProfileKind::Poiseuille);
  p.param_value = v_mean;
  p.param_epsilon = epsilon;
  return p;
}

VelocityProfile VelocityProfile::loglaw(double kappa, double epsilon, double offset) {
  if (!(offset > 0.0)) throw ArgumentError("loglaw: offset d must be positive");
  return loglaw(kappa, epsilon, offset, -std::log(offset) / kappa);
}

VelocityProfile VelocityProfile::loglaw(double kappa, double epsilon, double offset,
                                        double shift) {
  if (!(kappa > 0.0)) throw ArgumentError("loglaw: kappa must be positive");
  if (!(epsilon > 0.0)) throw ArgumentError("loglaw: epsilon must be positive");
  VelocityProfile p(ProfileKind::LogLaw);
  p.param_kappa = kappa;
  p.param_epsilon = epsilon;
  p.param_offset = offset;
  p.param_shift = shift;
  return p;
}

VelocityProfile VelocityProfile::tabulated(std::vector<double> z, std::vector<double> u) {
  if (z.size() != u.size() || z.size() < 2)
    throw ArgumentError("tabulated: need matching z/u columns with at least 2 rows");
  if (!std::is_sorted(z.begin(), z.end()))
    throw ArgumentError("tabulated: abscissae must be strictly increasing");
  for (std::size_t i = 1; i < z.size(); ++i)
    if (!(z[i] > z[i - 1])) throw ArgumentError("tabulated: abscissae must be strictly increasing");
  VelocityProfile p(ProfileKind::Tabulated);
  p.tab_z_ = std::move(z);
  p.tab_u_ = std::move(u);
  return p;
}

VelocityProfile VelocityProfile::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("tabulated profile: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("tabulated profile: empty file " + path);
  std::vector<double> z, u;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw IoError("tabulated profile: malformed row " + std::to_string(lineno) + " in " + path);
    try {
      z.push_back(std::stod(a));
      u.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw IoError("tabulated profile: non-numeric row " + std::to_string(lineno) + " in " + path);
    }
  }
  return tabulated(std::move(z), std::move(u));
}

double VelocityProfile::operator()(double z) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return param_value;
    case ProfileKind::LinearShear:
      return param_shear * z;
    case ProfileKind::Poiseuille: {
      const double r = z / param_epsilon;
      return 2.0 * param_value * (1.0 - r * r);
    }
    case ProfileKind::LogLaw: {
      const double arg = z + param_epsilon + param_offset;
      if (!(arg > 0.0))
        throw DomainError("loglaw: z + epsilon + d must be positive, got " + std::to_string(arg));
      return std::log(arg) / param_kappa + param_shift;
    }
    case ProfileKind::Tabulated: {
      const double lo = tab_z_.front(), hi = tab_z_.back();
      const double slack = 1e-12 * (std::abs(lo) + std::abs(hi) + 1.0);
      if (z < lo - slack || z > hi + slack)
        throw DomainError("tabulated: z = " + std::to_string(z) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
      const double zc = std::clamp(z, lo, hi);
      auto it = std::upper_bound(tab_z_.begin(), tab_z_.end(), zc);
      std::size_t i = static_cast<std::size_t>(it - tab_z_.begin());
      if (i == 0) i = 1;
      if (i >= tab_z_.size()) i = tab_z_.size() - 1;
      const double t = (zc - tab_z_[i - 1]) / (tab_z_[i] - tab_z_[i - 1]);
      return (1.0 - t) * tab_u_[i - 1] + t * tab_u_[i];
    }
  }
  throw ArgumentError("velocity profile: unknown kind");
}

bool VelocityProfile::even_in_z() const {
  return kind_ == ProfileKind::Constant || kind_ == ProfileKind::Poiseuille;
}

double VelocityProfile::mean_speed(const ChannelDomain& dom) const {
  const int panels = 2048;
  const double a = -0.5 * dom.width;
  const double dx = dom.width / panels;
  std::vector<double> v(panels + 1);
  for (int j = 0; j <= panels; ++j) v[j] = (*this)(std::clamp(a + j * dx, a, -a));
  return simpson_integral(v, dx) / dom.width;
}

double VelocityProfile::max_speed(const ChannelDomain& dom) const {
  const int panels = 2048;
  const double a = -0.5 * dom.width;
  const double dx = dom.width / panels;
  double m = 0.0;
  for (int j = 0; j <= panels; ++j)
    m = std::max(m, std::abs((*this)(std::clamp(a + j * dx, a, -a))));
  return m;
}

double rescaled_velocity(const VelocityProfile& profile, const ChannelDomain& dom, double y) {
  const double Y = dom.half_width_rescaled();
  const double slack = 1e-12 * (Y + 1.0);
  if (y < -Y - slack || y > Y + slack)
    throw DomainError("rescaled velocity: y = " + std::to_string(y) + " outside [-Y, Y]");
  const double half = 0.5 * dom.width;
  const double z = std::clamp(dom.epsilon * y, -half, half);
  return profile(z);
}

}  // namespace hiphome
