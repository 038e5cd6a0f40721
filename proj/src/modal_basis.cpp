#include "hiphome/modal_basis.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

namespace {

// Relative residual below which a raw function counts as dependent on the
// span of its predecessors.  The corrector family aligns geometrically in
// i (the recursion acts like a power iteration), so the ratio crosses
// 1e-12 around i = 10 on the parabolic preset while the modes produced by
// reorthogonalised MGS stay orthonormal to machine precision; the guard is
// kept well below that to catch exact dependence (constant profiles).
constexpr double kDegeneracyRel = 1e-14;
constexpr double kSignTie = 1e-9;

double dot(const Quadrature& q, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * a[i] * b[i];
  return s;
}

}  // namespace

const char* to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::HiPhome: return "hiphome";
    case BasisFamily::Educated: return "educated";
    case BasisFamily::Legendre: return "legendre";
  }
  return "unknown";
}

ModalBasis ModalBasis::gram_schmidt(const std::vector<TransverseFn>& raw, int m,
                                    std::shared_ptr<const Quadrature> quad,
                                    BasisFamily family) {
  if (m < 1) throw ArgumentError("basis: mode count must be >= 1");
  if (static_cast<int>(raw.size()) < m)
    throw ArgumentError("basis: need at least m raw functions");
  if (!quad || quad->size() < 8) throw ArgumentError("basis: quadrature too small");

  ModalBasis basis;
  basis.family_ = family;
  basis.m_ = m;
  basis.quad_ = std::move(quad);
  basis.raw_.assign(raw.begin(), raw.begin() + m);

  const Quadrature& q = *basis.quad_;
  const std::size_t Q = q.size();

  // Raw samples at the quadrature nodes.
  std::vector<std::vector<double>> rv(m, std::vector<double>(Q));
  for (int i = 0; i < m; ++i)
    for (std::size_t s = 0; s < Q; ++s) rv[i][s] = raw[i].value(q.nodes[s]);

  basis.transform_.assign(m, std::vector<double>(m, 0.0));
  basis.values_.assign(m, std::vector<double>(Q, 0.0));
  basis.gs_proj_.assign(m, {});
  basis.gs_norm_.assign(m, 0.0);

  for (int i = 0; i < m; ++i) {
    std::vector<double> v = rv[i];
    std::vector<double> trow(m, 0.0);
    trow[i] = 1.0;
    const double raw_norm = std::sqrt(dot(q, v, v));
    std::vector<double> proj(i, 0.0);
    // Modified Gram-Schmidt with one reorthogonalisation pass.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const double p = dot(q, v, basis.values_[j]);
        proj[j] += p;
        for (std::size_t s = 0; s < Q; ++s) v[s] -= p * basis.values_[j][s];
        for (int t = 0; t <= j; ++t) trow[t] -= p * basis.transform_[j][t];
      }
    }
    const double a = std::sqrt(dot(q, v, v));
    if (!(a > kDegeneracyRel * std::max(raw_norm, 1e-300)))
      throw DegeneracyError(i, "basis: raw function " + std::to_string(i) +
                                   " is numerically dependent on the previous modes");
    for (std::size_t s = 0; s < Q; ++s) v[s] /= a;
    for (int t = 0; t <= i; ++t) trow[t] /= a;

    // Sign convention: value at zhat = 1 non-negative, tie broken at 0.
    double edge = 0.0;
    for (int t = 0; t <= i; ++t) edge += trow[t] * raw[t].value(1.0);
    if (std::abs(edge) <= kSignTie) {
      edge = 0.0;
      for (int t = 0; t <= i; ++t) edge += trow[t] * raw[t].value(0.0);
    }
    if (edge < 0.0) {
      for (std::size_t s = 0; s < Q; ++s) v[s] = -v[s];
      for (int t = 0; t <= i; ++t) trow[t] = -trow[t];
    }

    basis.values_[i] = std::move(v);
    basis.transform_[i] = std::move(trow);
    basis.gs_proj_[i] = std::move(proj);
    basis.gs_norm_[i] = a;
  }

  basis.finalize_samples();
  return basis;
}

void ModalBasis::finalize_samples() {
  const Quadrature& q = *quad_;
  const std::size_t Q = q.size();
  derivs_.assign(m_, std::vector<double>(Q, 0.0));
  mode_integral_.assign(m_, 0.0);
  for (int k = 0; k < m_; ++k) {
    if (!transform_.empty()) {
      for (std::size_t s = 0; s < Q; ++s) {
        double d = 0.0;
        for (int t = 0; t <= k; ++t) d += transform_[k][t] * raw_[t].derivative(q.nodes[s]);
        derivs_[k][s] = d;
      }
    }
    double integral = 0.0;
    for (std::size_t s = 0; s < Q; ++s) integral += q.weights[s] * values_[k][s];
    mode_integral_[k] = integral;
  }
}

ModalBasis ModalBasis::from_correctors(std::shared_ptr<const CorrectorSet> set, int m,
                                       std::shared_ptr<const Quadrature> quad) {
  if (!set) throw ArgumentError("basis: corrector set required");
  if (set->order < m - 1)
    throw ArgumentError("basis: corrector set of order >= m-1 required");
  const double Y = set->domain.half_width_rescaled();
  std::vector<TransverseFn> raw;
  raw.reserve(m);
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      raw.push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
      continue;
    }
    // chi_i(y(zhat)) with y = Y (2 zhat - 1); d/dzhat = 2Y d/dy.
    auto interp = std::make_shared<CubicInterpolant>(set->interpolant(i));
    raw.push_back({[set, interp, Y](double zhat) { return interp->value(Y * (2.0 * zhat - 1.0)); },
                   [set, interp, Y](double zhat) {
                     return 2.0 * Y * interp->derivative(Y * (2.0 * zhat - 1.0));
                   }});
  }
  return gram_schmidt(raw, m, std::move(quad), BasisFamily::HiPhome);
}

ModalBasis ModalBasis::educated(int m, double diffusion,
                                std::shared_ptr<const Quadrature> quad) {
  if (m < 1) throw ArgumentError("basis: mode count must be >= 1");
  if (!quad || quad->size() < 8) throw ArgumentError("basis: quadrature too small");
  ModalBasis basis;
  basis.family_ = BasisFamily::Educated;
  basis.m_ = m;
  basis.quad_ = std::move(quad);

  const double pi = std::acos(-1.0);
  basis.raw_.reserve(m);
  basis.eigenvalues_.resize(m);
  for (int k = 0; k < m; ++k) {
    basis.eigenvalues_[k] = diffusion * (k * pi) * (k * pi);
    if (k == 0) {
      basis.raw_.push_back({[](double) { return 1.0; }, [](double) { return 0.0; }});
    } else {
      const double w = k * pi;
      const double amp = std::sqrt(2.0);
      basis.raw_.push_back({[amp, w](double zhat) { return amp * std::cos(w * zhat); },
                            [amp, w](double zhat) { return -amp * w * std::sin(w * zhat); }});
    }
  }
  basis.transform_.assign(m, std::vector<double>(m, 0.0));
  for (int k = 0; k < m; ++k) basis.transform_[k][k] = 1.0;

  const Quadrature& q = *basis.quad_;
  basis.values_.assign(m, std::vector<double>(q.size(), 0.0));
  for (int k = 0; k < m; ++k)
    for (std::size_t s = 0; s < q.size(); ++s)
      basis.values_[k][s] = basis.raw_[k].value(q.nodes[s]);
  basis.finalize_samples();
  return basis;
}

ModalBasis ModalBasis::legendre(int m, std::shared_ptr<const Quadrature> quad) {
  std::vector<TransverseFn> raw;
  raw.reserve(m);
  for (int i = 0; i < m; ++i) {
    raw.push_back({[i](double zhat) { return std::pow(zhat, i); },
                   [i](double zhat) { return i == 0 ? 0.0 : i * std::pow(zhat, i - 1); }});
  }
  return gram_schmidt(raw, m, std::move(quad), BasisFamily::Legendre);
}

double ModalBasis::value(int k, double zhat) const {
  if (k < 0 || k >= m_) throw ArgumentError("basis value: mode index out of range");
  double s = 0.0;
  for (int t = 0; t <= k; ++t)
    if (transform_[k][t] != 0.0) s += transform_[k][t] * raw_[t].value(zhat);
  return s;
}

double ModalBasis::derivative(int k, double zhat) const {
  if (k < 0 || k >= m_) throw ArgumentError("basis derivative: mode index out of range");
  double s = 0.0;
  for (int t = 0; t <= k; ++t)
    if (transform_[k][t] != 0.0) s += transform_[k][t] * raw_[t].derivative(zhat);
  return s;
}

void ModalBasis::evaluate_all(double zhat, double* out) const {
  // One evaluation per raw function, then the triangular combination.
  double rawv[64];
  std::vector<double> rawv_heap;
  double* rv = rawv;
  if (m_ > 64) {
    rawv_heap.resize(m_);
    rv = rawv_heap.data();
  }
  for (int t = 0; t < m_; ++t) rv[t] = raw_[t].value(zhat);
  for (int k = 0; k < m_; ++k) {
    double s = 0.0;
    for (int t = 0; t <= k; ++t) s += transform_[k][t] * rv[t];
    out[k] = s;
  }
}

double ModalBasis::gram_defect() const {
  const Quadrature& q = *quad_;
  double defect = 0.0;
  for (int j = 0; j < m_; ++j)
    for (int k = j; k < m_; ++k) {
      const double g = dot(q, values_[j], values_[k]);
      defect = std::max(defect, std::abs(g - (j == k ? 1.0 : 0.0)));
    }
  return defect;
}

ModalBasis ModalBasis::truncated(int m_small) const {
  if (m_small < 1 || m_small > m_) throw ArgumentError("basis: invalid truncation size");
  ModalBasis b;
  b.family_ = family_;
  b.m_ = m_small;
  b.quad_ = quad_;
  b.raw_.assign(raw_.begin(), raw_.begin() + m_small);
  b.values_.assign(values_.begin(), values_.begin() + m_small);
  b.derivs_.assign(derivs_.begin(), derivs_.begin() + m_small);
  b.mode_integral_.assign(mode_integral_.begin(), mode_integral_.begin() + m_small);
  if (!transform_.empty()) {
    b.transform_.assign(m_small, std::vector<double>(m_small, 0.0));
    for (int k = 0; k < m_small; ++k)
      for (int t = 0; t <= k; ++t) b.transform_[k][t] = transform_[k][t];
  }
  if (!gs_proj_.empty()) {
    b.gs_proj_.assign(gs_proj_.begin(), gs_proj_.begin() + m_small);
    b.gs_norm_.assign(gs_norm_.begin(), gs_norm_.begin() + m_small);
  }
  if (!eigenvalues_.empty())
    b.eigenvalues_.assign(eigenvalues_.begin(), eigenvalues_.begin() + m_small);
  return b;
}

CouplingIntegrals coupling_integrals(const ModalBasis& basis, const VelocityProfile& profile,
                                     const ChannelDomain& dom) {
  const Quadrature& q = basis.quadrature();
  const int m = basis.size();
  CouplingIntegrals c;
  c.m = m;
  c.mass.assign(m * m, 0.0);
  c.stiffness.assign(m * m, 0.0);
  c.advection.assign(m * m, 0.0);

  std::vector<double> u(q.size());
  for (std::size_t s = 0; s < q.size(); ++s)
    u[s] = profile(fibre_map_psi_inverse(dom, q.nodes[s]));

  for (int j = 0; j < m; ++j) {
    for (int k = j; k < m; ++k) {
      double mm = 0.0, kk = 0.0, aa = 0.0;
      const std::vector<double>& vj = basis.values(j);
      const std::vector<double>& vk = basis.values(k);
      const std::vector<double>& dj = basis.derivatives(j);
      const std::vector<double>& dk = basis.derivatives(k);
      for (std::size_t s = 0; s < q.size(); ++s) {
        const double w = q.weights[s];
        mm += w * vj[s] * vk[s];
        kk += w * dj[s] * dk[s];
        aa += w * u[s] * vj[s] * vk[s];
      }
      c.mass[j * m + k] = c.mass[k * m + j] = mm;
      c.stiffness[j * m + k] = c.stiffness[k * m + j] = kk;
      c.advection[j * m + k] = c.advection[k * m + j] = aa;
    }
  }
  return c;
}

}  // namespace hiphome
