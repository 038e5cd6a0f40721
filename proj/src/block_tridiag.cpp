#include "hiphome/block_tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiphome/errors.hpp"

namespace hiphome {

DenseLU::DenseLU(const double* a, int n) : n_(n), lu_(a, a + static_cast<std::size_t>(n) * n) {
  if (n < 1) throw ArgumentError("dense lu: order must be positive");
  pivot_.resize(n);
  for (int c = 0; c < n; ++c) {
    int best = c;
    double mag = std::abs(lu_[static_cast<std::size_t>(c) * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const double v = std::abs(lu_[static_cast<std::size_t>(r) * n + c]);
      if (v > mag) {
        mag = v;
        best = r;
      }
    }
    if (!(mag > 0.0)) throw SolverError("dense lu: singular block (zero pivot column)");
    pivot_[c] = best;
    if (best != c)
      for (int k = 0; k < n; ++k)
        std::swap(lu_[static_cast<std::size_t>(c) * n + k],
                  lu_[static_cast<std::size_t>(best) * n + k]);
    const double inv = 1.0 / lu_[static_cast<std::size_t>(c) * n + c];
    for (int r = c + 1; r < n; ++r) {
      double& m = lu_[static_cast<std::size_t>(r) * n + c];
      m *= inv;
      const double f = m;
      for (int k = c + 1; k < n; ++k)
        lu_[static_cast<std::size_t>(r) * n + k] -= f * lu_[static_cast<std::size_t>(c) * n + k];
    }
  }
}

void DenseLU::solve(double* x) const {
  const int n = n_;
  for (int c = 0; c < n; ++c)
    if (pivot_[c] != c) std::swap(x[c], x[pivot_[c]]);
  for (int r = 1; r < n; ++r) {
    double s = x[r];
    for (int k = 0; k < r; ++k) s -= lu_[static_cast<std::size_t>(r) * n + k] * x[k];
    x[r] = s;
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = x[r];
    for (int k = r + 1; k < n; ++k) s -= lu_[static_cast<std::size_t>(r) * n + k] * x[k];
    x[r] = s / lu_[static_cast<std::size_t>(r) * n + r];
  }
}

void DenseLU::solve_many(double* cols, int k) const {
  for (int j = 0; j < k; ++j) solve(cols + static_cast<std::size_t>(j) * n_);
}

BlockTriDiag::BlockTriDiag(int blocks, int block_size) : blocks_(blocks), size_(block_size) {
  if (blocks < 1 || block_size < 1)
    throw ArgumentError("block tridiag: block count and size must be positive");
  const std::size_t nb = static_cast<std::size_t>(blocks) * block_size * block_size;
  const std::size_t no = blocks > 1 ? (static_cast<std::size_t>(blocks) - 1) * block_size * block_size : 0;
  diag_.assign(nb, 0.0);
  lower_.assign(no, 0.0);
  upper_.assign(no, 0.0);
}

std::vector<double> BlockTriDiag::apply(const std::vector<double>& x) const {
  if (x.size() != order()) throw ArgumentError("block tridiag apply: size mismatch");
  const int m = size_;
  std::vector<double> y(order(), 0.0);
  for (int i = 0; i < blocks_; ++i) {
    double* yi = y.data() + static_cast<std::size_t>(i) * m;
    const double* xi = x.data() + static_cast<std::size_t>(i) * m;
    const double* d = diag(i);
    for (int r = 0; r < m; ++r) {
      double s = 0.0;
      for (int c = 0; c < m; ++c) s += d[static_cast<std::size_t>(r) * m + c] * xi[c];
      yi[r] = s;
    }
    if (i > 0) {
      const double* l = lower(i - 1);
      const double* xm = x.data() + static_cast<std::size_t>(i - 1) * m;
      for (int r = 0; r < m; ++r) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += l[static_cast<std::size_t>(r) * m + c] * xm[c];
        yi[r] += s;
      }
    }
    if (i + 1 < blocks_) {
      const double* u = upper(i);
      const double* xp = x.data() + static_cast<std::size_t>(i + 1) * m;
      for (int r = 0; r < m; ++r) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) s += u[static_cast<std::size_t>(r) * m + c] * xp[c];
        yi[r] += s;
      }
    }
  }
  return y;
}

BlockThomas::BlockThomas(const BlockTriDiag& a) : blocks_(a.blocks()), size_(a.block_size()) {
  const int m = size_;
  const std::size_t bs = static_cast<std::size_t>(m) * m;
  factors_.reserve(blocks_);
  transformed_.assign(blocks_ > 1 ? (blocks_ - 1) * bs : 0, 0.0);
  lower_.assign(blocks_ > 1 ? (blocks_ - 1) * bs : 0, 0.0);
  if (blocks_ > 1) {
    for (int i = 0; i + 1 < blocks_; ++i)
      std::copy(a.lower(i), a.lower(i) + bs, lower_.data() + i * bs);
  }

  std::vector<double> work(bs);
  std::copy(a.diag(0), a.diag(0) + bs, work.data());
  for (int i = 0; i < blocks_; ++i) {
    factors_.emplace_back(work.data(), m);
    if (i + 1 == blocks_) break;
    // W_i = inv(D'_i) U_i, stored column-major so each solve is contiguous.
    double* w = transformed_.data() + static_cast<std::size_t>(i) * bs;
    const double* u = a.upper(i);
    for (int c = 0; c < m; ++c)
      for (int r = 0; r < m; ++r) w[static_cast<std::size_t>(c) * m + r] = u[static_cast<std::size_t>(r) * m + c];
    factors_[i].solve_many(w, m);
    // D'_{i+1} = D_{i+1} - L_i W_i.
    const double* l = lower_.data() + static_cast<std::size_t>(i) * bs;
    std::copy(a.diag(i + 1), a.diag(i + 1) + bs, work.data());
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
          s += l[static_cast<std::size_t>(r) * m + k] * w[static_cast<std::size_t>(c) * m + k];
        work[static_cast<std::size_t>(r) * m + c] -= s;
      }
  }
}

std::vector<double> BlockThomas::solve(const std::vector<double>& rhs) const {
  const int m = size_;
  const std::size_t bs = static_cast<std::size_t>(m) * m;
  if (rhs.size() != static_cast<std::size_t>(blocks_) * m)
    throw ArgumentError("block thomas: rhs size mismatch");
  std::vector<double> y = rhs;
  std::vector<double> z(m);
  for (int i = 1; i < blocks_; ++i) {
    std::copy(y.begin() + static_cast<std::size_t>(i - 1) * m,
              y.begin() + static_cast<std::size_t>(i) * m, z.begin());
    factors_[i - 1].solve(z.data());
    const double* l = lower_.data() + static_cast<std::size_t>(i - 1) * bs;
    double* yi = y.data() + static_cast<std::size_t>(i) * m;
    for (int r = 0; r < m; ++r) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += l[static_cast<std::size_t>(r) * m + k] * z[k];
      yi[r] -= s;
    }
  }
  factors_[blocks_ - 1].solve(y.data() + static_cast<std::size_t>(blocks_ - 1) * m);
  for (int i = blocks_ - 2; i >= 0; --i) {
    double* yi = y.data() + static_cast<std::size_t>(i) * m;
    const double* w = transformed_.data() + static_cast<std::size_t>(i) * bs;
    const double* xp = y.data() + static_cast<std::size_t>(i + 1) * m;
    factors_[i].solve(yi);
    for (int c = 0; c < m; ++c) {
      const double f = xp[c];
      const double* col = w + static_cast<std::size_t>(c) * m;
      for (int r = 0; r < m; ++r) yi[r] -= f * col[r];
    }
  }
  return y;
}

std::vector<double> solve_block_tridiagonal(const BlockTriDiag& a, const std::vector<double>& rhs) {
  BlockThomas fact(a);
  std::vector<double> x = fact.solve(rhs);
  auto residual = [&](const std::vector<double>& sol) {
    std::vector<double> r = a.apply(sol);
    double rn = 0.0, bn = 0.0;
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      r[j] = rhs[j] - r[j];
      rn = std::max(rn, std::abs(r[j]));
      bn = std::max(bn, std::abs(rhs[j]));
    }
    return std::pair<double, std::vector<double>>(rn / std::max(bn, 1e-300), std::move(r));
  };
  auto [rel, r] = residual(x);
  if (!(rel <= 1e-10)) {
    std::vector<double> dx = fact.solve(r);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += dx[j];
    auto [rel2, r2] = residual(x);
    (void)r2;
    if (!(rel2 <= 1e-10))
      throw SolverError("block solve: relative residual " + std::to_string(rel2) +
                        " exceeds 1e-10 after refinement");
  }
  return x;
}

}  // namespace hiphome
