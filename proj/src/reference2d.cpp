#include "hiphome/reference2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiphome/banded.hpp"
#include "hiphome/errors.hpp"
#include "hiphome/quadrature.hpp"

namespace hiphome {

Lattice2D make_lattice(const ChannelDomain& domain, int nx, int nz) {
  if (nx < 2 || nz < 2) throw ArgumentError("lattice: need at least 2 nodes per direction");
  Lattice2D lat;
  lat.domain = domain;
  lat.nx = nx;
  lat.nz = nz;
  return lat;
}

double Field2D::evaluate(double x, double z) const {
  const Lattice2D& lat = lattice;
  const double slack = 1e-12 * std::max(1.0, lat.domain.length);
  if (x < -slack || x > lat.domain.length + slack)
    throw DomainError("field evaluate: x outside the channel");
  const double zs = 1e-12 * std::max(1.0, lat.domain.width);
  if (z < -0.5 * lat.domain.width - zs || z > 0.5 * lat.domain.width + zs)
    throw DomainError("field evaluate: z outside the channel");

  double ux = x / lat.dx();
  double uz = (z + 0.5 * lat.domain.width) / lat.dz();
  int i = static_cast<int>(std::floor(ux));
  int j = static_cast<int>(std::floor(uz));
  i = std::clamp(i, 0, lat.nx - 2);
  j = std::clamp(j, 0, lat.nz - 2);
  const double tx = std::clamp(ux - i, 0.0, 1.0);
  const double tz = std::clamp(uz - j, 0.0, 1.0);
  const double v00 = values[lat.index(i, j)];
  const double v10 = values[lat.index(i + 1, j)];
  const double v11 = values[lat.index(i + 1, j + 1)];
  const double v01 = values[lat.index(i, j + 1)];
  // Cells are split along the (i,j)-(i+1,j+1) diagonal.
  if (tz <= tx) return v00 * (1.0 - tx) + v10 * (tx - tz) + v11 * tz;
  return v00 * (1.0 - tz) + v11 * tx + v01 * (tz - tx);
}

std::vector<double> transverse_average(const Field2D& field) {
  const Lattice2D& lat = field.lattice;
  if (lat.nz % 2 == 0) throw ArgumentError("transverse average: nz must be odd");
  std::vector<double> column(lat.nz);
  std::vector<double> out(lat.nx);
  for (int i = 0; i < lat.nx; ++i) {
    for (int j = 0; j < lat.nz; ++j) column[j] = field.values[lat.index(i, j)];
    out[i] = simpson_integral(column, lat.dz()) / lat.domain.width;
  }
  return out;
}

Reference2D::Reference2D(const ProblemData& problem, const VelocityProfile& profile,
                         const ChannelDomain& domain, int nx, int nz, Exec exec)
    : Reference2D(
          problem, profile, domain, nx, nz,
          [f = problem.forcing](double, double) { return f; },
          [g = problem.inlet_value](double) { return g; }, exec) {}

Reference2D::Reference2D(const ProblemData& problem, const VelocityProfile& profile,
                         const ChannelDomain& domain, int nx, int nz,
                         std::function<double(double, double)> forcing,
                         std::function<double(double)> inlet, Exec exec)
    : lattice_(make_lattice(domain, nx, nz)), problem_(problem), exec_(exec) {
  if (nx < 3 || nz < 3) throw ArgumentError("reference 2d: need at least 3 nodes per direction");
  const double spacing = std::max(lattice_.dx(), lattice_.dz());
  peclet_ = mesh_peclet(profile.max_speed(domain), spacing, problem.diffusion_eff);
  if (peclet_ >= 2.0)
    throw StabilityError(peclet_, "reference 2d: mesh Peclet " + std::to_string(peclet_) +
                                      " >= 2; refine the lattice");

  // Velocity levels: nodes and vertical edge midpoints, shared by all cells.
  u_node_.resize(nz);
  u_mid_.resize(nz - 1);
  for (int j = 0; j < nz; ++j) u_node_[j] = profile(lattice_.z(j));
  for (int j = 0; j + 1 < nz; ++j) u_mid_[j] = profile(0.5 * (lattice_.z(j) + lattice_.z(j + 1)));
  for (double v : u_node_)
    if (!std::isfinite(v)) throw DomainError("reference 2d: velocity not finite on the lattice");

  assemble(forcing, inlet);
}

void Reference2D::assemble(const std::function<double(double, double)>& forcing,
                           const std::function<double(double)>& inlet) {
  const int nx = lattice_.nx, nz = lattice_.nz;
  const std::size_t n = lattice_.nodes();
  const double dx = lattice_.dx(), dz = lattice_.dz();
  const double area = 0.5 * dx * dz;
  const double de = problem_.diffusion_eff;
  const double sg = problem_.reaction;

  // Fixed 7-point stencil in ascending linear-offset order.
  static const int kOff[7][2] = {{-1, -1}, {-1, 0}, {0, -1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}};

  row_ptr_.assign(n + 1, 0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      int cnt = 0;
      for (const auto& off : kOff) {
        const int ii = i + off[0], jj = j + off[1];
        if (ii >= 0 && ii < nx && jj >= 0 && jj < nz) ++cnt;
      }
      row_ptr_[lattice_.index(i, j) + 1] = cnt;
    }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];
  col_.assign(row_ptr_[n], 0);
  op_.assign(row_ptr_[n], 0.0);
  mass_.assign(row_ptr_[n], 0.0);
  load_.assign(n, 0.0);

  // Per-triangle constant gradients; lower = {(0,0),(1,0),(1,1)} in cell
  // coordinates, upper = {(0,0),(1,1),(0,1)}.
  const double glx[3] = {-1.0 / dx, 1.0 / dx, 0.0};
  const double glz[3] = {0.0, -1.0 / dz, 1.0 / dz};
  const double gux[3] = {0.0, 1.0 / dx, -1.0 / dx};
  const double guz[3] = {-1.0 / dz, 0.0, 1.0 / dz};

  auto row_task = [&](std::size_t node) {
    const int i = static_cast<int>(node / nz);
    const int j = static_cast<int>(node % nz);

    // Row slot lookup: stencil order matches ascending column index.
    int cols[7];
    int nc = 0;
    for (const auto& off : kOff) {
      const int ii = i + off[0], jj = j + off[1];
      if (ii >= 0 && ii < nx && jj >= 0 && jj < nz)
        cols[nc++] = static_cast<int>(lattice_.index(ii, jj));
    }
    const int base = row_ptr_[node];
    for (int c = 0; c < nc; ++c) col_[base + c] = cols[c];

    double op_row[7] = {0, 0, 0, 0, 0, 0, 0};
    double mass_row[7] = {0, 0, 0, 0, 0, 0, 0};
    double load_acc = 0.0;

    auto slot = [&](int ii, int jj) {
      const int target = static_cast<int>(lattice_.index(ii, jj));
      for (int c = 0; c < nc; ++c)
        if (cols[c] == target) return c;
      throw ArgumentError("reference 2d: stencil lookup failure");
    };

    // One incident triangle: cell (ci,cj), `lower` selects the split half,
    // `a` is this node's local vertex index.
    auto add_triangle = [&](int ci, int cj, bool lower, int a) {
      if (ci < 0 || ci + 1 >= nx || cj < 0 || cj + 1 >= nz) return;
      const double* gx = lower ? glx : gux;
      const double* gz = lower ? glz : guz;
      int vi[3], vj[3];
      if (lower) {
        vi[0] = ci; vj[0] = cj;
        vi[1] = ci + 1; vj[1] = cj;
        vi[2] = ci + 1; vj[2] = cj + 1;
      } else {
        vi[0] = ci; vj[0] = cj;
        vi[1] = ci + 1; vj[1] = cj + 1;
        vi[2] = ci; vj[2] = cj + 1;
      }
      // Edge midpoints meeting at each vertex: (01,02) at 0, (01,12) at 1,
      // (02,12) at 2; u depends on z only, f on both coordinates.
      const double x0 = lattice_.x(ci);
      const double z0 = lattice_.z(cj);
      double ue[3], fx[3], fz[3];
      if (lower) {
        ue[0] = u_node_[cj];  // edge 01 at z0
        ue[1] = u_mid_[cj];   // edges 12 and 02 at z0 + dz/2
        ue[2] = u_mid_[cj];
        fx[0] = x0 + 0.5 * dx; fz[0] = z0;
        fx[1] = x0 + dx;       fz[1] = z0 + 0.5 * dz;
        fx[2] = x0 + 0.5 * dx; fz[2] = z0 + 0.5 * dz;
      } else {
        ue[0] = u_mid_[cj];        // edge 01 at z0 + dz/2
        ue[1] = u_node_[cj + 1];   // edge 12 at z0 + dz
        ue[2] = u_mid_[cj];        // edge 02 at z0 + dz/2
        fx[0] = x0 + 0.5 * dx; fz[0] = z0 + 0.5 * dz;
        fx[1] = x0 + 0.5 * dx; fz[1] = z0 + dz;
        fx[2] = x0;            fz[2] = z0 + 0.5 * dz;
      }
      // Edges incident to vertex a.
      static const int kEdge[3][2] = {{0, 2}, {0, 1}, {1, 2}};
      const double usum = ue[kEdge[a][0]] + ue[kEdge[a][1]];

      for (int b = 0; b < 3; ++b) {
        const int c = slot(vi[b], vj[b]);
        const double stiff = area * (gx[a] * gx[b] + gz[a] * gz[b]);
        const double mass = area / 12.0 * (a == b ? 2.0 : 1.0);
        const double conv = gx[b] * area / 6.0 * usum;
        op_row[c] += de * stiff + conv + sg * mass;
        mass_row[c] += mass;
      }
      load_acc += area / 6.0 *
                  (forcing(fx[kEdge[a][0]], fz[kEdge[a][0]]) +
                   forcing(fx[kEdge[a][1]], fz[kEdge[a][1]]));
    };

    // Fixed order over the six incident triangles.
    add_triangle(i, j, true, 0);
    add_triangle(i, j, false, 0);
    add_triangle(i - 1, j, true, 1);
    add_triangle(i - 1, j - 1, true, 2);
    add_triangle(i - 1, j - 1, false, 1);
    add_triangle(i, j - 1, false, 2);

    if (i == 0) {
      // Inlet Dirichlet: identity operator row, empty mass row.
      for (int c = 0; c < nc; ++c) {
        op_[base + c] = cols[c] == static_cast<int>(node) ? 1.0 : 0.0;
        mass_[base + c] = 0.0;
      }
      load_[node] = inlet(lattice_.z(j));
    } else {
      for (int c = 0; c < nc; ++c) {
        op_[base + c] = op_row[c];
        mass_[base + c] = mass_row[c];
      }
      load_[node] = load_acc;
    }
  };

  parallel_for(n, exec_, row_task);
}

std::vector<double> Reference2D::apply(const std::vector<double>& values, bool mass) const {
  const std::size_t n = lattice_.nodes();
  if (values.size() != n) throw ArgumentError("reference 2d apply: size mismatch");
  std::vector<double> out(n, 0.0);
  const std::vector<double>& a = mass ? mass_ : op_;
  parallel_for(n, exec_, [&](std::size_t r) {
    double s = 0.0;
    for (int c = row_ptr_[r]; c < row_ptr_[r + 1]; ++c) s += a[c] * values[col_[c]];
    out[r] = s;
  });
  return out;
}

Field2D Reference2D::solve_steady() const {
  const std::size_t n = lattice_.nodes();
  const int band = lattice_.nz + 1;
  BandedLU lu(static_cast<int>(n), band, band);
  for (std::size_t r = 0; r < n; ++r)
    for (int c = row_ptr_[r]; c < row_ptr_[r + 1]; ++c)
      lu.at(static_cast<int>(r), col_[c]) = op_[c];
  lu.factor();

  std::vector<double> x = load_;
  lu.solve(x);

  auto residual = [&](const std::vector<double>& sol) {
    std::vector<double> r = apply(sol, false);
    double rn = 0.0, bn = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = load_[k] - r[k];
      rn = std::max(rn, std::abs(r[k]));
      bn = std::max(bn, std::abs(load_[k]));
    }
    return std::pair<double, std::vector<double>>(rn / std::max(bn, 1e-300), std::move(r));
  };
  auto [rel, r] = residual(x);
  if (!(rel <= 1e-10)) {
    lu.solve(r);
    for (std::size_t k = 0; k < n; ++k) x[k] += r[k];
    auto [rel2, r2] = residual(x);
    (void)r2;
    if (!(rel2 <= 1e-10))
      throw SolverError("reference 2d: relative residual " + std::to_string(rel2) +
                        " exceeds 1e-10 after refinement");
  }

  Field2D field;
  field.lattice = lattice_;
  field.values = std::move(x);
  field.time = 0.0;
  return field;
}

std::vector<Field2D> Reference2D::solve_unsteady(const UnsteadyParams& params) const {
  if (!(params.dt > 0.0)) throw ArgumentError("reference 2d: dt must be positive");
  if (params.theta < 0.0 || params.theta > 1.0)
    throw ArgumentError("reference 2d: theta must lie in [0,1]");
  if (!(params.horizon > 0.0)) throw ArgumentError("reference 2d: horizon must be positive");
  const int steps = static_cast<int>(std::lround(params.horizon / params.dt));
  if (!(std::abs(steps * params.dt - params.horizon) <= 1e-9 * std::max(1.0, params.horizon)))
    throw ArgumentError("reference 2d: horizon must be a multiple of dt");

  std::vector<int> snap_steps;
  for (double t : params.snapshots) {
    const int k = static_cast<int>(std::lround(t / params.dt));
    if (k < 1 || k > steps || !(std::abs(k * params.dt - t) <= 1e-9 * std::max(1.0, t)))
      throw ArgumentError("reference 2d: snapshot " + std::to_string(t) +
                          " not aligned with the step grid");
    snap_steps.push_back(k);
  }
  if (!std::is_sorted(snap_steps.begin(), snap_steps.end()))
    throw ArgumentError("reference 2d: snapshots must be increasing");

  const std::size_t n = lattice_.nodes();
  const int band = lattice_.nz + 1;
  const double dt = params.dt, th = params.theta;

  BandedLU lhs(static_cast<int>(n), band, band);
  for (std::size_t r = 0; r < n; ++r) {
    const bool pinned = r < static_cast<std::size_t>(lattice_.nz);
    for (int c = row_ptr_[r]; c < row_ptr_[r + 1]; ++c) {
      if (pinned)
        lhs.at(static_cast<int>(r), col_[c]) = col_[c] == static_cast<int>(r) ? 1.0 : 0.0;
      else
        lhs.at(static_cast<int>(r), col_[c]) = mass_[c] / dt + th * op_[c];
    }
  }
  lhs.factor();

  std::vector<double> state(n, 0.0);
  std::vector<Field2D> out;
  out.reserve(snap_steps.size());
  std::size_t next = 0;
  for (int k = 1; k <= steps && next < snap_steps.size(); ++k) {
    std::vector<double> mc = apply(state, true);
    std::vector<double> ac = apply(state, false);
    std::vector<double> rhs(n);
    parallel_for(n, exec_, [&](std::size_t r) {
      rhs[r] = mc[r] / dt - (1.0 - th) * ac[r] + load_[r];
    });
    for (int j = 0; j < lattice_.nz; ++j) rhs[j] = load_[j];
    lhs.solve(rhs);
    state = std::move(rhs);
    for (double v : state)
      if (!std::isfinite(v))
        throw BlowUpError(k, "reference 2d: non-finite state at step " + std::to_string(k));
    if (k == snap_steps[next]) {
      Field2D field;
      field.lattice = lattice_;
      field.values = state;
      field.time = k * dt;
      out.push_back(std::move(field));
      ++next;
    }
  }
  return out;
}

}  // namespace hiphome
