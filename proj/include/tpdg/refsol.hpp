#pragma once

#include <cmath>
#include <vector>

#include "tpdg/dg.hpp"
#include "tpdg/limiter.hpp"

namespace tpdg::refsol {

/// EOS pair of the equilibrium vortex: both phases ideal with gamma = 1.4 and
/// zero entropy constant, so rho = p^{5/7} and the two phases share density
/// and tangential speed.
inline ModelContext vortex_context() {
  ModelContext ctx;
  ctx.variant = ModelVariant::base();
  ctx.eos1 = eos::EosSpec::ideal(1.4);
  ctx.eos2 = eos::EosSpec::ideal(1.4);
  return ctx;
}

/// Stationary cylindrical equilibrium:
///   alpha1 = 1/3 + e^{-r^2/2}/(2 sqrt(2 pi)),  p = 1 - e^{1-r^2}/4,
///   rho_i = p^{5/7},  u_theta = 2^{3/14} sqrt(e^{1-r^2} r^2 / (4-e^{1-r^2})^{5/7}),
/// radial and relative velocities zero.
struct VortexPoint {
  double alpha1, rho, p, u_theta;
};

inline VortexPoint vortex_radial(double r) {
  VortexPoint v;
  const double r2 = r * r;
  v.alpha1 = 1.0 / 3.0 + std::exp(-0.5 * r2) / (2.0 * std::sqrt(2.0 * M_PI));
  const double g = std::exp(1.0 - r2);
  v.p = 1.0 - 0.25 * g;
  v.rho = std::pow(v.p, 5.0 / 7.0);
  v.u_theta = (r == 0.0) ? 0.0
                         : std::pow(2.0, 3.0 / 14.0) *
                               std::sqrt(g * r2 / std::pow(4.0 - g, 5.0 / 7.0));
  return v;
}

inline Primitive vortex_exact(double r) {
  const VortexPoint v = vortex_radial(r);
  Primitive p;
  p.alpha1 = v.alpha1;
  p.rho1 = v.rho;
  p.rho2 = v.rho;
  p.u1 = {0.0, 0.0, 0.0}; // tangential direction applied by the caller
  p.u2 = {0.0, 0.0, 0.0};
  return p;
}

/// Conserved vortex state at a point, optionally advected by a uniform
/// background velocity.
inline StateVec vortex_state(const ModelContext& ctx, double x, double y, double ux = 0.0,
                             double uy = 0.0) {
  const double r = std::hypot(x, y);
  const VortexPoint v = vortex_radial(r);
  Primitive p;
  p.alpha1 = v.alpha1;
  p.rho1 = v.rho;
  p.rho2 = v.rho;
  const double tx = r > 0.0 ? -y / r : 0.0;
  const double ty = r > 0.0 ? x / r : 0.0;
  p.u1 = {v.u_theta * tx + ux, v.u_theta * ty + uy, 0.0};
  p.u2 = p.u1;
  return model::prim_to_cons(ctx, p);
}

/// Max residual of the stationary radial balance
///   alpha1 rho1 u1t^2/r + alpha2 rho2 u2t^2/r - dp/dr
/// with dp/dr by central differences of step dr.
inline double vortex_residual_check(double r_min = 0.1, double r_max = 8.0,
                                    int samples = 1000, double dr = 1e-4,
                                    double rho_perturbation = 0.0) {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double r = r_min + (r_max - r_min) * i / samples;
    const VortexPoint v = vortex_radial(r);
    const double rho = v.rho * (1.0 + rho_perturbation);
    const double centrifugal = rho * v.u_theta * v.u_theta / r; // both phases share rho, ut
    const double dpdr =
        (vortex_radial(r + dr).p - vortex_radial(r - dr).p) / (2.0 * dr);
    worst = std::max(worst, std::abs(centrifugal - dpdr));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Second-order MUSCL-Hancock reference solvers (Rusanov + path terms)
// ---------------------------------------------------------------------------

struct Profile1d {
  std::vector<double> x;
  std::vector<Primitive> state;
  double time = 0.0;
  int d = 0; // geometric source exponent; 0 for plane 1D
};

using RadialProfile = Profile1d;

namespace detail {

inline void geometric_source(const ModelContext& ctx, const double* q, double r, int d,
                             double* out) {
  const int n = ctx.nvar();
  for (int v = 0; v < n; ++v)
    out[v] = 0.0;
  if (d == 0)
    return;
  const model::PointState s = model::decompose_raw(ctx, q);
  const double m1 = q[QR1], m2 = q[QR2];
  const double f = -static_cast<double>(d) / r;
  out[QR1] = f * m1 * s.u1[0];
  out[QR2] = f * m2 * s.u2[0];
  out[QMOM] = f * (m1 * s.u1[0] * s.u1[0] + m2 * s.u2[0] * s.u2[0]);
}

/// One MUSCL-Hancock step on U[0..nc+4) (two ghost cells per side, already
/// filled). rc = cell-center radii for the geometric source, null for plane.
inline void fv_step(const ModelContext& ctx, std::vector<StateVec>& U, int nc, double ds,
                    double dt, const std::vector<double>* rc, int dgeo) {
  const int n = ctx.nvar();
  const int total = nc + 4;
  std::vector<StateVec> slope(total), ustar(total);
  StateVec ql{}, qr{}, fl{}, fr{}, bn{}, src{};
  StateVec gx{}, gy{}, gz{};
  const double* grad[3] = {gx.data(), gy.data(), gz.data()};

  for (int i = 1; i < total - 1; ++i) {
    for (int v = 0; v < n; ++v)
      slope[i][v] = limiter::minmod(U[i][v] - U[i - 1][v], U[i + 1][v] - U[i][v]);
    // half step: u - dt/2 [ (F(uR)-F(uL))/ds + B(u) s/ds - S ]
    for (int v = 0; v < n; ++v) {
      ql[v] = U[i][v] - 0.5 * slope[i][v];
      qr[v] = U[i][v] + 0.5 * slope[i][v];
      gx[v] = slope[i][v] / ds;
    }
    model::flux_point(ctx, model::decompose_raw(ctx, ql.data()), 0, fl.data());
    model::flux_point(ctx, model::decompose_raw(ctx, qr.data()), 0, fr.data());
    const model::PointState ps = model::decompose_raw(ctx, U[i].data());
    model::noncons_point(ctx, ps, grad, bn.data());
    for (int v = 0; v < n; ++v)
      ustar[i][v] = U[i][v] - 0.5 * dt * ((fr[v] - fl[v]) / ds + bn[v]);
    if (rc) {
      geometric_source(ctx, U[i].data(), (*rc)[i], dgeo, src.data());
      for (int v = 0; v < n; ++v)
        ustar[i][v] += 0.5 * dt * src[v];
    }
  }

  std::vector<dg::FaceFlux> ff(nc + 1);
  for (int f = 0; f <= nc; ++f) {
    const int il = f + 1, ir = f + 2;
    for (int v = 0; v < n; ++v) {
      ql[v] = ustar[il][v] + 0.5 * slope[il][v];
      qr[v] = ustar[ir][v] - 0.5 * slope[ir][v];
    }
    dg::face_flux_point(ctx, ql.data(), qr.data(), 0, ff[f]);
  }
  for (int i = 0; i < nc; ++i) {
    const int g = i + 2;
    for (int v = 0; v < n; ++v)
      gx[v] = slope[g][v] / ds;
    const model::PointState ps = model::decompose_raw(ctx, ustar[g].data());
    model::noncons_point(ctx, ps, grad, bn.data());
    for (int v = 0; v < n; ++v)
      U[g][v] += dt / ds * (-(ff[i + 1].G[v] + ff[i + 1].D[v]) + (ff[i].G[v] - ff[i].D[v])) -
                 dt * bn[v];
    if (rc) {
      geometric_source(ctx, ustar[g].data(), (*rc)[g], dgeo, src.data());
      for (int v = 0; v < n; ++v)
        U[g][v] += dt * src[v];
    }
  }
}

inline void fill_ghosts(std::vector<StateVec>& U, int nc, bool wall_left) {
  for (int l = 0; l < 2; ++l) {
    U[1 - l] = U[2 + l];
    if (wall_left)
      grid::ghost_state_inplace(U[1 - l].data(), 0, grid::BoundaryKind::SlipWall);
    U[nc + 2 + l] = U[nc + 1]; // outflow
  }
}

inline Profile1d fv_solve(const ModelContext& ctx, const std::vector<StateVec>& init,
                          double x0, double ds, double t_end, bool wall_left, int dgeo,
                          double cfl = 0.9) {
  const int nc = static_cast<int>(init.size());
  std::vector<StateVec> U(nc + 4);
  std::vector<double> rc(nc + 4, 1.0);
  for (int i = 0; i < nc; ++i) {
    U[i + 2] = init[i];
    rc[i + 2] = x0 + (i + 0.5) * ds;
  }
  rc[0] = x0 - 1.5 * ds;
  rc[1] = x0 - 0.5 * ds;
  rc[nc + 2] = x0 + (nc + 0.5) * ds;
  rc[nc + 3] = x0 + (nc + 1.5) * ds;

  double t = 0.0;
  while (t < t_end - 1e-14) {
    fill_ghosts(U, nc, wall_left);
    double smax = 0.0;
    for (int i = 2; i < nc + 2; ++i) {
      const model::PointState ps = model::decompose_raw(ctx, U[i].data());
      smax = std::max(smax, model::max_signal_point(ctx, ps, 0));
      if (!std::isfinite(smax))
        throw std::runtime_error("reference solver: non-finite state at x=" +
                                 std::to_string(rc[i]) + ", t=" + std::to_string(t));
    }
    double dt = cfl * ds / smax;
    dt = std::min(dt, t_end - t);
    fv_step(ctx, U, nc, ds, dt, dgeo > 0 ? &rc : nullptr, dgeo);
    t += dt;
  }

  Profile1d prof;
  prof.time = t_end;
  prof.d = dgeo;
  prof.x.resize(nc);
  prof.state.resize(nc);
  for (int i = 0; i < nc; ++i) {
    prof.x[i] = rc[i + 2];
    StateVec q = U[i + 2];
    prof.state[i] = model::cons_to_prim(ctx, q);
  }
  return prof;
}

} // namespace detail

/// Plane 1D Riemann-problem reference run (MUSCL-Hancock, minmod, Rusanov +
/// path terms, CFL 0.9, outflow boundaries).
inline Profile1d solve_reference_1d(const ModelContext& ctx, const Primitive& left,
                                    const Primitive& right, double x0, double x1,
                                    double t_end, int cells) {
  if (cells < 2)
    throw std::invalid_argument("solve_reference_1d: need at least 2 cells");
  const double ds = (x1 - x0) / cells;
  const StateVec ql = model::prim_to_cons(ctx, left);
  const StateVec qr = model::prim_to_cons(ctx, right);
  std::vector<StateVec> init(cells);
  for (int i = 0; i < cells; ++i)
    init[i] = (x0 + (i + 0.5) * ds < 0.5 * (x0 + x1)) ? ql : qr;
  return detail::fv_solve(ctx, init, x0, ds, t_end, /*wall_left=*/false, /*dgeo=*/0);
}

/// Radial reference system with geometric reaction sources -(d/r)(...) at the
/// cell centers, reflecting wall at r=0, outflow at R_max.
inline RadialProfile solve_reference_radial(const ModelContext& ctx, const Primitive& inner,
                                            const Primitive& outer, double r_jump,
                                            double r_max, double t_end, int cells, int d) {
  if (!(r_jump < r_max))
    throw std::invalid_argument("solve_reference_radial: r_jump must be below R_max");
  if (d != 0 && d != 1)
    throw std::invalid_argument("solve_reference_radial: d must be 0 or 1");
  const double ds = r_max / cells;
  const StateVec qi = model::prim_to_cons(ctx, inner);
  const StateVec qo = model::prim_to_cons(ctx, outer);
  std::vector<StateVec> init(cells);
  for (int i = 0; i < cells; ++i)
    init[i] = ((i + 0.5) * ds < r_jump) ? qi : qo;
  return detail::fv_solve(ctx, init, 0.0, ds, t_end, /*wall_left=*/true, d);
}

} // namespace tpdg::refsol
