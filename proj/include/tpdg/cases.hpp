#pragma once

#include "tpdg/config.hpp"
#include "tpdg/norms.hpp"
#include "tpdg/refsol.hpp"
#include "tpdg/stepper.hpp"

namespace tpdg::harness {

// Table-3 Riemann problem states (gamma1=1.4, gamma2=2 ideal gases).
inline Primitive rp1_left() {
  Primitive p;
  p.alpha1 = 0.7;
  p.rho1 = 1.2449;
  p.rho2 = 1.2969;
  p.u1 = {-1.2638, 0.0, 0.0};
  p.u2 = {-0.38947, 0.0, 0.0};
  return p;
}
inline Primitive rp1_right() {
  Primitive p;
  p.alpha1 = 0.3;
  p.rho1 = 0.60312;
  p.rho2 = 0.73436;
  p.u1 = {0.43059, 0.0, 0.0};
  p.u2 = {-0.40507, 0.0, 0.0};
  return p;
}

// Circular explosion states (inner within r < 0.5, outer elsewhere).
inline Primitive ce_inner(CaseTag tag) {
  Primitive p;
  if (tag == CaseTag::Ce1) {
    p.alpha1 = 0.4;
    p.rho1 = 2.0;
    p.rho2 = 1.5;
  } else {
    p.alpha1 = 0.7;
    p.rho1 = 1.0;
    p.rho2 = 2.0;
  }
  return p;
}
inline Primitive ce_outer(CaseTag tag) {
  Primitive p;
  if (tag == CaseTag::Ce1) {
    p.alpha1 = 0.8;
    p.rho1 = 1.0;
    p.rho2 = 0.5;
  } else {
    p.alpha1 = 0.3;
    p.rho1 = 2.0;
    p.rho2 = 1.0;
  }
  return p;
}

/// Dambreak initial state: air (phase 1) fills Omega \ Omega2, water (phase 2)
/// the column [0,2]x[0,1]; hydrostatic pressure per subdomain with the signed
/// gravity component, volume fractions exactly 0/1.
inline StateVec dambreak_state(const RunConfig& cfg, double x, double y) {
  const double gy = cfg.ctx.sources.gravity[1]; // -9.81
  const bool water = (x <= 2.0 && y <= 1.0);
  StateVec q{};
  if (water) {
    const double p = cfg.ctx.filter.rho0_2 * gy * (y - 1.0); // >= 0 below surface
    // invert stiffened EOS p(rho) for rho2
    const auto& e = cfg.ctx.eos2;
    const double k = (e.rho0 * e.c0 * e.c0 - e.gamma * e.p0) / e.gamma;
    const double t = (p + k) * e.gamma / (e.rho0 * e.c0 * e.c0); // (rho/rho0)^gamma
    const double rho2 = e.rho0 * std::pow(t, 1.0 / e.gamma);
    q[QA] = 0.0;
    q[QR1] = 0.0;
    q[QR2] = rho2;
  } else {
    const double p = std::max(cfg.ctx.filter.rho0_1 * gy * (y - 2.0), 1e-12);
    const auto& e = cfg.ctx.eos1;
    const double rho1 = std::pow(p * std::exp(-e.s_over_cv), 1.0 / e.gamma);
    q[QA] = 1.0;
    q[QR1] = rho1;
    q[QR2] = 0.0;
  }
  return q;
}

inline StateVec riemann_state(const ModelContext& ctx, const Primitive& l, const Primitive& r,
                              bool left) {
  return model::prim_to_cons(ctx, left ? l : r);
}

/// Initial condition of the configured case as a state function of (x, y).
inline dg::StateFunction initial_condition(const RunConfig& cfg) {
  switch (cfg.tag) {
  case CaseTag::VortexSteady:
    return [ctx = cfg.ctx](double x, double y) { return refsol::vortex_state(ctx, x, y); };
  case CaseTag::VortexAdvected:
    return [ctx = cfg.ctx, u = cfg.advect_speed](double x, double y) {
      return refsol::vortex_state(ctx, x, y, u, u);
    };
  case CaseTag::Rp1:
    return [ctx = cfg.ctx](double x, double) {
      return riemann_state(ctx, rp1_left(), rp1_right(), x < 0.0);
    };
  case CaseTag::Ce1:
  case CaseTag::Ce2:
    return [ctx = cfg.ctx, tag = cfg.tag](double x, double y) {
      return riemann_state(ctx, ce_inner(tag), ce_outer(tag), std::hypot(x, y) < 0.5);
    };
  case CaseTag::Dambreak:
    return [cfg](double x, double y) { return dambreak_state(cfg, x, y); };
  case CaseTag::Custom:
    return [cfg](double x, double y) {
      const bool inner = cfg.custom_radial > 0.0
                             ? std::hypot(x, y) < cfg.custom_radial
                             : x < 0.5 * (cfg.mesh.min[0] + cfg.mesh.max[0]);
      return riemann_state(cfg.ctx, cfg.custom_left, cfg.custom_right, inner);
    };
  }
  throw ConfigError("unhandled case tag");
}

/// Exact solution (vortex cases only): the steady field, or the initial field
/// advected with periodic wrap.
inline ExactFunction exact_solution(const RunConfig& cfg, double t) {
  if (cfg.tag == CaseTag::VortexSteady)
    return [ctx = cfg.ctx](double x, double y) { return refsol::vortex_state(ctx, x, y); };
  if (cfg.tag == CaseTag::VortexAdvected) {
    const double u = cfg.advect_speed;
    const double lx = cfg.mesh.max[0] - cfg.mesh.min[0];
    const double ly = cfg.mesh.max[1] - cfg.mesh.min[1];
    return [ctx = cfg.ctx, u, t, lx, ly, x0 = cfg.mesh.min[0],
            y0 = cfg.mesh.min[1]](double x, double y) {
      double xs = std::fmod(x - u * t - x0, lx);
      if (xs < 0.0)
        xs += lx;
      double ys = std::fmod(y - u * t - y0, ly);
      if (ys < 0.0)
        ys += ly;
      return refsol::vortex_state(ctx, xs + x0, ys + y0, u, u);
    };
  }
  throw ConfigError("no exact solution for case " + cfg.case_name());
}

/// GLM cleaning speed when not set explicitly: twice the largest acoustic
/// speed of the initial condition, frozen for the whole run.
inline double default_a_psi(const RunConfig& cfg, const dg::DgSolution& sol) {
  double amax = 0.0;
  ModelContext ctx = cfg.ctx;
  ctx.variant = ModelVariant::base(); // decompose the 9 shared components
  for (int c = 0; c < sol.mesh.ncells(); ++c)
    for (int s = 0; s < sol.ndof; ++s) {
      const model::PointState ps = model::decompose_raw(ctx, sol.cell(c) + s * sol.nvar);
      amax = std::max({amax, std::sqrt(ps.ph1.a2), std::sqrt(ps.ph2.a2)});
    }
  return 2.0 * amax;
}

} // namespace tpdg::harness
