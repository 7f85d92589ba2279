#pragma once

#include <algorithm>
#include <cmath>

#include "tpdg/state.hpp"

namespace tpdg::model {

/// Decomposed state plus the EOS evaluations of both phases.
struct PointState {
  double alpha1, alpha2;
  double rho1, rho2;
  double rho, c1, c2;
  Vec3 u{}, w{}, u1{}, u2{};
  Vec3 psi{};
  eos::EosEval ph1{}, ph2{};
  double p; // mixture pressure alpha1 p1 + alpha2 p2
};

/// Raw decomposition: never throws, NaN/Inf propagate so the a-posteriori
/// detection sees them. With the filter enabled the phase densities are
/// recovered through the blend and alpha is clamped for the EOS only.
inline PointState decompose_raw(const ModelContext& ctx, const double* q) {
  PointState s;
  s.alpha1 = q[QA];
  s.alpha2 = 1.0 - q[QA];
  s.rho = q[QR1] + q[QR2];
  const double inv_rho = 1.0 / s.rho;
  s.c1 = q[QR1] * inv_rho;
  s.c2 = q[QR2] * inv_rho;
  if (ctx.filter.enabled) {
    s.rho1 = density_filter(q[QR1], s.alpha1, ctx.filter.rho0_1, ctx.filter.eps);
    s.rho2 = density_filter(q[QR2], s.alpha2, ctx.filter.rho0_2, ctx.filter.eps);
  } else {
    s.rho1 = q[QR1] / s.alpha1;
    s.rho2 = q[QR2] / s.alpha2;
  }
  for (int i = 0; i < 3; ++i) {
    s.u[i] = q[QMOM + i] * inv_rho;
    s.w[i] = q[QW + i];
    s.u1[i] = s.u[i] + s.c2 * s.w[i];
    s.u2[i] = s.u[i] - s.c1 * s.w[i];
  }
  if (ctx.variant.is_glm())
    for (int i = 0; i < 3; ++i)
      s.psi[i] = q[QPSI + i];
  s.ph1 = eos::evaluate_raw(ctx.eos1, s.rho1);
  s.ph2 = eos::evaluate_raw(ctx.eos2, s.rho2);
  const double a1 = ctx.filter.enabled ? std::clamp(s.alpha1, 0.0, 1.0) : s.alpha1;
  s.p = a1 * s.ph1.p + (1.0 - a1) * s.ph2.p;
  return s;
}

inline void check_admissible(const ModelContext& ctx, const double* q) {
  if (!(q[QA] > 0.0 && q[QA] < 1.0))
    throw AdmissibilityError("alpha1 out of (0,1): " + std::to_string(q[QA]));
  if (!(q[QR1] >= 0.0) || !(q[QR2] >= 0.0) || !(q[QR1] + q[QR2] > 0.0))
    throw AdmissibilityError("non-positive partial densities");
  for (int v = 0; v < ctx.nvar(); ++v)
    if (!std::isfinite(q[v]))
      throw AdmissibilityError("non-finite conserved entry");
}

inline Primitive cons_to_prim(const ModelContext& ctx, const StateVec& q) {
  check_admissible(ctx, q.data());
  const PointState s = decompose_raw(ctx, q.data());
  if (!(s.rho1 > 0.0) || !(s.rho2 > 0.0))
    throw AdmissibilityError("non-positive phase density");
  Primitive v;
  v.alpha1 = s.alpha1;
  v.rho1 = s.rho1;
  v.rho2 = s.rho2;
  v.u1 = s.u1;
  v.u2 = s.u2;
  v.psi = s.psi;
  return v;
}

inline StateVec prim_to_cons(const ModelContext& ctx, const Primitive& v) {
  if (!(v.alpha1 > 0.0 && v.alpha1 < 1.0))
    throw AdmissibilityError("alpha1 out of (0,1): " + std::to_string(v.alpha1));
  if (!(v.rho1 > 0.0) || !(v.rho2 > 0.0))
    throw AdmissibilityError("non-positive phase density");
  StateVec q{};
  q[QA] = v.alpha1;
  q[QR1] = v.alpha1 * v.rho1;
  q[QR2] = (1.0 - v.alpha1) * v.rho2;
  const double rho = q[QR1] + q[QR2];
  const double c1 = q[QR1] / rho;
  const double c2 = q[QR2] / rho;
  for (int i = 0; i < 3; ++i) {
    q[QMOM + i] = rho * (c1 * v.u1[i] + c2 * v.u2[i]);
    q[QW + i] = v.u1[i] - v.u2[i];
  }
  if (ctx.variant.is_glm())
    for (int i = 0; i < 3; ++i)
      q[QPSI + i] = v.psi[i];
  return q;
}

inline double mixture_pressure(const Primitive& v, const eos::EosSpec& e1,
                               const eos::EosSpec& e2) {
  return v.alpha1 * eos::pressure(e1, v.rho1) + (1.0 - v.alpha1) * eos::pressure(e2, v.rho2);
}

/// Conservative flux along axis `dir` from a decomposed point. The alpha1 row
/// is identically zero (pure non-conservative advection) and so are the psi
/// rows; the w flux delta12 = |u1|^2/2 - |u2|^2/2 + h1 - h2 sits in the
/// dir-component of w only.
inline void flux_point(const ModelContext& ctx, const PointState& s, int dir, double* f) {
  const int n = ctx.nvar();
  for (int v = 0; v < n; ++v)
    f[v] = 0.0;
  const double m1 = s.alpha1 * s.rho1; // alpha1 rho1 (filtered runs: == q[QR1] up to filter)
  const double m2 = s.alpha2 * s.rho2;
  f[QR1] = m1 * s.u1[dir];
  f[QR2] = m2 * s.u2[dir];
  for (int i = 0; i < 3; ++i)
    f[QMOM + i] = m1 * s.u1[i] * s.u1[dir] + m2 * s.u2[i] * s.u2[dir];
  f[QMOM + dir] += s.p;
  const double delta12 = 0.5 * (s.u1[0] * s.u1[0] + s.u1[1] * s.u1[1] + s.u1[2] * s.u1[2]) -
                         0.5 * (s.u2[0] * s.u2[0] + s.u2[1] * s.u2[1] + s.u2[2] * s.u2[2]) +
                         s.ph1.h - s.ph2.h;
  f[QW + dir] = delta12;
}

/// B(Q) * grad, with grad[d] the spatial gradient of the conserved vector.
/// Base: alpha1 advection and the w curl terms. GP adds the symmetrizing
/// momentum terms, GLM the psi coupling.
inline void noncons_point(const ModelContext& ctx, const PointState& s,
                          const double* const grad[3], double* out) {
  const int n = ctx.nvar();
  for (int v = 0; v < n; ++v)
    out[v] = 0.0;
  for (int k = 0; k < 3; ++k)
    out[QA] += s.u[k] * grad[k][QA];
  // u^l (d_l w^k - d_k w^l)
  for (int k = 0; k < 3; ++k) {
    double acc = 0.0;
    for (int l = 0; l < 3; ++l)
      acc += s.u[l] * (grad[l][QW + k] - grad[k][QW + l]);
    out[QW + k] += acc;
  }
  if (ctx.variant.is_gp()) {
    const double rcc = s.rho * s.c1 * s.c2;
    for (int i = 0; i < 3; ++i) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k)
        acc += s.w[k] * (grad[i][QW + k] - grad[k][QW + i]);
      out[QMOM + i] += rcc * acc;
    }
  }
  if (ctx.variant.is_glm()) {
    const double ap = ctx.variant.a_psi;
    // a_psi eps_{klm} d_l psi^m on w, advection - a_psi curl(w) on psi
    out[QW + 0] += ap * (grad[1][QPSI + 2] - grad[2][QPSI + 1]);
    out[QW + 1] += ap * (grad[2][QPSI + 0] - grad[0][QPSI + 2]);
    out[QW + 2] += ap * (grad[0][QPSI + 1] - grad[1][QPSI + 0]);
    for (int k = 0; k < 3; ++k) {
      double adv = 0.0;
      for (int j = 0; j < 3; ++j)
        adv += s.u[j] * grad[j][QPSI + k];
      out[QPSI + k] += adv;
    }
    out[QPSI + 0] -= ap * (grad[1][QW + 2] - grad[2][QW + 1]);
    out[QPSI + 1] -= ap * (grad[2][QW + 0] - grad[0][QW + 2]);
    out[QPSI + 2] -= ap * (grad[0][QW + 1] - grad[1][QW + 0]);
  }
}

inline void source_point(const ModelContext& ctx, const PointState& s, double* out) {
  const int n = ctx.nvar();
  for (int v = 0; v < n; ++v)
    out[v] = 0.0;
  for (int i = 0; i < 3; ++i)
    out[QMOM + i] = s.rho * ctx.sources.gravity[i];
}

inline double max_signal_point(const ModelContext& ctx, const PointState& s, int dir) {
  const double a1 = std::sqrt(s.ph1.a2);
  const double a2 = std::sqrt(s.ph2.a2);
  double m = std::abs(s.u1[dir]) + a1;
  m = std::max(m, std::abs(s.u2[dir]) + a2);
  m = std::max(m, std::abs(s.u[dir]));
  if (ctx.variant.is_glm())
    m = std::max(m, std::abs(s.u[dir]) + ctx.variant.a_psi);
  return m;
}

// ---- checked wrappers (module surface) ----

inline StateVec flux(const ModelContext& ctx, const StateVec& q, int dir) {
  check_admissible(ctx, q.data());
  StateVec f{};
  flux_point(ctx, decompose_raw(ctx, q.data()), dir, f.data());
  return f;
}

struct Gradient {
  StateVec d[3]{};
};

inline StateVec noncons_product(const ModelContext& ctx, const StateVec& q,
                                const Gradient& grad) {
  check_admissible(ctx, q.data());
  StateVec out{};
  const double* g[3] = {grad.d[0].data(), grad.d[1].data(), grad.d[2].data()};
  noncons_point(ctx, decompose_raw(ctx, q.data()), g, out.data());
  return out;
}

inline StateVec source(const ModelContext& ctx, const StateVec& q) {
  ctx.sources.validate();
  check_admissible(ctx, q.data());
  StateVec out{};
  source_point(ctx, decompose_raw(ctx, q.data()), out.data());
  return out;
}

inline double max_signal_speed(const ModelContext& ctx, const StateVec& q, int dir) {
  check_admissible(ctx, q.data());
  return max_signal_point(ctx, decompose_raw(ctx, q.data()), dir);
}

} // namespace tpdg::model
