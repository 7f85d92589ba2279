#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "tpdg/dg.hpp"
#include "tpdg/limiter.hpp"

namespace tpdg {

struct StepStats {
  double dt = 0.0;
  int troubled = 0;
  int predictor_failures = 0;
  int skipped = 0;
};

/// One-step ADER-DG with the a-posteriori MOOD subcell limiter.
/// Per step: (1) local predictors + volume residuals + face traces, cell by
/// cell; (2) corrector everywhere -> candidate; (3) detection against the
/// previous solution's subcell averages; (4) troubled cells redone with the
/// MUSCL-Hancock subcell scheme and reconstructed; (5) unlimited neighbors of
/// limited cells get their face integral replaced by the subcell fluxes so
/// the conserved rows keep telescoping exactly.
class Stepper {
public:
  Stepper(const ModelContext& ctx, const grid::Mesh& mesh, const grid::Boundaries& bnd,
          int N, double cfl, const limiter::LimiterParams& lim = {})
      : ctx_(ctx), mesh_(mesh), bnd_(bnd), cfl_(cfl), lim_(lim),
        basis_(dg::build_basis(N)), sub_(dg::SubcellOps::make(basis_, mesh.dim)) {
    bnd_.validate();
    ctx_.sources.validate();
    work_.resize(mesh_, basis_, ctx_.nvar());
    store_.reset(mesh_.ncells(), sub_.nsub, ctx_.nvar());
    nstore_.reset(mesh_.ncells(), sub_.nsub, ctx_.nvar());
    prev_avg_.assign(static_cast<std::size_t>(mesh_.ncells()) * sub_.nsub * ctx_.nvar(), 0.0);
    prev_min_.assign(static_cast<std::size_t>(mesh_.ncells()) * ctx_.nvar(), 0.0);
    prev_max_.assign(static_cast<std::size_t>(mesh_.ncells()) * ctx_.nvar(), 0.0);
    scratch_.assign(static_cast<std::size_t>(sub_.nsub1) * sub_.ndof1 * ctx_.nvar() + 16, 0.0);
    cell_avg_.assign(static_cast<std::size_t>(sub_.nsub) * ctx_.nvar(), 0.0);
  }

  const ModelContext& context() const { return ctx_; }
  const dg::NodalBasis& basis() const { return basis_; }
  const dg::SubcellOps& subcell_ops() const { return sub_; }
  const grid::Mesh& mesh() const { return mesh_; }
  dg::DgSolution& solution() { return sol_; }
  const dg::DgSolution& solution() const { return sol_; }
  const limiter::TroubleFlags& last_flags() const { return flags_; }
  const limiter::SubcellStore& store() const { return store_; }

  void set_solution(dg::DgSolution s) {
    sol_ = std::move(s);
    store_.reset(mesh_.ncells(), sub_.nsub, ctx_.nvar());
  }

  /// Test hook: called after detection, may force or clear flags.
  void set_flag_hook(std::function<void(limiter::TroubleFlags&)> h) { flag_hook_ = std::move(h); }

  double suggest_dt() const { return dg::time_step(ctx_, sol_, basis_, cfl_); }

  StepStats step(double dt_cap = std::numeric_limits<double>::infinity()) {
    const int nc = mesh_.ncells();
    const int nvar = ctx_.nvar();
    StepStats st;
    double dt = suggest_dt();
    if (dt > dt_cap)
      dt = dt_cap;
    st.dt = dt;

    // fast path on filtered runs: cells already outside the volume-fraction
    // guard at t^n are certain limiter customers; skip the DG phases where no
    // unflagged neighbor could consume their predictor
    std::vector<std::uint8_t> eligible(nc, 0);
    if (ctx_.filter.enabled && lim_.enabled) {
      for (int c = 0; c < nc; ++c)
        eligible[c] = cell_violates_alpha_range(sol_.cell(c), sol_.ndof, nvar);
      for (int c = 0; c < nc; ++c) {
        bool skip = eligible[c] != 0;
        for (int a = 0; a < mesh_.dim && skip; ++a)
          for (int s = 0; s < 2 && skip; ++s) {
            const int nb = grid::neighbor(mesh_, bnd_, c, a, s == 0 ? -1 : +1);
            if (nb >= 0 && !eligible[nb])
              skip = false;
          }
        work_.skipped[c] = skip ? 1 : 0;
      }
    } else {
      std::fill(work_.skipped.begin(), work_.skipped.end(), 0);
    }

    // phase 1: predictors, volume residuals, traces
    for (int c = 0; c < nc; ++c) {
      work_.pred_fail[c] = 0;
      if (work_.skipped[c]) {
        ++st.skipped;
        continue;
      }
      const bool ok = dg::local_predictor(ctx_, basis_, mesh_, sol_.cell(c), dt, work_);
      if (!ok) {
        work_.pred_fail[c] = 1;
        ++st.predictor_failures;
      }
      dg::predictor_products(ctx_, basis_, mesh_, dt, c, work_);
    }

    // phase 2: corrector -> candidate
    cand_ = sol_.coeff;
    for (int c = 0; c < nc; ++c) {
      if (work_.skipped[c])
        continue;
      dg::corrector_cell(ctx_, basis_, mesh_, bnd_, work_, sol_, c, dt,
                         cand_.data() + static_cast<std::size_t>(c) * sol_.ndof * nvar);
    }

    // previous-solution subcell averages (stored for limited cells, projected
    // otherwise) and their per-cell component bounds for the DMP
    for (int c = 0; c < nc; ++c) {
      double* avg = prev_avg_.data() + static_cast<std::size_t>(c) * sub_.nsub * nvar;
      if (store_.has[c]) {
        const double* src = store_.cell(c);
        std::copy(src, src + static_cast<std::size_t>(sub_.nsub) * nvar, avg);
      } else {
        sub_.project(sol_.cell(c), nvar, scratch_.data(), avg);
      }
      double* mn = prev_min_.data() + static_cast<std::size_t>(c) * nvar;
      double* mx = prev_max_.data() + static_cast<std::size_t>(c) * nvar;
      for (int v = 0; v < nvar; ++v) {
        mn[v] = std::numeric_limits<double>::infinity();
        mx[v] = -std::numeric_limits<double>::infinity();
      }
      for (int j = 0; j < sub_.nsub; ++j)
        for (int v = 0; v < nvar; ++v) {
          const double x = avg[j * nvar + v];
          mn[v] = std::min(mn[v], x);
          mx[v] = std::max(mx[v], x);
        }
    }

    detect(dt, eligible);
    if (flag_hook_)
      flag_hook_(flags_);
    st.troubled = flags_.count;

    if (lim_.enabled && flags_.count > 0)
      apply_limiter(dt);

    sol_.coeff.swap(cand_);
    sol_.time += dt;
    store_.has.swap(nstore_.has);
    store_.avg.swap(nstore_.avg);
    std::fill(nstore_.has.begin(), nstore_.has.end(), 0);
    return st;
  }

  /// March to t_end, clipping the last steps to land exactly; per-step
  /// callback receives the stats.
  void run_until(double t_end, const std::function<void(const StepStats&)>& cb = {}) {
    while (sol_.time < t_end - 1e-12 * std::max(1.0, t_end)) {
      const StepStats st = step(t_end - sol_.time);
      if (cb)
        cb(st);
      if (!(st.dt > 0.0))
        throw std::runtime_error("stepper: vanishing time step");
    }
    sol_.time = t_end;
  }

  /// Domain integral of every conserved component.
  std::vector<double> totals() const {
    const int nvar = ctx_.nvar();
    std::vector<double> tot(nvar, 0.0);
    const double vol = mesh_.cell_volume();
    for (int c = 0; c < mesh_.ncells(); ++c) {
      const double* u = sol_.cell(c);
      for (int s2 = 0; s2 < (mesh_.dim == 2 ? basis_.np : 1); ++s2)
        for (int s1 = 0; s1 < basis_.np; ++s1) {
          const double w =
              (mesh_.dim == 2 ? basis_.weights[s2] : 1.0) * basis_.weights[s1] * vol;
          const double* us = u + (s2 * basis_.np + s1) * nvar;
          for (int v = 0; v < nvar; ++v)
            tot[v] += w * us[v];
        }
    }
    return tot;
  }

private:
  bool cell_violates_alpha_range(const double* coeff, int ndof, int nvar) const {
    for (int s = 0; s < ndof; ++s) {
      const double a = coeff[s * nvar + QA];
      if (!(a > lim_.eps_alpha && a < 1.0 - lim_.eps_alpha))
        return true;
    }
    return false;
  }

  void detect(double dt, const std::vector<std::uint8_t>& eligible) {
    (void)dt;
    const int nc = mesh_.ncells();
    const int nvar = ctx_.nvar();
    flags_.reset(nc);
    for (int c = 0; c < nc; ++c) {
      if (work_.skipped[c] || eligible[c]) {
        flags_.set(c, limiter::TroubleReason::VolumeFractionRange);
        continue;
      }
      const double* u = cand_.data() + static_cast<std::size_t>(c) * sol_.ndof * nvar;
      bool nonfinite = false, positivity = false, range = false;
      auto scan = [&](const double* q, int count, int stride) {
        for (int s = 0; s < count; ++s) {
          const double* qs = q + static_cast<std::size_t>(s) * stride;
          for (int v = 0; v < nvar; ++v)
            if (!std::isfinite(qs[v]))
              nonfinite = true;
          if (!(qs[QR1] > 0.0) || !(qs[QR2] > 0.0))
            positivity = true;
          if (!(qs[QA] > lim_.eps_alpha && qs[QA] < 1.0 - lim_.eps_alpha))
            range = true;
        }
      };
      scan(u, sol_.ndof, nvar);
      double* cavg = cell_avg_.data();
      if (!nonfinite)
        sub_.project(u, nvar, scratch_.data(), cavg);
      else
        std::fill(cell_avg_.begin(), cell_avg_.end(), 0.0);
      scan(cavg, sub_.nsub, nvar);
      if (nonfinite) {
        flags_.set(c, limiter::TroubleReason::NonFinite);
        continue;
      }
      if (positivity) {
        flags_.set(c, limiter::TroubleReason::Positivity);
        continue;
      }
      if (range) {
        flags_.set(c, limiter::TroubleReason::VolumeFractionRange);
        continue;
      }
      if (work_.pred_fail[c]) {
        flags_.set(c, limiter::TroubleReason::PredictorFailure);
        continue;
      }
      // DMP against the Moore neighborhood of the previous solution
      double mn[kMaxVars], mx[kMaxVars];
      neighborhood_bounds(c, mn, mx);
      bool dmp = false;
      for (int v = 0; v < nvar && !dmp; ++v) {
        const double slack = std::max(lim_.delta0, lim_.eps_rel * (mx[v] - mn[v]));
        for (int j = 0; j < sub_.nsub; ++j) {
          const double x = cavg[j * nvar + v];
          if (x < mn[v] - slack || x > mx[v] + slack) {
            dmp = true;
            break;
          }
        }
      }
      if (dmp)
        flags_.set(c, limiter::TroubleReason::Dmp);
    }
  }

  void neighborhood_bounds(int c, double* mn, double* mx) const {
    const int nvar = ctx_.nvar();
    for (int v = 0; v < nvar; ++v) {
      mn[v] = prev_min_[static_cast<std::size_t>(c) * nvar + v];
      mx[v] = prev_max_[static_cast<std::size_t>(c) * nvar + v];
    }
    const int di_lo = -1, di_hi = 1;
    const int dj_lo = mesh_.dim == 2 ? -1 : 0, dj_hi = mesh_.dim == 2 ? 1 : 0;
    for (int dj = dj_lo; dj <= dj_hi; ++dj)
      for (int di = di_lo; di <= di_hi; ++di) {
        if (di == 0 && dj == 0)
          continue;
        int nb = c;
        if (di != 0) {
          nb = grid::neighbor(mesh_, bnd_, nb, 0, di);
          if (nb < 0)
            continue;
        }
        if (dj != 0) {
          nb = grid::neighbor(mesh_, bnd_, nb, 1, dj);
          if (nb < 0)
            continue;
        }
        const double* nmn = prev_min_.data() + static_cast<std::size_t>(nb) * nvar;
        const double* nmx = prev_max_.data() + static_cast<std::size_t>(nb) * nvar;
        for (int v = 0; v < nvar; ++v) {
          mn[v] = std::min(mn[v], nmn[v]);
          mx[v] = std::max(mx[v], nmx[v]);
        }
      }
  }

  const double* previous_averages(int c) const {
    return prev_avg_.data() + static_cast<std::size_t>(c) * sub_.nsub * ctx_.nvar();
  }

  void gather_patch(int c, limiter::Patch& p) const {
    const int nvar = ctx_.nvar();
    const int ns = sub_.nsub1;
    const int ny = mesh_.dim == 2 ? ns : 1;
    p.resize(ns, nvar, mesh_.dim);
    auto copy_sub = [&](const double* avg, int si, int sj, int pi, int pj) {
      const double* src = avg + (static_cast<std::size_t>(sj) * ns + si) * nvar;
      std::copy(src, src + nvar, p.at(pi, pj));
    };
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < ns; ++i)
        copy_sub(previous_averages(c), i, j, i, j);

    // axis strips: neighbor data, or boundary transform of the own column
    for (int axis = 0; axis < mesh_.dim; ++axis)
      for (int side = 0; side < 2; ++side) {
        const int nb = grid::neighbor(mesh_, bnd_, c, axis, side == 0 ? -1 : +1);
        const int nt = axis == 0 ? ny : ns; // tangential count
        for (int layer = 0; layer < 2; ++layer)
          for (int t = 0; t < nt; ++t) {
            int pi, pj;
            if (axis == 0) {
              pi = side == 0 ? -1 - layer : ns + layer;
              pj = t;
            } else {
              pi = t;
              pj = side == 0 ? -1 - layer : ny + layer;
            }
            if (nb >= 0) {
              const int si = axis == 0 ? (side == 0 ? ns - 1 - layer : layer) : t;
              const int sj = axis == 0 ? t : (side == 0 ? ny - 1 - layer : layer);
              copy_sub(previous_averages(nb), si, sj, pi, pj);
            } else {
              const auto kind = bnd_.kind[axis][side];
              int si, sj;
              if (kind == grid::BoundaryKind::Extrapolation) {
                si = axis == 0 ? (side == 0 ? 0 : ns - 1) : t;
                sj = axis == 0 ? t : (side == 0 ? 0 : ny - 1);
              } else { // slip wall mirror
                si = axis == 0 ? (side == 0 ? layer : ns - 1 - layer) : t;
                sj = axis == 0 ? t : (side == 0 ? layer : ny - 1 - layer);
              }
              copy_sub(previous_averages(c), si, sj, pi, pj);
              grid::ghost_state_inplace(p.at(pi, pj), axis, kind);
            }
          }
      }

    if (mesh_.dim != 2)
      return;
    // corners: diagonal neighbor where it exists, else extend the y-strips by
    // the x-boundary rule (or the x-strips by the y-rule)
    for (int sx = 0; sx < 2; ++sx)
      for (int sy = 0; sy < 2; ++sy) {
        const int nbx = grid::neighbor(mesh_, bnd_, c, 0, sx == 0 ? -1 : +1);
        const int nby = grid::neighbor(mesh_, bnd_, c, 1, sy == 0 ? -1 : +1);
        const int diag = nbx >= 0 ? grid::neighbor(mesh_, bnd_, nbx, 1, sy == 0 ? -1 : +1)
                                  : grid::kBoundary;
        for (int lx = 0; lx < 2; ++lx)
          for (int ly = 0; ly < 2; ++ly) {
            const int pi = sx == 0 ? -1 - lx : ns + lx;
            const int pj = sy == 0 ? -1 - ly : ny + ly;
            if (diag >= 0 && nby >= 0) {
              const int si = sx == 0 ? ns - 1 - lx : lx;
              const int sj = sy == 0 ? ny - 1 - ly : ly;
              copy_sub(previous_averages(diag), si, sj, pi, pj);
            } else if (nbx < 0) {
              // x-boundary rule applied to the (already filled) y-strip
              const auto kind = bnd_.kind[0][sx];
              int qi = kind == grid::BoundaryKind::Extrapolation
                           ? (sx == 0 ? 0 : ns - 1)
                           : (sx == 0 ? lx : ns - 1 - lx);
              std::copy(p.at(qi, pj), p.at(qi, pj) + nvar, p.at(pi, pj));
              grid::ghost_state_inplace(p.at(pi, pj), 0, kind);
            } else {
              // y-boundary rule applied to the x-strip
              const auto kind = bnd_.kind[1][sy];
              int qj = kind == grid::BoundaryKind::Extrapolation
                           ? (sy == 0 ? 0 : ny - 1)
                           : (sy == 0 ? ly : ny - 1 - ly);
              std::copy(p.at(pi, qj), p.at(pi, qj) + nvar, p.at(pi, pj));
              grid::ghost_state_inplace(p.at(pi, pj), 1, kind);
            }
          }
      }
  }

  void check_evolved(int c, const double* avg) const {
    const int nvar = ctx_.nvar();
    for (int j = 0; j < sub_.nsub; ++j) {
      const double* q = avg + static_cast<std::size_t>(j) * nvar;
      bool bad = false;
      for (int v = 0; v < nvar; ++v)
        if (!std::isfinite(q[v]))
          bad = true;
      if (ctx_.filter.enabled) {
        const double tol_a = 1e-9;
        if (q[QA] < -tol_a || q[QA] > 1.0 + tol_a)
          bad = true;
        if (q[QR1] < -1e-9 * ctx_.filter.rho0_1 || q[QR2] < -1e-9 * ctx_.filter.rho0_2)
          bad = true;
      } else {
        if (!(q[QA] > 0.0 && q[QA] < 1.0) || !(q[QR1] > 0.0) || !(q[QR2] > 0.0))
          bad = true;
      }
      if (bad)
        throw std::runtime_error("subcell FV fallback produced an inadmissible average in cell " +
                                 std::to_string(c) + " subcell " + std::to_string(j));
    }
  }

  void apply_limiter(double dt) {
    const int nvar = ctx_.nvar();
    const double dsx = mesh_.dx[0] / sub_.nsub1;
    const double dsy = mesh_.dim == 2 ? mesh_.dx[1] / sub_.nsub1 : 1.0;
    limiter::Patch patch;
    limiter::BoundaryFluxes bf;
    std::vector<double> navg(static_cast<std::size_t>(sub_.nsub) * nvar);

    for (int c = 0; c < mesh_.ncells(); ++c) {
      if (!flags_.flagged[c])
        continue;
      gather_patch(c, patch);
      bool need_bf = false;
      for (int a = 0; a < mesh_.dim; ++a)
        for (int s = 0; s < 2; ++s) {
          const int nb = grid::neighbor(mesh_, bnd_, c, a, s == 0 ? -1 : +1);
          if (nb >= 0 && !flags_.flagged[nb])
            need_bf = true;
        }
      limiter::subcell_update(ctx_, patch, dt, dsx, dsy, navg.data(),
                              need_bf ? &bf : nullptr);
      if (ctx_.filter.enabled)
        for (int j = 0; j < sub_.nsub; ++j) {
          double& a = navg[static_cast<std::size_t>(j) * nvar + QA];
          if (a < 0.0 && a > -1e-9)
            a = 0.0;
          if (a > 1.0 && a < 1.0 + 1e-9)
            a = 1.0;
        }
      check_evolved(c, navg.data());
      limiter::reconstruct(sub_, navg.data(), nvar,
                           cand_.data() + static_cast<std::size_t>(c) * sol_.ndof * nvar);
      nstore_.has[c] = 1;
      std::copy(navg.begin(), navg.end(), nstore_.cell(c));
      if (need_bf)
        correct_neighbors(c, dt, bf);
    }
  }

  /// Replace the unlimited neighbor's face integral by the subcell fluxes the
  /// limited cell actually used, keeping the conserved rows telescoping.
  void correct_neighbors(int c, double dt, const limiter::BoundaryFluxes& bf) {
    const int nvar = ctx_.nvar();
    const int np = basis_.np;
    for (int axis = 0; axis < mesh_.dim; ++axis)
      for (int side = 0; side < 2; ++side) {
        const int nb = grid::neighbor(mesh_, bnd_, c, axis, side == 0 ? -1 : +1);
        if (nb < 0 || flags_.flagged[nb] || work_.skipped[nb])
          continue;
        const int nb_side = 1 - side;
        double old_int[dg::kMaxNodes * dg::kMaxNodes * kMaxVars] = {0.0};
        dg::accumulate_face_integral(ctx_, basis_, mesh_, bnd_, work_, nb, axis, nb_side, dt,
                                     old_int);
        // new integral: piecewise-constant subface fluxes at the half-time
        // level; the neighbor sits on the minus side of the face when
        // side == 0 (the troubled cell is its plus-side neighbor)
        const double sgn = nb_side == 1 ? 1.0 : -1.0;
        const double* endv = nb_side == 0 ? basis_.end0.data() : basis_.end1.data();
        const double tang_meas = mesh_.dim == 2 ? mesh_.dx[1 - axis] : 1.0;
        const auto& fl = bf.face[2 * axis + side];
        double new_int[dg::kMaxNodes * dg::kMaxNodes * kMaxVars] = {0.0};
        const int ntang = mesh_.dim == 2 ? sub_.nsub1 : 1;
        for (int j = 0; j < ntang; ++j) {
          const dg::FaceFlux& ff = fl[j];
          for (int kt = 0; kt < (mesh_.dim == 2 ? np : 1); ++kt) {
            const double mom = mesh_.dim == 2 ? sub_.submoment1(j, kt) : 1.0;
            for (int m = 0; m < np; ++m) {
              const int k = axis == 0 ? (mesh_.dim == 2 ? kt * np + m : m) : m * np + kt;
              const double wphi = endv[m] * mom * tang_meas * dt;
              double* ni = new_int + static_cast<std::size_t>(k) * nvar;
              for (int v = 0; v < nvar; ++v)
                ni[v] += wphi * (sgn * ff.G[v] + ff.D[v]);
            }
          }
        }
        double* out = cand_.data() + static_cast<std::size_t>(nb) * sol_.ndof * nvar;
        const double vol = mesh_.cell_volume();
        for (int s2 = 0; s2 < (mesh_.dim == 2 ? np : 1); ++s2)
          for (int s1 = 0; s1 < np; ++s1) {
            const int k = s2 * np + s1;
            const double mass =
                (mesh_.dim == 2 ? basis_.weights[s2] : 1.0) * basis_.weights[s1] * vol;
            for (int v = 0; v < nvar; ++v)
              out[k * nvar + v] += (old_int[static_cast<std::size_t>(k) * nvar + v] -
                                    new_int[static_cast<std::size_t>(k) * nvar + v]) /
                                   mass;
          }
      }
  }

  ModelContext ctx_;
  grid::Mesh mesh_;
  grid::Boundaries bnd_;
  double cfl_;
  limiter::LimiterParams lim_;
  dg::NodalBasis basis_;
  dg::SubcellOps sub_;
  dg::DgSolution sol_;
  dg::StepWorkspace work_;
  limiter::SubcellStore store_, nstore_;
  limiter::TroubleFlags flags_;
  std::vector<double> cand_;
  std::vector<double> prev_avg_, prev_min_, prev_max_;
  std::vector<double> scratch_, cell_avg_;
  std::function<void(limiter::TroubleFlags&)> flag_hook_;
};

} // namespace tpdg
