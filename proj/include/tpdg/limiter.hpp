#pragma once

#include <cstdint>
#include <vector>

#include "tpdg/dg.hpp"

namespace tpdg::limiter {

enum class TroubleReason : std::uint8_t {
  None = 0,
  Dmp,
  Positivity,
  VolumeFractionRange,
  PredictorFailure,
  NonFinite
};

struct TroubleFlags {
  std::vector<std::uint8_t> flagged;
  std::vector<TroubleReason> reason;
  int count = 0;

  void reset(int ncells) {
    flagged.assign(ncells, 0);
    reason.assign(ncells, TroubleReason::None);
    count = 0;
  }
  void set(int c, TroubleReason r) {
    if (!flagged[c]) {
      flagged[c] = 1;
      reason[c] = r;
      ++count;
    }
  }
};

struct LimiterParams {
  bool enabled = true;
  double delta0 = 1e-4;   // DMP absolute slack
  double eps_rel = 1e-3;  // DMP relative slack
  double eps_alpha = 1e-7;
};

/// Per-cell subcell averages kept in memory for cells that were limited; they
/// are the valid t^n data for the next step's finite volume fallback.
struct SubcellStore {
  int nsub = 0, nvar = 0;
  std::vector<std::uint8_t> has;
  std::vector<double> avg; // [cell][sub][var]

  void reset(int ncells, int nsub_, int nvar_) {
    nsub = nsub_;
    nvar = nvar_;
    has.assign(ncells, 0);
    avg.assign(static_cast<std::size_t>(ncells) * nsub * nvar, 0.0);
  }
  double* cell(int c) { return avg.data() + static_cast<std::size_t>(c) * nsub * nvar; }
  const double* cell(int c) const {
    return avg.data() + static_cast<std::size_t>(c) * nsub * nvar;
  }
};

/// Exact subcell averages of a cell polynomial (linear map, precomputed).
inline void project_to_subcells(const dg::SubcellOps& ops, const double* coeff, int nvar,
                                double* avg) {
  for (int j = 0; j < ops.nsub; ++j) {
    double* out = avg + static_cast<std::size_t>(j) * nvar;
    for (int v = 0; v < nvar; ++v)
      out[v] = 0.0;
    for (int m = 0; m < ops.ndof; ++m) {
      const double p = ops.proj(j, m);
      const double* um = coeff + static_cast<std::size_t>(m) * nvar;
      for (int v = 0; v < nvar; ++v)
        out[v] += p * um[v];
    }
  }
}

/// Constrained least-squares reconstruction of the cell polynomial from the
/// subcell averages; the cell integral of the result matches the averages sum
/// exactly.
inline void reconstruct(const dg::SubcellOps& ops, const double* avg, int nvar,
                        double* coeff) {
  for (int m = 0; m < ops.ndof; ++m) {
    double* out = coeff + static_cast<std::size_t>(m) * nvar;
    for (int v = 0; v < nvar; ++v)
      out[v] = 0.0;
    for (int j = 0; j < ops.nsub; ++j) {
      const double r = ops.recon(m, j);
      const double* aj = avg + static_cast<std::size_t>(j) * nvar;
      for (int v = 0; v < nvar; ++v)
        out[v] += r * aj[v];
    }
  }
}

inline double minmod(double a, double b) {
  if (a > 0.0 && b > 0.0)
    return std::min(a, b);
  if (a < 0.0 && b < 0.0)
    return std::max(a, b);
  return 0.0;
}

/// Padded patch of subcell averages: interior (2N+1)^d plus two ghost layers
/// per side, addressed with indices in [-2, nsub1+2).
struct Patch {
  int nsub1 = 0, nvar = 0, dim = 1, w = 0;
  std::vector<double> data;

  void resize(int nsub1_, int nvar_, int dim_) {
    nsub1 = nsub1_;
    nvar = nvar_;
    dim = dim_;
    w = nsub1 + 4;
    data.assign(static_cast<std::size_t>(w) * (dim == 2 ? w : 1) * nvar, 0.0);
  }
  double* at(int i, int j) {
    return data.data() + (static_cast<std::size_t>(dim == 2 ? (j + 2) * w : 0) + i + 2) * nvar;
  }
  const double* at(int i, int j) const {
    return data.data() + (static_cast<std::size_t>(dim == 2 ? (j + 2) * w : 0) + i + 2) * nvar;
  }
};

/// Subface fluxes on one cell boundary, canonical orientation (G,D with qm on
/// the axis-minus side), one entry per tangential subcell, at the half-time
/// level.
struct BoundaryFluxes {
  std::vector<dg::FaceFlux> face[4]; // face id = 2*axis + side
};

namespace detail {

inline void half_step(const ModelContext& ctx, const double* u, const double* sx,
                      const double* sy, double dt, double dsx, double dsy, int dim,
                      double* out) {
  const int n = ctx.nvar();
  StateVec ql{}, qr{}, fl{}, fr{}, bn{}, src{};
  StateVec gx{}, gy{}, gz{};
  const model::PointState ps = model::decompose_raw(ctx, u);
  for (int v = 0; v < n; ++v) {
    gx[v] = sx[v] / dsx;
    gy[v] = dim == 2 ? sy[v] / dsy : 0.0;
  }
  const double* grad[3] = {gx.data(), gy.data(), gz.data()};
  model::noncons_point(ctx, ps, grad, bn.data());
  for (int v = 0; v < n; ++v)
    out[v] = u[v] - 0.5 * dt * bn[v];
  for (int a = 0; a < dim; ++a) {
    const double* s = a == 0 ? sx : sy;
    const double ds = a == 0 ? dsx : dsy;
    for (int v = 0; v < n; ++v) {
      ql[v] = u[v] - 0.5 * s[v];
      qr[v] = u[v] + 0.5 * s[v];
    }
    model::flux_point(ctx, model::decompose_raw(ctx, ql.data()), a, fl.data());
    model::flux_point(ctx, model::decompose_raw(ctx, qr.data()), a, fr.data());
    for (int v = 0; v < n; ++v)
      out[v] -= 0.5 * dt * (fr[v] - fl[v]) / ds;
  }
  if (ctx.sources.has_gravity()) {
    model::source_point(ctx, ps, src.data());
    for (int v = 0; v < n; ++v)
      out[v] += 0.5 * dt * src[v];
  }
}

} // namespace detail

/// Second-order MUSCL-Hancock update of the subcell averages of one cell.
/// The patch supplies depth-2 neighbor data; slopes use minmod on conserved
/// variables, faces get Rusanov plus straight-line path terms, the interior
/// non-conservative term is evaluated pointwise from the slopes.
/// Boundary subface fluxes are returned for the conservative coupling with
/// unlimited DG neighbors.
inline void subcell_update(const ModelContext& ctx, const Patch& patch, double dt, double dsx,
                           double dsy, double* out_avg, BoundaryFluxes* bf = nullptr) {
  const int n = ctx.nvar();
  const int ns = patch.nsub1;
  const int dim = patch.dim;
  const int ny = dim == 2 ? ns : 1;

  // slopes and half-step states on [-1, ns] x [-1, ny]
  const int span = ns + 2;
  const int spany = dim == 2 ? ny + 2 : 1;
  std::vector<double> sx(static_cast<std::size_t>(span) * spany * n, 0.0);
  std::vector<double> sy(static_cast<std::size_t>(span) * spany * n, 0.0);
  std::vector<double> ustar(static_cast<std::size_t>(span) * spany * n, 0.0);
  auto id = [&](int i, int j) { return (static_cast<std::size_t>(dim == 2 ? (j + 1) * span : 0) + i + 1) * n; };

  for (int j = (dim == 2 ? -1 : 0); j < (dim == 2 ? ny + 1 : 1); ++j)
    for (int i = -1; i <= ns; ++i) {
      const double* um = patch.at(i - 1, j);
      const double* uc = patch.at(i, j);
      const double* up = patch.at(i + 1, j);
      double* s = sx.data() + id(i, j);
      for (int v = 0; v < n; ++v)
        s[v] = minmod(uc[v] - um[v], up[v] - uc[v]);
      if (dim == 2) {
        const double* vm = patch.at(i, j - 1);
        const double* vp = patch.at(i, j + 1);
        double* t = sy.data() + id(i, j);
        for (int v = 0; v < n; ++v)
          t[v] = minmod(uc[v] - vm[v], vp[v] - uc[v]);
      }
      detail::half_step(ctx, uc, s, sy.data() + id(i, j), dt, dsx, dsy, dim,
                        ustar.data() + id(i, j));
    }

  // accumulate face fluxes into the interior updates
  std::vector<double> acc(static_cast<std::size_t>(ns) * ny * n, 0.0);
  auto aid = [&](int i, int j) { return (static_cast<std::size_t>(j) * ns + i) * n; };
  StateVec qm{}, qp{};
  dg::FaceFlux ff;
  if (bf) {
    bf->face[0].assign(ny, {});
    bf->face[1].assign(ny, {});
    bf->face[2].assign(dim == 2 ? ns : 0, {});
    bf->face[3].assign(dim == 2 ? ns : 0, {});
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= ns; ++i) { // x-faces between (i-1,j) and (i,j)
      const double* ul = ustar.data() + id(i - 1, j);
      const double* sl = sx.data() + id(i - 1, j);
      const double* ur = ustar.data() + id(i, j);
      const double* sr = sx.data() + id(i, j);
      for (int v = 0; v < n; ++v) {
        qm[v] = ul[v] + 0.5 * sl[v];
        qp[v] = ur[v] - 0.5 * sr[v];
      }
      dg::face_flux_point(ctx, qm.data(), qp.data(), 0, ff);
      const double f = dt / dsx;
      if (i > 0) { // cell (i-1,j): minus side, integrand (G+D)
        double* a = acc.data() + aid(i - 1, j);
        for (int v = 0; v < n; ++v)
          a[v] -= f * (ff.G[v] + ff.D[v]);
      }
      if (i < ns) { // cell (i,j): plus side, integrand (-G+D)
        double* a = acc.data() + aid(i, j);
        for (int v = 0; v < n; ++v)
          a[v] += f * (ff.G[v] - ff.D[v]);
      }
      if (bf && i == 0)
        bf->face[0][j] = ff;
      if (bf && i == ns)
        bf->face[1][j] = ff;
    }
  if (dim == 2)
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j <= ny; ++j) { // y-faces between (i,j-1) and (i,j)
        const double* ul = ustar.data() + id(i, j - 1);
        const double* sl = sy.data() + id(i, j - 1);
        const double* ur = ustar.data() + id(i, j);
        const double* sr = sy.data() + id(i, j);
        for (int v = 0; v < n; ++v) {
          qm[v] = ul[v] + 0.5 * sl[v];
          qp[v] = ur[v] - 0.5 * sr[v];
        }
        dg::face_flux_point(ctx, qm.data(), qp.data(), 1, ff);
        const double f = dt / dsy;
        if (j > 0) {
          double* a = acc.data() + aid(i, j - 1);
          for (int v = 0; v < n; ++v)
            a[v] -= f * (ff.G[v] + ff.D[v]);
        }
        if (j < ny) {
          double* a = acc.data() + aid(i, j);
          for (int v = 0; v < n; ++v)
            a[v] += f * (ff.G[v] - ff.D[v]);
        }
        if (bf && j == 0)
          bf->face[2][i] = ff;
        if (bf && j == ny)
          bf->face[3][i] = ff;
      }

  // interior non-conservative term from the slopes plus sources, evaluated at
  // the half-step state
  StateVec gx{}, gy{}, gz{}, bn{}, src{};
  const double* grad[3] = {gx.data(), gy.data(), gz.data()};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < ns; ++i) {
      const double* us = ustar.data() + id(i, j);
      const double* sxi = sx.data() + id(i, j);
      const double* syi = sy.data() + id(i, j);
      for (int v = 0; v < n; ++v) {
        gx[v] = sxi[v] / dsx;
        gy[v] = dim == 2 ? syi[v] / dsy : 0.0;
      }
      const model::PointState ps = model::decompose_raw(ctx, us);
      model::noncons_point(ctx, ps, grad, bn.data());
      double* o = out_avg + aid(i, j);
      const double* u0 = patch.at(i, j);
      double* a = acc.data() + aid(i, j);
      for (int v = 0; v < n; ++v)
        o[v] = u0[v] + a[v] - dt * bn[v];
      if (ctx.sources.has_gravity()) {
        model::source_point(ctx, ps, src.data());
        for (int v = 0; v < n; ++v)
          o[v] += dt * src[v];
      }
    }
}

} // namespace tpdg::limiter
