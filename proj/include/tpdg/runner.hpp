#pragma once

#include <iostream>
#include <random>

#include "tpdg/cases.hpp"
#include "tpdg/hyperbolicity.hpp"
#include "tpdg/io.hpp"

namespace tpdg::harness {

struct RunResult {
  int steps = 0;
  int troubled_total = 0;
  double final_time = 0.0;
};

inline std::unique_ptr<Stepper> make_stepper(RunConfig cfg) {
  auto ic = initial_condition(cfg);
  const dg::NodalBasis b = dg::build_basis(cfg.order);
  dg::DgSolution sol = dg::project_initial(cfg.ctx, cfg.mesh, b, ic);
  if (cfg.ctx.variant.is_glm() && !(cfg.ctx.variant.a_psi > 0.0))
    cfg.ctx.variant.a_psi = cfg.a_psi.value_or(default_a_psi(cfg, sol));
  auto st = std::make_unique<Stepper>(cfg.ctx, cfg.mesh, cfg.boundaries, cfg.order, cfg.cfl,
                                      cfg.limiter);
  st->set_solution(std::move(sol));
  return st;
}

/// Simulate the configured case and write the outputs
/// (<prefix>.csv, <prefix>.vtk, <prefix>_limiter.csv).
inline RunResult run_simulation(const RunConfig& cfg, std::ostream* log = nullptr) {
  auto st = make_stepper(cfg);
  RunResult res;
  double next_out = cfg.output_every > 0.0 ? cfg.output_every : cfg.t_end + 1.0;
  int out_idx = 0;
  const std::string base = cfg.output_dir + "/" + cfg.output_prefix;
  while (st->solution().time < cfg.t_end - 1e-12 * std::max(1.0, cfg.t_end)) {
    const double cap = std::min(cfg.t_end, next_out) - st->solution().time;
    const StepStats s = st->step(cap);
    ++res.steps;
    res.troubled_total += s.troubled;
    if (log && res.steps % 50 == 0)
      *log << "step " << res.steps << " t=" << st->solution().time << " dt=" << s.dt
           << " troubled=" << s.troubled << "\n";
    if (cfg.output_every > 0.0 && st->solution().time >= next_out - 1e-12) {
      ++out_idx;
      write_csv(base + "_" + std::to_string(out_idx) + ".csv", st->context(), st->solution(),
                st->basis(), cfg.case_name());
      next_out += cfg.output_every;
    }
  }
  res.final_time = st->solution().time;
  write_csv(base + ".csv", st->context(), st->solution(), st->basis(), cfg.case_name());
  if (cfg.write_vtk)
    write_vtk(base + ".vtk", st->context(), st->solution(), st->basis(), &st->last_flags());
  write_limiter_map(base + "_limiter.csv", cfg.mesh, st->last_flags());
  return res;
}

// ---------------------------------------------------------------------------
// convergence driver
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  int cells = 0;
  ErrorReport err;
};

inline std::vector<ConvergenceRow> convergence_study(const RunConfig& base,
                                                     const std::vector<int>& meshes,
                                                     std::ostream* log = nullptr) {
  std::vector<ConvergenceRow> rows;
  for (int nc : meshes) {
    RunConfig cfg = base;
    cfg.mesh = grid::Mesh::make(2, base.mesh.min, base.mesh.max, {nc, nc});
    auto st = make_stepper(cfg);
    st->run_until(cfg.t_end);
    ConvergenceRow row;
    row.cells = nc;
    row.err = l2_error(cfg.ctx, st->solution(), st->basis(), exact_solution(cfg, cfg.t_end));
    rows.push_back(row);
    if (log)
      *log << "mesh " << nc << "^2 done, L2(alpha1)=" << row.err.l2[0] << "\n";
  }
  return rows;
}

inline void print_convergence_table(const std::vector<ConvergenceRow>& rows,
                                    std::ostream& out) {
  out << "cells";
  for (const char* n : ErrorReport::names)
    out << ",L2(" << n << ")";
  out << "\n";
  for (const auto& r : rows) {
    out << r.cells;
    for (double e : r.err.l2)
      out << "," << detail::fmt(e);
    out << "\n";
  }
  out << "EOC\n";
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out << rows[i].cells;
    for (int k = 0; k < 5; ++k)
      out << ","
          << detail::fmt(ErrorReport::eoc(rows[i - 1].err.l2[k], rows[i].err.l2[k],
                                          rows[i - 1].err.h, rows[i].err.h));
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// hyperbolicity sampling driver
// ---------------------------------------------------------------------------

struct EigencheckSummary {
  int samples = 0;
  int strong = 0, weak = 0, nonhyp = 0;
  int rank_min = 0, rank_max = 0;
  double max_eig_mismatch = 0.0;
};

/// Random admissible primitive state; dim=2 zeroes the z-components. Guarded
/// away from the degeneracies (|a1-a2|, Z_j, normal and transverse w).
inline Primitive sample_admissible_state(std::mt19937_64& rng, const ModelContext& ctx,
                                         int dim) {
  std::uniform_real_distribution<double> ua(0.15, 0.85), ur(0.4, 2.5), uv(-1.0, 1.0);
  for (;;) {
    Primitive v;
    v.alpha1 = ua(rng);
    v.rho1 = ur(rng);
    v.rho2 = ur(rng);
    for (int i = 0; i < 3; ++i) {
      v.u1[i] = uv(rng);
      v.u2[i] = uv(rng);
      if (ctx.variant.is_glm())
        v.psi[i] = 0.5 * uv(rng);
    }
    if (dim == 2) {
      v.u1[2] = v.u2[2] = 0.0;
      if (ctx.variant.is_glm())
        v.psi[0] = v.psi[1] = 0.0;
    }
    const double a1 = eos::sound_speed(ctx.eos1, v.rho1);
    const double a2 = eos::sound_speed(ctx.eos2, v.rho2);
    if (std::abs(a1 - a2) < 0.01)
      continue;
    Vec3 w{};
    const double ar1 = v.alpha1 * v.rho1, ar2 = (1.0 - v.alpha1) * v.rho2;
    const double c1 = ar1 / (ar1 + ar2), c2 = 1.0 - c1;
    double wt = 0.0;
    for (int i = 0; i < 3; ++i)
      w[i] = v.u1[i] - v.u2[i];
    wt = std::hypot(w[1], w[2]);
    if (std::abs(w[0]) < 0.05 || wt < 0.05)
      continue;
    const double z1 = a1 * a1 - c2 * c2 * w[0] * w[0];
    const double z2 = a2 * a2 - c1 * c1 * w[0] * w[0];
    if (std::abs(z1) < 1e-6 * a1 * a1 || std::abs(z2) < 1e-6 * a2 * a2)
      continue;
    return v;
  }
}

/// Sample random states, decompose, and stream one CSV row each; returns the
/// classification tally.
inline EigencheckSummary eigencheck(const ModelContext& ctx, int samples, int dim,
                                    std::uint64_t seed, std::ostream& out) {
  std::mt19937_64 rng(seed);
  EigencheckSummary sum;
  sum.rank_min = ctx.nvar();
  out << "sample,alpha1,rho1,rho2,w_n,max_imag,eigvec_rank,classification\n";
  for (int s = 0; s < samples; ++s) {
    const Primitive v = sample_admissible_state(rng, ctx, dim);
    const auto C = hyperbolicity::quasilinear_matrix(ctx, v, 0);
    const auto rep = hyperbolicity::eigen_decompose(C);
    const auto analytic = hyperbolicity::eigenvalues_analytic(ctx, v, 0);
    double scale = 1.0, mism = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i)
      scale = std::max(scale, std::abs(analytic[i]));
    for (std::size_t i = 0; i < analytic.size(); ++i)
      mism = std::max(mism, std::abs(analytic[i] - rep.eigenvalues[i]));
    sum.max_eig_mismatch = std::max(sum.max_eig_mismatch, mism / scale);
    ++sum.samples;
    sum.rank_min = std::min(sum.rank_min, rep.eigvec_rank);
    sum.rank_max = std::max(sum.rank_max, rep.eigvec_rank);
    const char* cls = "nonhyperbolic";
    if (rep.classification == hyperbolicity::Classification::Strong) {
      cls = "strong";
      ++sum.strong;
    } else if (rep.classification == hyperbolicity::Classification::Weak) {
      cls = "weak";
      ++sum.weak;
    } else {
      ++sum.nonhyp;
    }
    out << s << ',' << detail::fmt(v.alpha1) << ',' << detail::fmt(v.rho1) << ','
        << detail::fmt(v.rho2) << ',' << detail::fmt(v.u1[0] - v.u2[0]) << ','
        << detail::fmt(rep.max_imag) << ',' << rep.eigvec_rank << ',' << cls << '\n';
  }
  return sum;
}

// ---------------------------------------------------------------------------
// reference-solution driver
// ---------------------------------------------------------------------------

inline refsol::Profile1d reference_profile(const RunConfig& cfg, int cells = 0) {
  switch (cfg.tag) {
  case CaseTag::Rp1:
    return refsol::solve_reference_1d(cfg.ctx, rp1_left(), rp1_right(), cfg.mesh.min[0],
                                      cfg.mesh.max[0], cfg.t_end, cells > 0 ? cells : 16000);
  case CaseTag::Ce1:
  case CaseTag::Ce2:
    return refsol::solve_reference_radial(cfg.ctx, ce_inner(cfg.tag), ce_outer(cfg.tag), 0.5,
                                          std::sqrt(2.0), cfg.t_end, cells > 0 ? cells : 4000,
                                          /*d=*/1);
  case CaseTag::Custom:
    if (cfg.custom_radial > 0.0)
      return refsol::solve_reference_radial(cfg.ctx, cfg.custom_left, cfg.custom_right,
                                            cfg.custom_radial, std::sqrt(2.0), cfg.t_end,
                                            cells > 0 ? cells : 4000, 1);
    return refsol::solve_reference_1d(cfg.ctx, cfg.custom_left, cfg.custom_right,
                                      cfg.mesh.min[0], cfg.mesh.max[0], cfg.t_end,
                                      cells > 0 ? cells : 16000);
  default:
    throw ConfigError("no reference profile for case " + cfg.case_name());
  }
}

} // namespace tpdg::harness
