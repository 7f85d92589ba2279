#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tpdg/dg.hpp"

namespace tpdg::harness {

/// L2 norms of the primitive-variable error (alpha1, rho1, rho2, u1, u2; the
/// velocity entries are vector-magnitude errors), by cell quadrature at the
/// solution's own nodes.
struct ErrorReport {
  static constexpr std::array<const char*, 5> names = {"alpha1", "rho1", "rho2", "u1", "u2"};
  std::array<double, 5> l2{};
  double h = 0.0;

  static double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine) {
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
  }
};

using ExactFunction = std::function<StateVec(double, double)>;

inline ErrorReport l2_error(const ModelContext& ctx, const dg::DgSolution& sol,
                            const dg::NodalBasis& b, const ExactFunction& exact) {
  ErrorReport rep;
  rep.h = sol.mesh.dx[0];
  std::array<double, 5> acc{};
  const double vol = sol.mesh.cell_volume();
  for (int c = 0; c < sol.mesh.ncells(); ++c) {
    const int ci = sol.mesh.ci(c), cj = sol.mesh.cj(c);
    const double* u = sol.cell(c);
    for (int s2 = 0; s2 < (sol.mesh.dim == 2 ? b.np : 1); ++s2)
      for (int s1 = 0; s1 < b.np; ++s1) {
        const double x = sol.mesh.min[0] + (ci + b.nodes[s1]) * sol.mesh.dx[0];
        const double y =
            sol.mesh.dim == 2 ? sol.mesh.min[1] + (cj + b.nodes[s2]) * sol.mesh.dx[1] : 0.0;
        const double w = (sol.mesh.dim == 2 ? b.weights[s2] : 1.0) * b.weights[s1] * vol;
        const double* q = u + (s2 * b.np + s1) * sol.nvar;
        const model::PointState num = model::decompose_raw(ctx, q);
        const StateVec qe = exact(x, y);
        const model::PointState ref = model::decompose_raw(ctx, qe.data());
        acc[0] += w * (num.alpha1 - ref.alpha1) * (num.alpha1 - ref.alpha1);
        acc[1] += w * (num.rho1 - ref.rho1) * (num.rho1 - ref.rho1);
        acc[2] += w * (num.rho2 - ref.rho2) * (num.rho2 - ref.rho2);
        for (int i = 0; i < 3; ++i) {
          acc[3] += w * (num.u1[i] - ref.u1[i]) * (num.u1[i] - ref.u1[i]);
          acc[4] += w * (num.u2[i] - ref.u2[i]) * (num.u2[i] - ref.u2[i]);
        }
      }
  }
  for (int k = 0; k < 5; ++k)
    rep.l2[k] = std::sqrt(acc[k]);
  return rep;
}

} // namespace tpdg::harness
