#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "tpdg/limiter.hpp"
#include "tpdg/norms.hpp"
#include "tpdg/refsol.hpp"

namespace tpdg::harness {

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open output file: " + path);
  return out;
}

inline void csv_row(std::ostream& out, double x, const model::PointState& s) {
  out << fmt(x) << ',' << fmt(s.alpha1) << ',' << fmt(s.rho1) << ',' << fmt(s.rho2) << ','
      << fmt(s.u1[0]) << ',' << fmt(s.u2[0]) << ',' << fmt(s.rho) << ',' << fmt(s.u[0]) << ','
      << fmt(s.w[0]) << '\n';
}

} // namespace detail

/// Cell-center profile as CSV: all cells in 1D, the y~0 row in 2D.
inline void write_csv(const std::string& path, const ModelContext& ctx,
                      const dg::DgSolution& sol, const dg::NodalBasis& b,
                      const std::string& case_name) {
  auto out = detail::open_out(path);
  out << "# case=" << case_name << " time=" << detail::fmt(sol.time) << " mesh=" << sol.mesh.n[0];
  if (sol.mesh.dim == 2)
    out << "x" << sol.mesh.n[1];
  out << "\n";
  out << "x,alpha1,rho1,rho2,u1,u2,rho,u,w\n";
  int j = 0;
  if (sol.mesh.dim == 2) {
    // row of cells whose centers straddle y = 0 (or the domain mid-height)
    const double ymid = sol.mesh.min[1] >= 0.0 ? 0.5 * (sol.mesh.min[1] + sol.mesh.max[1]) : 0.0;
    j = std::min(sol.mesh.n[1] - 1,
                 std::max(0, static_cast<int>((ymid - sol.mesh.min[1]) / sol.mesh.dx[1])));
  }
  for (int i = 0; i < sol.mesh.n[0]; ++i) {
    const int c = sol.mesh.index(i, j);
    const StateVec q = sol.evaluate(b, c, 0.5, 0.5);
    detail::csv_row(out, sol.mesh.center(0, i), model::decompose_raw(ctx, q.data()));
  }
}

inline void write_profile_csv(const std::string& path, const refsol::Profile1d& prof,
                              const std::string& case_name) {
  auto out = detail::open_out(path);
  out << "# case=" << case_name << " time=" << detail::fmt(prof.time)
      << " mesh=" << prof.x.size() << " d=" << prof.d << "\n";
  out << "r,alpha1,rho1,rho2,u1,u2,rho,u,w\n";
  for (std::size_t i = 0; i < prof.x.size(); ++i) {
    const Primitive& p = prof.state[i];
    const double ar1 = p.alpha1 * p.rho1, ar2 = (1.0 - p.alpha1) * p.rho2;
    const double rho = ar1 + ar2;
    const double u = (ar1 * p.u1[0] + ar2 * p.u2[0]) / rho;
    out << detail::fmt(prof.x[i]) << ',' << detail::fmt(p.alpha1) << ',' << detail::fmt(p.rho1)
        << ',' << detail::fmt(p.rho2) << ',' << detail::fmt(p.u1[0]) << ','
        << detail::fmt(p.u2[0]) << ',' << detail::fmt(rho) << ',' << detail::fmt(u) << ','
        << detail::fmt(p.u1[0] - p.u2[0]) << '\n';
  }
}

/// Legacy VTK structured points with per-cell primitive fields and the
/// limiter flag.
inline void write_vtk(const std::string& path, const ModelContext& ctx,
                      const dg::DgSolution& sol, const dg::NodalBasis& b,
                      const limiter::TroubleFlags* flags = nullptr) {
  auto out = detail::open_out(path);
  const auto& m = sol.mesh;
  out << "# vtk DataFile Version 3.0\n";
  out << "tpdg solution t=" << detail::fmt(sol.time) << "\n";
  out << "ASCII\n";
  out << "DATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << m.n[0] + 1 << " " << (m.dim == 2 ? m.n[1] + 1 : 1) << " 1\n";
  out << "ORIGIN " << detail::fmt(m.min[0]) << " " << detail::fmt(m.dim == 2 ? m.min[1] : 0.0)
      << " 0\n";
  out << "SPACING " << detail::fmt(m.dx[0]) << " " << detail::fmt(m.dim == 2 ? m.dx[1] : 1.0)
      << " 1\n";
  out << "CELL_DATA " << m.ncells() << "\n";

  const int nfields = 10;
  const char* names[nfields] = {"alpha1", "rho1", "rho2", "u1x", "u1y",
                                "u2x",    "u2y",  "rho",  "p",   "limiter"};
  for (int f = 0; f < nfields; ++f) {
    out << "SCALARS " << names[f] << " double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < m.ncells(); ++c) {
      const StateVec q = sol.evaluate(b, c, 0.5, 0.5);
      const model::PointState s = model::decompose_raw(ctx, q.data());
      double val = 0.0;
      switch (f) {
      case 0: val = s.alpha1; break;
      case 1: val = s.rho1; break;
      case 2: val = s.rho2; break;
      case 3: val = s.u1[0]; break;
      case 4: val = s.u1[1]; break;
      case 5: val = s.u2[0]; break;
      case 6: val = s.u2[1]; break;
      case 7: val = s.rho; break;
      case 8: val = s.p; break;
      case 9: val = flags && flags->flagged.size() == static_cast<std::size_t>(m.ncells())
                        ? static_cast<double>(flags->flagged[c])
                        : 0.0; break;
      }
      out << detail::fmt(val) << "\n";
    }
  }
}

/// Per-cell limiter activation map (0/1 plus reason code) as CSV.
inline void write_limiter_map(const std::string& path, const grid::Mesh& mesh,
                              const limiter::TroubleFlags& flags) {
  auto out = detail::open_out(path);
  out << "i,j,flag,reason\n";
  for (int c = 0; c < mesh.ncells(); ++c)
    out << mesh.ci(c) << ',' << mesh.cj(c) << ',' << int(flags.flagged[c]) << ','
        << int(flags.reason[c]) << '\n';
}

} // namespace tpdg::harness
