#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "tpdg/state.hpp"

namespace tpdg::grid {

/// Uniform Cartesian mesh, 1D or 2D. Cell (i,j) spans
/// [min + i dx, min + (i+1) dx] x [...] with barycenter min + (i+1/2) dx.
struct Mesh {
  int dim = 1;
  std::array<double, 2> min{0.0, 0.0};
  std::array<double, 2> max{1.0, 1.0};
  std::array<int, 2> n{1, 1};
  std::array<double, 2> dx{1.0, 1.0};

  static Mesh make(int dim, std::array<double, 2> lo, std::array<double, 2> hi,
                   std::array<int, 2> cells) {
    if (dim != 1 && dim != 2)
      throw std::invalid_argument("mesh: only 1D and 2D supported, got dim=" +
                                  std::to_string(dim));
    Mesh m;
    m.dim = dim;
    m.min = lo;
    m.max = hi;
    m.n = cells;
    if (dim == 1) {
      m.n[1] = 1;
      m.min[1] = 0.0;
      m.max[1] = 1.0;
    }
    for (int a = 0; a < 2; ++a) {
      if (m.n[a] < 1 || !(m.max[a] > m.min[a]))
        throw std::invalid_argument("mesh: bad extents/counts on axis " + std::to_string(a));
      m.dx[a] = (m.max[a] - m.min[a]) / m.n[a];
    }
    return m;
  }

  int ncells() const { return n[0] * n[1]; }
  int index(int i, int j) const { return j * n[0] + i; }
  int ci(int cell) const { return cell % n[0]; }
  int cj(int cell) const { return cell / n[0]; }
  double center(int axis, int idx) const { return min[axis] + (idx + 0.5) * dx[axis]; }
  double cell_volume() const { return dim == 2 ? dx[0] * dx[1] : dx[0]; }
};

enum class BoundaryKind { Periodic, SlipWall, Extrapolation };

struct Boundaries {
  // [axis][side], side 0 = min, 1 = max
  std::array<std::array<BoundaryKind, 2>, 2> kind{
      {{BoundaryKind::Periodic, BoundaryKind::Periodic},
       {BoundaryKind::Periodic, BoundaryKind::Periodic}}};

  static Boundaries all(BoundaryKind k) {
    Boundaries b;
    b.kind = {{{k, k}, {k, k}}};
    return b;
  }
  void validate() const {
    for (int a = 0; a < 2; ++a) {
      const bool p0 = kind[a][0] == BoundaryKind::Periodic;
      const bool p1 = kind[a][1] == BoundaryKind::Periodic;
      if (p0 != p1)
        throw std::invalid_argument("boundaries: periodic sides must match on axis " +
                                    std::to_string(a));
    }
  }
};

inline constexpr int kBoundary = -1;

/// Lattice neighbor along `axis` in direction `step` (+1/-1). Periodic sides
/// wrap; other kinds return kBoundary past the edge.
inline int neighbor(const Mesh& m, const Boundaries& b, int cell, int axis, int step) {
  if (cell < 0 || cell >= m.ncells())
    throw std::out_of_range("neighbor: cell id out of range");
  int ij[2] = {m.ci(cell), m.cj(cell)};
  ij[axis] += step;
  if (ij[axis] < 0 || ij[axis] >= m.n[axis]) {
    const int side = step > 0 ? 1 : 0;
    if (b.kind[axis][side] != BoundaryKind::Periodic)
      return kBoundary;
    ij[axis] = (ij[axis] + m.n[axis]) % m.n[axis];
  }
  return m.index(ij[0], ij[1]);
}

/// Ghost state for the non-periodic kinds. SlipWall reflects the wall-normal
/// components of momentum, w and psi; Extrapolation copies.
inline StateVec ghost_state(const StateVec& inner, int axis, BoundaryKind kind) {
  StateVec g = inner;
  if (kind == BoundaryKind::SlipWall) {
    g[QMOM + axis] = -inner[QMOM + axis];
    g[QW + axis] = -inner[QW + axis];
    g[QPSI + axis] = -inner[QPSI + axis];
  }
  return g;
}

inline void ghost_state_inplace(double* q, int axis, BoundaryKind kind) {
  if (kind == BoundaryKind::SlipWall) {
    q[QMOM + axis] = -q[QMOM + axis];
    q[QW + axis] = -q[QW + axis];
    q[QPSI + axis] = -q[QPSI + axis];
  }
}

} // namespace tpdg::grid
