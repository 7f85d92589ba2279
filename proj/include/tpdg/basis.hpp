#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tpdg::dg {

inline constexpr int kMaxOrder = 5;
inline constexpr int kMaxNodes = kMaxOrder + 1;

/// Nodal Lagrange basis on the N+1 Gauss-Legendre points of [0,1].
/// Orthogonal under the collocated quadrature, so the DG mass matrix is
/// diagonal with the quadrature weights.
struct NodalBasis {
  int N = 0;
  int np = 1; // N+1
  std::array<double, kMaxNodes> nodes{};
  std::array<double, kMaxNodes> weights{};
  // diff[m][l] = phi_l'(node_m)
  std::array<std::array<double, kMaxNodes>, kMaxNodes> diff{};
  std::array<double, kMaxNodes> end0{}; // phi_l(0)
  std::array<double, kMaxNodes> end1{}; // phi_l(1)
  // Inverse of the space-time predictor matrix
  //   T[l][m] = phi_l(1) phi_m(1) - w_m phi_l'(node_m),
  // pre-multiplied pieces for the fixed-point update:
  //   qhat[l] = tinv_f0[l] * u0 + dt * sum_m tinv_w[l][m] * L[m].
  std::array<double, kMaxNodes> tinv_f0{};
  std::array<std::array<double, kMaxNodes>, kMaxNodes> tinv_w{};

  /// phi_l evaluated at arbitrary x in [0,1].
  double phi(int l, double x) const {
    double num = 1.0, den = 1.0;
    for (int m = 0; m < np; ++m) {
      if (m == l)
        continue;
      num *= x - nodes[m];
      den *= nodes[l] - nodes[m];
    }
    return num / den;
  }

  double dphi(int l, double x) const {
    double den = 1.0;
    for (int m = 0; m < np; ++m)
      if (m != l)
        den *= nodes[l] - nodes[m];
    double sum = 0.0;
    for (int k = 0; k < np; ++k) {
      if (k == l)
        continue;
      double term = 1.0;
      for (int m = 0; m < np; ++m)
        if (m != l && m != k)
          term *= x - nodes[m];
      sum += term;
    }
    return sum / den;
  }
};

namespace detail {

/// Gauss-Legendre rule on [0,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, double* x, double* w) {
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess on [-1,1]
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16)
        break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[n - 1 - i] = 0.5 * (t + 1.0);
    w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

} // namespace detail

inline NodalBasis build_basis(int N) {
  if (N < 1 || N > kMaxOrder)
    throw std::invalid_argument("basis: degree must be in [1," +
                                std::to_string(kMaxOrder) + "]");
  NodalBasis b;
  b.N = N;
  b.np = N + 1;
  detail::gauss_legendre(b.np, b.nodes.data(), b.weights.data());
  for (int m = 0; m < b.np; ++m)
    for (int l = 0; l < b.np; ++l)
      b.diff[m][l] = b.dphi(l, b.nodes[m]);
  for (int l = 0; l < b.np; ++l) {
    b.end0[l] = b.phi(l, 0.0);
    b.end1[l] = b.phi(l, 1.0);
  }
  Eigen::MatrixXd T(b.np, b.np);
  for (int l = 0; l < b.np; ++l)
    for (int m = 0; m < b.np; ++m)
      T(l, m) = b.end1[l] * b.end1[m] - b.weights[m] * b.diff[m][l];
  const Eigen::MatrixXd Ti = T.inverse();
  for (int l = 0; l < b.np; ++l) {
    double acc = 0.0;
    for (int m = 0; m < b.np; ++m) {
      acc += Ti(l, m) * b.end0[m];
      b.tinv_w[l][m] = Ti(l, m) * b.weights[m];
    }
    b.tinv_f0[l] = acc;
  }
  return b;
}

/// Basis-dependent subcell machinery: exact averages of the DG polynomial
/// over the (2N+1)^d equal subcells and the constrained least-squares
/// reconstruction back (total cell integral preserved exactly).
struct SubcellOps {
  int N = 0;
  int dim = 1;
  int nsub1 = 1;  // 2N+1
  int nsub = 1;   // (2N+1)^dim
  int ndof1 = 1;  // N+1
  int ndof = 1;   // (N+1)^dim
  // proj1[j][m]: average of phi_m over 1D subcell j
  Eigen::MatrixXd proj1;
  Eigen::MatrixXd proj;  // nsub x ndof tensor product
  Eigen::MatrixXd recon; // ndof x nsub, conservation constraint built in
  // tensorized face moments: int over subinterval j of phi_m
  // (used when a DG face integral is replaced by subcell fluxes)
  Eigen::MatrixXd submoment1; // nsub1 x ndof1, = proj1 / nsub1

  static SubcellOps make(const NodalBasis& b, int dim) {
    SubcellOps s;
    s.N = b.N;
    s.dim = dim;
    s.nsub1 = 2 * b.N + 1;
    s.ndof1 = b.np;
    s.nsub = dim == 2 ? s.nsub1 * s.nsub1 : s.nsub1;
    s.ndof = dim == 2 ? s.ndof1 * s.ndof1 : s.ndof1;

    s.proj1.resize(s.nsub1, s.ndof1);
    const double h = 1.0 / s.nsub1;
    for (int j = 0; j < s.nsub1; ++j)
      for (int m = 0; m < s.ndof1; ++m) {
        double acc = 0.0;
        for (int q = 0; q < b.np; ++q)
          acc += b.weights[q] * b.phi(m, (j + b.nodes[q]) * h);
        s.proj1(j, m) = acc; // already the subcell average (factor 1/h * h)
      }
    s.submoment1 = s.proj1 * h;

    s.proj.resize(s.nsub, s.ndof);
    if (dim == 1) {
      s.proj = s.proj1;
    } else {
      for (int j2 = 0; j2 < s.nsub1; ++j2)
        for (int j1 = 0; j1 < s.nsub1; ++j1)
          for (int m2 = 0; m2 < s.ndof1; ++m2)
            for (int m1 = 0; m1 < s.ndof1; ++m1)
              s.proj(j2 * s.nsub1 + j1, m2 * s.ndof1 + m1) =
                  s.proj1(j2, m2) * s.proj1(j1, m1);
    }

    // min ||P u - ubar|| s.t. w^T u = vbar^T ubar via the KKT system;
    // recon = [u-rows of KKT^{-1}] * [2 P^T ; vbar^T].
    Eigen::VectorXd wcell(s.ndof);
    for (int m = 0; m < s.ndof; ++m) {
      const int m1 = m % s.ndof1, m2 = m / s.ndof1;
      wcell(m) = dim == 2 ? b.weights[m1] * b.weights[m2] : b.weights[m];
    }
    const double subvol = 1.0 / s.nsub;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s.ndof + 1, s.ndof + 1);
    K.topLeftCorner(s.ndof, s.ndof) = 2.0 * s.proj.transpose() * s.proj;
    K.topRightCorner(s.ndof, 1) = wcell;
    K.bottomLeftCorner(1, s.ndof) = wcell.transpose();
    Eigen::MatrixXd rhs(s.ndof + 1, s.nsub);
    rhs.topRows(s.ndof) = 2.0 * s.proj.transpose();
    rhs.bottomRows(1) = Eigen::RowVectorXd::Constant(s.nsub, subvol);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible())
      throw std::runtime_error("subcell reconstruction system is singular");
    s.recon = lu.solve(rhs).topRows(s.ndof);
    return s;
  }

  /// Tensorized subcell projection (sum-factorized; called for every cell
  /// every step, the dense matrix is kept for setup and tests).
  /// scratch must hold nsub1 * ndof1 * nvar doubles in 2D.
  void project(const double* coeff, int nvar, double* scratch, double* avg) const {
    if (dim == 1) {
      for (int j = 0; j < nsub1; ++j) {
        double* out = avg + static_cast<std::size_t>(j) * nvar;
        for (int v = 0; v < nvar; ++v)
          out[v] = 0.0;
        for (int m = 0; m < ndof1; ++m) {
          const double p = proj1(j, m);
          const double* um = coeff + static_cast<std::size_t>(m) * nvar;
          for (int v = 0; v < nvar; ++v)
            out[v] += p * um[v];
        }
      }
      return;
    }
    // stage 1: contract x-dofs -> [j1][m2][var]
    for (int j1 = 0; j1 < nsub1; ++j1)
      for (int m2 = 0; m2 < ndof1; ++m2) {
        double* out = scratch + (static_cast<std::size_t>(j1) * ndof1 + m2) * nvar;
        for (int v = 0; v < nvar; ++v)
          out[v] = 0.0;
        for (int m1 = 0; m1 < ndof1; ++m1) {
          const double p = proj1(j1, m1);
          const double* um = coeff + (static_cast<std::size_t>(m2) * ndof1 + m1) * nvar;
          for (int v = 0; v < nvar; ++v)
            out[v] += p * um[v];
        }
      }
    // stage 2: contract y-dofs -> [j2][j1][var]
    for (int j2 = 0; j2 < nsub1; ++j2)
      for (int j1 = 0; j1 < nsub1; ++j1) {
        double* out = avg + (static_cast<std::size_t>(j2) * nsub1 + j1) * nvar;
        for (int v = 0; v < nvar; ++v)
          out[v] = 0.0;
        for (int m2 = 0; m2 < ndof1; ++m2) {
          const double p = proj1(j2, m2);
          const double* sm = scratch + (static_cast<std::size_t>(j1) * ndof1 + m2) * nvar;
          for (int v = 0; v < nvar; ++v)
            out[v] += p * sm[v];
        }
      }
  }
};

} // namespace tpdg::dg
