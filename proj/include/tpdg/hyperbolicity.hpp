#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <sstream>
#include <vector>

#include "tpdg/model.hpp"

namespace tpdg::hyperbolicity {

/// Primitive-variable quasi-linear matrix C(V) for one axis. Ordering of the
/// primitive vector: (alpha1, rho1, rho2, u1[3], u2[3] [, psi[3]]).
struct QuasilinearMatrix {
  Eigen::MatrixXd entries;
  int direction = 0;
  ModelVariant variant;
};

enum class Classification { Strong, Weak, NonHyperbolic };

struct HyperbolicityReport {
  std::vector<double> eigenvalues; // sorted real parts
  double max_imag = 0.0;
  int eigvec_rank = 0;
  Classification classification = Classification::NonHyperbolic;
};

namespace detail {

// C(V) in the x-direction, transcribed entrywise. Auxiliaries:
// beta = (p1-p2)/rho, theta_j^i = c_j w^i, theta_jk^i = c_j c_k w^i,
// xi1 = u2^1 + c1^2 w^1, xi2 = u1^1 - c2^2 w^1.
inline Eigen::MatrixXd cmat_x(const ModelContext& ctx, const Primitive& v) {
  const int n = ctx.nvar();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  const double a1 = v.alpha1, a2 = 1.0 - v.alpha1;
  const double ar1 = a1 * v.rho1, ar2 = a2 * v.rho2;
  const double rho = ar1 + ar2;
  const double c1 = ar1 / rho, c2 = ar2 / rho;
  Vec3 w{}, u{};
  for (int i = 0; i < 3; ++i) {
    w[i] = v.u1[i] - v.u2[i];
    u[i] = c1 * v.u1[i] + c2 * v.u2[i];
  }
  const auto e1 = eos::evaluate_raw(ctx.eos1, v.rho1);
  const auto e2 = eos::evaluate_raw(ctx.eos2, v.rho2);
  const double beta = (e1.p - e2.p) / rho;
  const double xi1 = v.u2[0] + c1 * c1 * w[0];
  const double xi2 = v.u1[0] - c2 * c2 * w[0];

  enum { A = 0, R1 = 1, R2 = 2, U1 = 3, U2 = 6, PS = 9 };
  C(A, A) = u[0];
  C(R1, A) = v.rho1 / a1 * c2 * w[0];
  C(R1, R1) = v.u1[0];
  C(R1, U1 + 0) = v.rho1;
  C(R2, A) = v.rho2 / a2 * c1 * w[0];
  C(R2, R2) = v.u2[0];
  C(R2, U2 + 0) = v.rho2;
  C(U1 + 0, A) = beta;
  C(U1 + 0, R1) = e1.a2 / v.rho1;
  C(U1 + 0, U1 + 0) = v.u1[0];
  C(U2 + 0, A) = beta;
  C(U2 + 0, R2) = e2.a2 / v.rho2;
  C(U2 + 0, U2 + 0) = v.u2[0];

  if (ctx.variant.is_gp()) {
    for (int t = 1; t < 3; ++t) {
      C(U1 + 0, U1 + t) = c2 * w[t];
      C(U2 + 0, U2 + t) = -c1 * w[t];
      C(U1 + t, U1 + t) = u[0];
      C(U2 + t, U2 + t) = u[0];
    }
  } else {
    for (int t = 1; t < 3; ++t) {
      C(U1 + 0, U1 + t) = c2 * c2 * w[t];
      C(U1 + 0, U2 + t) = c1 * c2 * w[t];
      C(U2 + 0, U1 + t) = -c1 * c2 * w[t];
      C(U2 + 0, U2 + t) = -c1 * c1 * w[t];
      C(U1 + t, U1 + t) = xi2;
      C(U1 + t, U2 + t) = -c1 * c2 * w[0];
      C(U2 + t, U1 + t) = c1 * c2 * w[0];
      C(U2 + t, U2 + t) = xi1;
    }
  }
  if (ctx.variant.is_glm()) {
    const double ap = ctx.variant.a_psi;
    C(U1 + 1, PS + 2) = -c2 * ap;
    C(U1 + 2, PS + 1) = c2 * ap;
    C(U2 + 1, PS + 2) = c1 * ap;
    C(U2 + 2, PS + 1) = -c1 * ap;
    for (int k = 0; k < 3; ++k)
      C(PS + k, PS + k) = u[0];
    C(PS + 1, U1 + 2) = ap;
    C(PS + 1, U2 + 2) = -ap;
    C(PS + 2, U1 + 1) = -ap;
    C(PS + 2, U2 + 1) = ap;
  }
  return C;
}

// Proper rotation G with G e_dir = e_x (identity for dir 0). Keeps the
// Levi-Civita coupling of the GLM terms intact, unlike an axis swap.
inline Eigen::Matrix3d axis_to_x(int dir) {
  Eigen::Matrix3d G = Eigen::Matrix3d::Identity();
  if (dir == 1) {
    G << 0, 1, 0, -1, 0, 0, 0, 0, 1;
  } else if (dir == 2) {
    G << 0, 0, 1, 0, 1, 0, -1, 0, 0;
  }
  return G;
}

inline Eigen::MatrixXd state_rotation(const ModelContext& ctx, const Eigen::Matrix3d& G) {
  const int n = ctx.nvar();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n, n);
  T.block<3, 3>(3, 3) = G;
  T.block<3, 3>(6, 6) = G;
  if (n == 12)
    T.block<3, 3>(9, 9) = G;
  return T;
}

inline Vec3 rotate(const Eigen::Matrix3d& G, const Vec3& x) {
  Vec3 y{};
  for (int i = 0; i < 3; ++i)
    y[i] = G(i, 0) * x[0] + G(i, 1) * x[1] + G(i, 2) * x[2];
  return y;
}

} // namespace detail

inline QuasilinearMatrix quasilinear_matrix(const ModelContext& ctx, const Primitive& v,
                                            int dir) {
  if (!(v.alpha1 > 0.0 && v.alpha1 < 1.0) || !(v.rho1 > 0.0) || !(v.rho2 > 0.0))
    throw AdmissibilityError("quasilinear_matrix: inadmissible primitive state");
  QuasilinearMatrix out;
  out.direction = dir;
  out.variant = ctx.variant;
  if (dir == 0) {
    out.entries = detail::cmat_x(ctx, v);
    return out;
  }
  // C_dir(V) = T^{-1} C_x(T V) T with T the block rotation taking dir to x.
  const Eigen::Matrix3d G = detail::axis_to_x(dir);
  Primitive vr = v;
  vr.u1 = detail::rotate(G, v.u1);
  vr.u2 = detail::rotate(G, v.u2);
  vr.psi = detail::rotate(G, v.psi);
  const Eigen::MatrixXd T = detail::state_rotation(ctx, G);
  out.entries = T.transpose() * detail::cmat_x(ctx, vr) * T; // T orthogonal
  return out;
}

/// Closed-form eigenvalue multiset, sorted ascending.
inline std::vector<double> eigenvalues_analytic(const ModelContext& ctx, const Primitive& v,
                                                int dir) {
  const double ar1 = v.alpha1 * v.rho1, ar2 = (1.0 - v.alpha1) * v.rho2;
  const double rho = ar1 + ar2;
  const double c1 = ar1 / rho, c2 = ar2 / rho;
  const double un = c1 * v.u1[dir] + c2 * v.u2[dir];
  const double a1 = eos::sound_speed(ctx.eos1, v.rho1);
  const double a2 = eos::sound_speed(ctx.eos2, v.rho2);
  std::vector<double> lam = {v.u1[dir] - a1, v.u1[dir] + a1, v.u2[dir] - a2, v.u2[dir] + a2};
  if (ctx.variant.is_glm()) {
    lam.insert(lam.end(), 4, un);
    const double ap = ctx.variant.a_psi;
    lam.insert(lam.end(), {un - ap, un - ap, un + ap, un + ap});
  } else {
    lam.insert(lam.end(), 5, un);
  }
  std::sort(lam.begin(), lam.end());
  return lam;
}

/// Numerical eigendecomposition with a defectiveness-robust rank: eigenvalues
/// are clustered, and each cluster contributes its geometric multiplicity
/// dim null(C - mean I) counted from the singular values of the shifted
/// matrix. The raw SVD of the eigenvector matrix puts the defective
/// directions right at the sqrt(eps) noise floor and misranks.
inline HyperbolicityReport eigen_decompose(const QuasilinearMatrix& mat, double tol = 1e-8) {
  const Eigen::MatrixXd& C = mat.entries;
  const int n = static_cast<int>(C.rows());
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver failed on matrix:\n" << C;
    throw std::runtime_error(os.str());
  }
  HyperbolicityReport rep;
  const auto lam = es.eigenvalues();
  double scale = 1.0;
  for (int i = 0; i < n; ++i)
    scale = std::max(scale, std::abs(lam[i]));
  rep.max_imag = 0.0;
  rep.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) {
    rep.max_imag = std::max(rep.max_imag, std::abs(lam[i].imag()));
    rep.eigenvalues[i] = lam[i].real();
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());

  const double normC = std::max(1.0, C.cwiseAbs().rowwise().sum().maxCoeff());
  int rank = 0;
  std::size_t i = 0;
  while (i < rep.eigenvalues.size()) {
    std::size_t j = i + 1;
    double sum = rep.eigenvalues[i];
    while (j < rep.eigenvalues.size() &&
           rep.eigenvalues[j] - rep.eigenvalues[j - 1] <= 1e-5 * scale) {
      sum += rep.eigenvalues[j];
      ++j;
    }
    const double mean = sum / static_cast<double>(j - i);
    Eigen::MatrixXd S = C - mean * Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    int geo = 0;
    for (int k = 0; k < n; ++k)
      if (svd.singularValues()[k] <= tol * normC)
        ++geo;
    rank += std::min<int>(geo, static_cast<int>(j - i));
    i = j;
  }
  rep.eigvec_rank = rank;

  if (rep.max_imag > tol * scale)
    rep.classification = Classification::NonHyperbolic;
  else
    rep.classification = (rank == n) ? Classification::Strong : Classification::Weak;
  return rep;
}

} // namespace tpdg::hyperbolicity
