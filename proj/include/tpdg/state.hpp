#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "tpdg/eos.hpp"

namespace tpdg {

// Conserved layout: (alpha1, a1*rho1, a2*rho2, rho*u[3], w[3], psi[3]).
// psi is present only for the GLM variant (width 12, otherwise 9).
inline constexpr int kMaxVars = 12;
inline constexpr int QA = 0;    // alpha1
inline constexpr int QR1 = 1;   // alpha1 rho1
inline constexpr int QR2 = 2;   // alpha2 rho2
inline constexpr int QMOM = 3;  // momentum x,y,z
inline constexpr int QW = 6;    // relative velocity x,y,z
inline constexpr int QPSI = 9;  // GLM cleaning field x,y,z

using StateVec = std::array<double, kMaxVars>;
using Vec3 = std::array<double, 3>;

inline StateVec zero_state() { return StateVec{}; }

enum class VariantKind : std::uint8_t { Base, Glm, GodunovPowell };

struct ModelVariant {
  VariantKind kind = VariantKind::Base;
  double a_psi = 0.0; // cleaning speed, GLM only

  static ModelVariant base() { return {VariantKind::Base, 0.0}; }
  static ModelVariant glm(double a_psi) {
    if (!(a_psi > 0.0))
      throw std::invalid_argument("glm variant needs a_psi > 0");
    return {VariantKind::Glm, a_psi};
  }
  static ModelVariant godunov_powell() { return {VariantKind::GodunovPowell, 0.0}; }

  int width() const { return kind == VariantKind::Glm ? 12 : 9; }
  bool is_glm() const { return kind == VariantKind::Glm; }
  bool is_gp() const { return kind == VariantKind::GodunovPowell; }
};

struct Primitive {
  double alpha1 = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  Vec3 u1{};
  Vec3 u2{};
  Vec3 psi{};
};

/// Relaxation is out of the supported range by construction: tau must stay
/// infinite and zeta zero, anything else is rejected loudly.
struct SourceParams {
  Vec3 gravity{};
  double tau = std::numeric_limits<double>::infinity();
  double zeta = 0.0;

  void validate() const {
    if (std::isfinite(tau))
      throw std::invalid_argument("unsupported relaxation: finite pressure-relaxation rate tau");
    if (zeta != 0.0)
      throw std::invalid_argument("unsupported relaxation: nonzero friction coefficient zeta");
  }
  bool has_gravity() const {
    return gravity[0] != 0.0 || gravity[1] != 0.0 || gravity[2] != 0.0;
  }
};

/// Dambreak-style density recovery, rho_k = (rho_k a_k^2 + rho0k eps)/(a_k^2 + eps),
/// written in terms of the partial density so alpha_k = 0 is exact.
struct DensityFilter {
  bool enabled = false;
  double eps = 1e-12;
  double rho0_1 = 1.0;
  double rho0_2 = 1.0;
};

inline double density_filter(double arho_k, double alpha_k, double rho0_k, double eps) {
  return (arho_k * alpha_k + rho0_k * eps) / (alpha_k * alpha_k + eps);
}

/// Everything the model operations need at a point, bundled so the EOS pow is
/// paid once per state.
struct ModelContext {
  ModelVariant variant;
  eos::EosSpec eos1;
  eos::EosSpec eos2;
  SourceParams sources;
  DensityFilter filter;

  int nvar() const { return variant.width(); }
};

class AdmissibilityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace tpdg
