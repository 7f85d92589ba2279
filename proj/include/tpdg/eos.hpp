#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace tpdg::eos {

enum class Kind { IdealGas, StiffenedGas };

/// Barotropic per-phase closure. Ideal gas:
///   p = rho^gamma e^{s/cv},  e = rho^{gamma-1} e^{s/cv} / (gamma-1)
/// Stiffened gas:
///   p = c0^2 rho0/gamma (rho/rho0)^gamma e^{s/cv} - (c0^2 rho0 - gamma p0)/gamma
///   e = c0^2/(gamma(gamma-1)) (rho/rho0)^{gamma-1} e^{s/cv} + (rho0 c0^2 - gamma p0)/(gamma rho)
/// rho0 and p0 are ignored for the ideal gas.
struct EosSpec {
  Kind kind = Kind::IdealGas;
  double gamma = 1.4;
  double c0 = 1.0;        // reference sound speed (stiffened)
  double rho0 = 1.0;      // reference density (stiffened)
  double p0 = 0.0;        // reference pressure (stiffened)
  double s_over_cv = 0.0; // constant entropy ratio, enters as e^{s/cv}

  static EosSpec ideal(double gamma, double s_over_cv = 0.0) {
    EosSpec s;
    s.kind = Kind::IdealGas;
    s.gamma = gamma;
    s.s_over_cv = s_over_cv;
    return s;
  }
  static EosSpec stiffened(double gamma, double c0, double rho0, double p0,
                           double s_over_cv = 0.0) {
    EosSpec s;
    s.kind = Kind::StiffenedGas;
    s.gamma = gamma;
    s.c0 = c0;
    s.rho0 = rho0;
    s.p0 = p0;
    s.s_over_cv = s_over_cv;
    return s;
  }

  void validate() const {
    if (!(gamma > 1.0))
      throw std::invalid_argument("eos: gamma must exceed 1, got " + std::to_string(gamma));
    if (kind == Kind::StiffenedGas) {
      if (!(c0 > 0.0))
        throw std::invalid_argument("eos: c0 must be positive");
      if (!(rho0 > 0.0))
        throw std::invalid_argument("eos: rho0 must be positive");
    }
  }
};

struct EosEval {
  double p;  // pressure
  double e;  // specific internal energy
  double h;  // specific enthalpy
  double a2; // squared sound speed
};

namespace detail {
// rho^{gamma-1}; the only transcendental in the hot path, short-circuited
// for the common integer exponent gamma = 2.
inline double pow_gm1(double rho, double gamma) {
  if (gamma == 2.0)
    return rho;
  return std::pow(rho, gamma - 1.0);
}

inline void check_density(double rho) {
  if (!(rho > 0.0))
    throw std::domain_error("eos: non-positive density " + std::to_string(rho));
}
} // namespace detail

/// All four derived quantities with a single pow. No density check: NaNs from
/// inadmissible states propagate to the caller (the limiter's detection path).
inline EosEval evaluate_raw(const EosSpec& s, double rho) {
  EosEval out;
  const double es = (s.s_over_cv == 0.0) ? 1.0 : std::exp(s.s_over_cv);
  if (s.kind == Kind::IdealGas) {
    const double t = detail::pow_gm1(rho, s.gamma) * es; // rho^{g-1} e^{s/cv}
    out.p = rho * t;
    out.e = t / (s.gamma - 1.0);
    out.h = s.gamma * t / (s.gamma - 1.0);
    out.a2 = s.gamma * t;
  } else {
    const double t = s.c0 * s.c0 * detail::pow_gm1(rho / s.rho0, s.gamma) * es;
    const double k = (s.rho0 * s.c0 * s.c0 - s.gamma * s.p0) / s.gamma;
    out.a2 = t;
    out.h = t / (s.gamma - 1.0);
    out.e = t / (s.gamma * (s.gamma - 1.0)) + k / rho;
    out.p = rho * t / s.gamma - k;
  }
  return out;
}

inline double pressure(const EosSpec& s, double rho) {
  detail::check_density(rho);
  return evaluate_raw(s, rho).p;
}

inline double internal_energy(const EosSpec& s, double rho) {
  detail::check_density(rho);
  return evaluate_raw(s, rho).e;
}

/// Closed form, not e + p/rho: for stiffened gases far from the reference
/// density the composition cancels catastrophically while h itself is tiny.
inline double enthalpy(const EosSpec& s, double rho) {
  detail::check_density(rho);
  return evaluate_raw(s, rho).h;
}

inline double sound_speed(const EosSpec& s, double rho) {
  detail::check_density(rho);
  return std::sqrt(evaluate_raw(s, rho).a2);
}

} // namespace tpdg::eos
