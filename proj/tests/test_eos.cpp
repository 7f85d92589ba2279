#include <catch2/catch_amalgamated.hpp>

#include "tpdg/eos.hpp"

using namespace tpdg;
using eos::EosSpec;

namespace {

// independent finite-difference oracles
double fd_dedr(const EosSpec& s, double rho, double h = 1e-6) {
  return (eos::internal_energy(s, rho + h) - eos::internal_energy(s, rho - h)) / (2 * h);
}
double fd_dhdr(const EosSpec& s, double rho, double h = 1e-6) {
  return (eos::enthalpy(s, rho + h) - eos::enthalpy(s, rho - h)) / (2 * h);
}

const EosSpec kAir = EosSpec::ideal(1.4);
const EosSpec kGas2 = EosSpec::ideal(2.0);
const EosSpec kWater = EosSpec::stiffened(2.0, 20.0, 1000.0, 0.0);

} // namespace

TEST_CASE("ideal gas pressure") {
  CHECK(eos::pressure(kAir, 1.0) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(eos::pressure(kGas2, 2.0) == Catch::Approx(4.0).epsilon(1e-14));
  // p = (gamma-1) rho E identity at sampled densities
  for (double rho : {0.5, 1.0, 2.0})
    CHECK(eos::pressure(kAir, rho) ==
          Catch::Approx(0.4 * rho * eos::internal_energy(kAir, rho)).epsilon(1e-13));
}

TEST_CASE("stiffened gas reference state") {
  CHECK(eos::pressure(kWater, 1000.0) == Catch::Approx(0.0).margin(1e-9));
  CHECK(eos::sound_speed(kWater, 1000.0) == Catch::Approx(20.0).epsilon(1e-14));
  const EosSpec w2 = EosSpec::stiffened(2.0, 20.0, 1000.0, 5.0);
  CHECK(eos::pressure(w2, 1000.0) == Catch::Approx(5.0).epsilon(1e-12));
  // e at the reference density, direct substitution
  const double expect = 20.0 * 20.0 / (2.0 * 1.0) + (1000.0 * 400.0 - 2.0 * 5.0) / (2.0 * 1000.0);
  CHECK(eos::internal_energy(w2, 1000.0) == Catch::Approx(expect).epsilon(1e-13));
}

TEST_CASE("internal energy ideal closed form") {
  // e(rho) = rho^{gamma-1} e^{s/cv} / (gamma-1); at rho=1 consistent with
  // p = (gamma-1) rho e = 1 and h = e + p/rho = 3.5
  CHECK(eos::internal_energy(kAir, 1.0) == Catch::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("enthalpy agrees with e + p/rho") {
  // closed form vs composition, tolerance scaled by the composed terms
  for (const EosSpec& s : {kAir, kGas2, kWater, EosSpec::stiffened(2.2, 15.0, 900.0, 3.0, 0.1)})
    for (double rho : {0.5, 1.0, 2.0, 950.0, 1100.0}) {
      const double h = eos::enthalpy(s, rho);
      const double comp = eos::internal_energy(s, rho) + eos::pressure(s, rho) / rho;
      const double scale = std::max({1.0, std::abs(h), std::abs(comp),
                                     std::abs(eos::internal_energy(s, rho))});
      CHECK(std::abs(h - comp) <= 1e-14 * scale);
    }
  CHECK(eos::enthalpy(kAir, 1.0) == Catch::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("sound speed against finite-difference oracle") {
  // a^2 = rho dh/drho
  CHECK(eos::sound_speed(kAir, 1.0) ==
        Catch::Approx(std::sqrt(1.0 * fd_dhdr(kAir, 1.0))).epsilon(1e-6));
  CHECK(eos::sound_speed(kAir, 1.0) == Catch::Approx(std::sqrt(1.4)).epsilon(1e-14));
  CHECK(eos::sound_speed(kGas2, 1.0) ==
        Catch::Approx(std::sqrt(1.0 * fd_dhdr(kGas2, 1.0))).epsilon(1e-6));
  CHECK(eos::sound_speed(kGas2, 1.0) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("thermodynamic identities over the density range") {
  for (const EosSpec& s : {kAir, kGas2, kWater}) {
    double prev_p = 0.0, prev_h = -1e300;
    bool first = true;
    for (double rho = 1e-3; rho <= 1e4; rho *= 3.0) {
      const double h = std::max(1e-9, 1e-7 * rho);
      const double p = eos::pressure(s, rho);
      CHECK(std::abs(p - rho * rho * fd_dedr(s, rho, h)) <=
            1e-6 * std::max(1.0, std::abs(p)));
      const double a2 = eos::sound_speed(s, rho) * eos::sound_speed(s, rho);
      CHECK(std::abs(a2 - rho * fd_dhdr(s, rho, h)) <= 1e-6 * std::max(1.0, a2));
      // monotonicity in rho for gamma > 1
      if (!first) {
        CHECK(p > prev_p);
        CHECK(eos::enthalpy(s, rho) > prev_h);
      }
      prev_p = p;
      prev_h = eos::enthalpy(s, rho);
      first = false;
    }
  }
}

TEST_CASE("non-positive density is a domain error") {
  CHECK_THROWS_AS(eos::pressure(kAir, 0.0), std::domain_error);
  CHECK_THROWS_AS(eos::internal_energy(kAir, -1.0), std::domain_error);
  CHECK_THROWS_AS(eos::enthalpy(kWater, 0.0), std::domain_error);
  CHECK_THROWS_AS(eos::sound_speed(kWater, -0.5), std::domain_error);
}

TEST_CASE("spec validation") {
  EosSpec bad = EosSpec::ideal(1.0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  EosSpec badc = EosSpec::stiffened(2.0, -1.0, 1000.0, 0.0);
  CHECK_THROWS_AS(badc.validate(), std::invalid_argument);
}
