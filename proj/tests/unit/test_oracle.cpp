#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spherosim/equivariant_oracle.hpp"
#include "spherosim/error.hpp"
#include "spherosim/field.hpp"

#include "../support/radial_romberg.hpp"

namespace spherosim {
namespace {

using reference::kPi;
using reference::lambda;
using reference::plane_integral;
using reference::trial_dtheta;
using reference::trial_theta;

TEST(Oracle, TrialEnergyMatchesIndependentRomberg) {
  for (double eps : {0.2, 0.05}) {
    const reference::TrialIntegrals ref = reference::trial_integrals(eps);
    for (double kappa : {0.5, 50.0}) {
      const double exchange = ref.exchange, anis = kappa * ref.anisotropy_per_kappa;
      const OracleEnergy e = oracle_energy_parts(trial_profile(eps), EnergyParams{kappa});
      EXPECT_NEAR(e.exchange, exchange, 1e-8 * exchange) << eps;
      EXPECT_NEAR(e.anisotropy, anis, 1e-8 * anis) << eps << ' ' << kappa;
      EXPECT_NEAR(oracle_exchange_ambient_route(trial_profile(eps)), e.exchange, 1e-8 * e.exchange);
    }
  }
}

TEST(Oracle, TrialMomentumMatchesIndependentRomberg) {
  const double eps = 0.2;
  const double s3 = plane_integral([&](double r) {
    const double l = lambda(r);
    return l * l * std::cos(trial_theta(eps, r) + 2.0 * std::atan(r));
  }, {eps, 1.0, 2.0});
  const OracleMomentum m = oracle_momentum(trial_profile(eps));
  EXPECT_NEAR(m.S3, s3, 1e-8 * std::abs(s3));
  EXPECT_NEAR(m.J3_closed, -4.0 * kPi, 1e-8);
  EXPECT_NEAR(m.J3_direct, m.J3_closed, 1e-8);
}

TEST(Oracle, IdentityProfile) {
  const EquivariantProfile p = identity_profile();
  const OracleEnergy e = oracle_energy_parts(p, EnergyParams{7.0});
  EXPECT_NEAR(e.exchange, 4.0 * kPi, 1e-12);
  EXPECT_NEAR(e.anisotropy, 0.0, 1e-12);
  EXPECT_NEAR(oracle_charge(p), 1.0, 1e-15);
  EXPECT_NEAR(oracle_J3(p), 0.0, 1e-10);
}

TEST(Oracle, ConstantProfiles) {
  // m = e3: S3 = 4 pi and no orbital part.
  const OracleMomentum up = oracle_momentum(constant_profile(0.0, 0));
  EXPECT_NEAR(up.S3, 4.0 * kPi, 1e-10);
  EXPECT_NEAR(up.J3_closed, 4.0 * kPi, 1e-10);
  const double aniso = oracle_energy(constant_profile(0.0, 0), EnergyParams{3.0});
  EXPECT_NEAR(aniso, 1.5 * 8.0 * kPi / 3.0, 1e-10);
}

TEST(Oracle, QuadratureIntegratesAreaExactly) {
  const auto q = RadialQuadrature::for_profile(trial_profile(0.1));
  const double area = q.integrate_area([](double r) { return lambda(r) * lambda(r); });
  EXPECT_NEAR(area, 4.0 * kPi, 1e-13);
  EXPECT_NEAR(RadialQuadrature::for_profile(trial_profile(0.1), 2).integrate_area(
                  [](double r) { return lambda(r) * lambda(r); }),
              4.0 * kPi, 1e-13);
}

TEST(Oracle, FrameProfilesMustBeCorotational) {
  EquivariantProfile p = trial_profile(0.2);
  p.k = 2;
  EXPECT_THROW(oracle_energy(p, EnergyParams{1.0}), Error);
}

TEST(Oracle, SmoothProfileChargeAndJ3Identity) {
  const EquivariantProfile p = smooth_profile(2, kPi, 0.0, {0.3}, {0.2});
  EXPECT_NEAR(oracle_charge(p), -2.0, 1e-14);
  const OracleMomentum m = oracle_momentum(p);
  EXPECT_NEAR(m.J3_direct, m.J3_closed, 1e-8);
}

}  // namespace
}  // namespace spherosim
