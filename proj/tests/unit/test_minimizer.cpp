#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spherosim/error.hpp"
#include "spherosim/minimizer.hpp"
#include "spherosim/verify.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Minimizer, OptionValidation) {
  EXPECT_NO_THROW(validate(MinimizeOptions{}));
  MinimizeOptions o;
  o.mu_growth = 1.0;
  EXPECT_THROW(validate(o), Error);
  o = MinimizeOptions{};
  o.max_displacement = 0.0;
  EXPECT_THROW(validate(o), Error);
  o = MinimizeOptions{};
  o.max_inner = 0;
  EXPECT_THROW(validate(o), Error);
}

TEST(Minimizer, SeedRejectsSmallTargets) {
  const auto mesh = TriMesh::icosphere(2);
  try {
    seed_field(Vec3(0, 0, -4.0 * kPi), EnergyParams{50.0}, mesh);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TargetTooSmall);
  }
}

TEST(Minimizer, SeedEpsilonGridIsDecreasingAndInRange) {
  const auto g = seed_epsilon_grid();
  ASSERT_FALSE(g.empty());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_GT(g[i], 0.0);
    EXPECT_LT(g[i], 0.5);
    if (i) EXPECT_LT(g[i], g[i - 1]);
  }
}

TEST(Minimizer, TrialSeedBelowEightPi) {
  const auto mesh = TriMesh::icosphere(4);
  const EnergyParams p{5.0};
  const double eps = trial_seed_epsilon(p, mesh);
  const Field m = from_equivariant(trial_profile(eps), mesh);
  EXPECT_LT(energy(m, p).total, 8.0 * kPi);
  EXPECT_LT(std::abs(charge(m)), 1e-4);
}

TEST(Minimizer, SeedMatchesTargetMomentum) {
  const auto mesh = TriMesh::icosphere(4);
  const Vec3 j0 = 4.1 * kPi * Vec3(0.2, -0.3, -1.0).normalized();
  const Field m = seed_field(j0, EnergyParams{5.0}, mesh, 0.3);
  EXPECT_LT((angular_momentum(m) - j0).norm(), 1e-3 * j0.norm());
  EXPECT_LT(std::abs(charge(m)), 1e-4);
}

TEST(Minimizer, FreeDescentLowersEnergyInTheTrivialSector) {
  const auto mesh = TriMesh::icosphere(3);
  const EnergyParams p{1.0};
  std::mt19937_64 rng(3);
  const Field seed = Field::from_function(mesh, random_smooth_function(rng, kE3));
  MinimizeOptions o;
  o.fail_on_max_iterations = false;
  const auto [m, rep] = minimize_free(seed, p, o);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT(rep.E_final, energy(seed, p).total);
  EXPECT_NEAR(rep.E_final, energy(m, p).total, 1e-12);
  EXPECT_LT(std::abs(rep.Q_final), 1e-6);
  EXPECT_LT(l2_norm(*mesh, tangent_project(m, grad_energy(m, p))), 10.0 * o.inner_tol);
}

TEST(Minimizer, ConstrainedSolveHitsTarget) {
  const auto mesh = TriMesh::icosphere(3);
  const EnergyParams p{1.0};
  std::mt19937_64 rng(8);
  const Field seed = Field::from_function(mesh, random_smooth_function(rng, kE3));
  const Vec3 j0 = angular_momentum(seed) + Vec3(0.3, 0.0, -0.2);
  MinimizeOptions o;
  o.fail_on_max_iterations = false;
  const auto [m, rep] = minimize_constrained(seed, j0, p, o);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT((angular_momentum(m) - j0).norm(), o.constraint_tol);
  EXPECT_LT(rep.kkt_residual, 1e-3);
  EXPECT_FALSE(rep.trace.empty());
}

TEST(Minimizer, EquivarianceDefect) {
  const auto mesh = TriMesh::icosphere(4);
  EXPECT_LT(equivariance_defect(hedgehog(1, mesh)), 1e-4);
  EXPECT_LT(equivariance_defect(from_equivariant(trial_profile(0.3), mesh)), 1e-2);
  std::mt19937_64 rng(2);
  const Field random = Field::from_function(mesh, random_smooth_function(rng, kE3));
  EXPECT_GT(equivariance_defect(random), 0.05);
}

}  // namespace
}  // namespace spherosim
