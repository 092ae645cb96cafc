#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spherosim/error.hpp"
#include "spherosim/field.hpp"
#include "spherosim/verify.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Field, RejectsNonUnitValues) {
  const auto mesh = TriMesh::icosphere(1);
  VertexVectors v(mesh->vertex_count(), kE3);
  v[3] = Vec3(0, 0, 1.1);
  EXPECT_THROW(Field(mesh, v), Error);
  v[3] = Vec3(NAN, 0, 1);
  EXPECT_THROW(Field(mesh, v), Error);
  EXPECT_THROW(constant_field(Vec3(0, 0, 2), mesh), Error);
}

TEST(Field, HedgehogAndConstant) {
  const auto mesh = TriMesh::icosphere(2);
  const Field h = hedgehog(-1, mesh);
  const Field c = constant_field(kE2, mesh);
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_NEAR((h[i] + mesh->vertex(i)).norm(), 0.0, 1e-15);
    EXPECT_EQ(c[i], kE2);
  }
}

TEST(Field, InterpolateIsExactAtVerticesAndForHedgehog) {
  const auto mesh = TriMesh::icosphere(3);
  const Field h = hedgehog(1, mesh);
  for (std::size_t i = 0; i < h.size(); i += 17) EXPECT_NEAR((interpolate(h, mesh->vertex(i)) - h[i]).norm(), 0.0, 1e-12);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int k = 0; k < 50; ++k) {
    const Vec3 y = Vec3(n(rng), n(rng), n(rng)).normalized();
    // Gnomonic barycentric weights reproduce the point itself.
    EXPECT_NEAR(interpolate(h, y).dot(y), 1.0, 1e-12);
  }
}

TEST(Field, RotateJointOfHedgehogIsHedgehog) {
  const auto mesh = TriMesh::icosphere(3);
  std::mt19937_64 rng(2);
  const Mat3 r = random_rotation(rng);
  const Field h = hedgehog(1, mesh);
  const Field hr = rotate_joint(h, r);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR((hr[i] - h[i]).norm(), 0.0, 1e-10);
  EXPECT_THROW(rotate_joint(h, 2.0 * Mat3::Identity()), Error);
}

TEST(Field, AnalyticRotateJointComposes) {
  std::mt19937_64 rng(4);
  const SphereFunction f = random_smooth_function(rng);
  const Mat3 a = random_rotation(rng), b = random_rotation(rng);
  const SphereFunction ab = rotate_joint(rotate_joint(f, b), a);
  const SphereFunction direct = rotate_joint(f, a * b);
  for (const Vec3& y : {kE1, kE2, Vec3(0.3, -0.4, 0.866).normalized().eval()}) {
    EXPECT_NEAR((ab(y) - direct(y)).norm(), 0.0, 1e-13);
  }
}

TEST(Field, EllipticalDistortIdentityAtSOne) {
  const auto mesh = TriMesh::icosphere(3);
  std::mt19937_64 rng(6);
  const Field m = Field::from_function(mesh, random_smooth_function(rng));
  const Field same = elliptical_distort(m, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR((same[i] - m[i]).norm(), 0.0, 1e-9);
}

TEST(Field, AzimuthalDerivativeOfConstantIsZeroAndOfHedgehogIsRotation) {
  const auto mesh = TriMesh::icosphere(4);
  const Field c = constant_field(kE3, mesh);
  for (const Vec3& d : azimuthal_derivative(c)) EXPECT_NEAR(d.norm(), 0.0, 1e-12);
  const Field h = hedgehog(1, mesh);
  const VertexVectors d = azimuthal_derivative(h);
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_NEAR((d[i] - kE3.cross(mesh->vertex(i))).norm(), 0.0, 2e-4);
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  for (int deg = 0; deg <= 15; ++deg) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
    EXPECT_NEAR(s, deg % 2 ? 0.0 : 2.0 / (deg + 1), 1e-14) << deg;
  }
}

TEST(Profile, IdentityProfileIsNu) {
  const EquivariantProfile p = identity_profile();
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  for (int k = 0; k < 30; ++k) {
    const Vec3 y = Vec3(n(rng), n(rng), n(rng)).normalized();
    EXPECT_NEAR((evaluate_profile(p, y) - y).norm(), 0.0, 1e-12);
  }
  EXPECT_NEAR(polarity(p), 0.0, 1e-15);
  EXPECT_TRUE(is_smooth_at_poles(p));
}

TEST(Profile, TrialProfileShape) {
  EXPECT_THROW(trial_profile(0.0), Error);
  EXPECT_THROW(trial_profile(0.5), Error);
  const EquivariantProfile p = trial_profile(0.1);
  EXPECT_NEAR(p.theta(0.0), kPi, 1e-14);
  EXPECT_NEAR(p.theta(0.1), kPi / 2.0, 1e-14);
  EXPECT_NEAR(p.theta(2.5), 0.0, 1e-14);
  // u = -e3 at the north pole, so m = -nu there; m = nu far away.
  EXPECT_NEAR((evaluate_profile(p, 0.0, 0.0) + kE3).norm(), 0.0, 1e-12);
  const Vec3 south = evaluate_profile(p, std::numeric_limits<double>::infinity(), 0.0);
  EXPECT_NEAR((south + kE3).norm(), 0.0, 1e-12);
}

TEST(Profile, FrameToAmbientAgreesWithEvaluation) {
  const EquivariantProfile frame = trial_profile(0.2);
  const EquivariantProfile amb = frame_to_ambient(frame);
  for (double r : {0.05, 0.3, 1.0, 1.5, 3.0}) {
    for (double chi : {0.0, 1.0, 4.0}) {
      EXPECT_NEAR((evaluate_profile(frame, r, chi) - evaluate_profile(amb, r, chi)).norm(), 0.0, 1e-12);
    }
  }
}

TEST(Profile, SampledProfileInterpolatesLinearly) {
  const auto r = log_grid(64, 1e-3, 10.0);
  const EquivariantProfile exact = identity_profile();
  const EquivariantProfile pl = resample(exact, r);
    for (std::size_t i = 0; i < r.size(); i += 7) EXPECT_NEAR(pl.theta(r[i]), exact.theta(r[i]), 1e-14);
}

TEST(FrameField, AssembleMatchesAnalyticProfile) {
  const auto mesh = TriMesh::icosphere(4);
  const EquivariantProfile p = trial_profile(0.3);
  const Field analytic = Field::from_function(mesh, profile_function(p));
  const Field assembled = frame_assemble(FrameField::from_profile(p), mesh);
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, (analytic[i] - assembled[i]).norm());
  EXPECT_LT(worst, 1e-3);
  EXPECT_LT(FrameField::from_profile(p).tail_defect(), 1e-8);
}

}  // namespace
}  // namespace spherosim
