#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>

#include "spherosim/parallel.hpp"
#include "spherosim/verify.hpp"

namespace spherosim {
namespace {

TEST(Verify, ToleranceScale) {
  EXPECT_EQ(tolerance_scale(5), 1.0);
  EXPECT_EQ(tolerance_scale(6), 1.0);
  EXPECT_EQ(tolerance_scale(4), 4.0);
  EXPECT_EQ(tolerance_scale(3), 16.0);
}

TEST(Verify, MakeCheck) {
  EXPECT_TRUE(make_check("x", 1e-5, 1e-4).passed);
  EXPECT_FALSE(make_check("x", 1e-3, 1e-4).passed);
  EXPECT_FALSE(make_check("x", NAN, 1e-4).passed);
}

TEST(Verify, RandomRotationsAreRotations) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) EXPECT_TRUE(is_rotation(random_rotation(rng)));
}

TEST(Verify, SublevelAreaBounds) {
  const auto mesh = TriMesh::icosphere(3);
  EXPECT_NEAR(sublevel_area(hedgehog(1, mesh), 0.9), 0.0, 0.0);
  EXPECT_NEAR(sublevel_area(hedgehog(-1, mesh), 0.9), 4.0 * std::numbers::pi, 1e-11);
  // Equator vertices are excluded, so the area approaches 2 pi from below.
  const auto upper = TriMesh::icosphere(5);
  EXPECT_NEAR(sublevel_area(constant_field(kE3, upper), 0.0), 2.0 * std::numbers::pi, 0.15);
}

TEST(Verify, CorpusIsReproducibleAndCoversCharges) {
  const auto mesh = TriMesh::icosphere(2);
  const auto a = field_corpus(mesh, 5), b = field_corpus(mesh, 5);
  ASSERT_EQ(a.size(), b.size());
  std::set<double> charges;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    for (std::size_t v = 0; v < a[i].field.size(); ++v) EXPECT_EQ(a[i].field[v], b[i].field[v]);
    charges.insert(a[i].expected_Q);
  }
  EXPECT_EQ(charges, (std::set<double>{-1.0, 0.0, 1.0, 2.0}));
}

TEST(Verify, SuiteAtLowLevelReportsEveryGroup) {
  const auto results = run_suite(3, 50.0, 7);
  std::set<std::string> groups;
  for (const auto& r : results) groups.insert(r.name.substr(0, 2));
  EXPECT_EQ(groups.size(), 14u);
}

TEST(Parallel, ThreadCountDoesNotChangeResults) {
  const auto mesh = TriMesh::icosphere(5);
  std::mt19937_64 rng(4);
  const Field m = Field::from_function(mesh, random_smooth_function(rng));
  set_threads(1);
  const Diagnostics one = diagnose(m, EnergyParams{3.0});
  set_threads(3);
  const Diagnostics three = diagnose(m, EnergyParams{3.0});
  set_threads(1);
  EXPECT_EQ(one.total, three.total);
  EXPECT_EQ(one.Q, three.Q);
  EXPECT_EQ(one.J, three.J);
}

}  // namespace
}  // namespace spherosim
