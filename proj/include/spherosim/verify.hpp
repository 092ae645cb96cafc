#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spherosim/functionals.hpp"

namespace spherosim {

struct CheckResult {
  std::string name;
  double measured_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string details;
};

/// Builds a result with passed = (measured_error <= tolerance).
CheckResult make_check(std::string name, double measured_error, double tolerance, std::string details = {});

/// Tolerance multiplier 4^(5 - level) below level 5, 1 otherwise.
double tolerance_scale(int level);

/// Sum of vertex areas where m . nu < t.
double sublevel_area(const Field& m, double t);

/// Uniformly distributed rotation.
Mat3 random_rotation(std::mt19937_64& rng);

/// Low-pass random field: base + 0.25 * sum of three vector modes c_j P_j(y),
/// P_j a product of up to three unit linear forms, normalized. The base is
/// nu when `base` is zero, otherwise the constant direction `base`.
SphereFunction random_smooth_function(std::mt19937_64& rng, const Vec3& base = Vec3::Zero());

/// Low-pass random tangent direction field for m.
VertexVectors random_tangent_field(const Field& m, std::mt19937_64& rng);

struct CorpusEntry {
  std::string name;
  Field field;
  double expected_Q = 0.0;
};

/// Constructor corpus with charges in {-1, 0, 1, 2}.
std::vector<CorpusEntry> field_corpus(std::shared_ptr<const TriMesh> mesh, std::uint64_t seed);

struct SuiteOptions {
  int level = 5;
  double kappa = 50.0;
  std::uint64_t seed = 7;
  /// Time horizon of the conservation group.
  double conservation_t_end = 0.1;
};

/// Runs the identity checks in a fixed order; failures are reported, not thrown.
std::vector<CheckResult> run_suite(const SuiteOptions& opts);
std::vector<CheckResult> run_suite(int level, double kappa, std::uint64_t seed);

}  // namespace spherosim
