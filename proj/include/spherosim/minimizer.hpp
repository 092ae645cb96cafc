#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "spherosim/functionals.hpp"

namespace spherosim {

struct MinimizeOptions {
  double mu0 = 10.0;
  double mu_growth = 2.0;
  double mu_max = 1e6;
  double inner_tol = 1e-6;       // L2 norm of the projected gradient
  double constraint_tol = 1e-4;  // |J - J0|
  int max_outer = 30;
  int max_inner = 5000;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double step_min = 1e-6;
  double step_max = 1e2;
  double max_displacement = 0.1;  // per-vertex cap on one step, radians
  int charge_check_every = 25;
  /// Throw MaxIterations when the iteration budget runs out instead of
  /// returning an unconverged report.
  bool fail_on_max_iterations = true;
};

/// Throws InvalidArgument unless all fields are positive and mu_growth > 1.
void validate(const MinimizeOptions& o);

struct OuterRecord {
  int outer = 0;
  int inner_iterations = 0;
  double mu = 0.0;
  double lagrangian = 0.0;
  double energy = 0.0;
  double constraint_residual = 0.0;
  double gradient_norm = 0.0;
  Vec3 multiplier = Vec3::Zero();
};

struct MinimizeReport {
  bool converged = false;
  double E_final = 0.0;
  Vec3 J_final = Vec3::Zero();
  Vec3 J_target = Vec3::Zero();
  bool constrained = false;
  double Q_final = 0.0;
  Vec3 multiplier = Vec3::Zero();
  double kkt_residual = 0.0;
  double equivariance_defect = 0.0;
  Vec3 equivariance_axis = kE3;
  int outer_iterations = 0;
  int inner_iterations = 0;
  int step_retries = 0;
  std::vector<OuterRecord> trace;
};

/// Trial field (smallest-energy grid scale with E < 8 pi and Q = 0),
/// elliptically distorted until |J| = |J0|, jointly rotated so J is parallel to J0.
/// Throws TargetTooSmall for |J0| <= 4 pi and TargetUnreachable when no grid
/// scale qualifies or the distortion cannot be bracketed in (1, 3].
/// A given `epsilon` replaces the grid search.
Field seed_field(const Vec3& j0, const EnergyParams& p, std::shared_ptr<const TriMesh> mesh,
                 std::optional<double> epsilon = std::nullopt);

/// Grid scale whose trial field has the lowest mesh energy among those with
/// Q = 0 and E < 8 pi. Throws TargetUnreachable if none qualifies.
double trial_seed_epsilon(const EnergyParams& p, const std::shared_ptr<const TriMesh>& mesh);
/// Trial scales searched by seed_field (decreasing).
std::vector<double> seed_epsilon_grid();

/// Augmented-Lagrangian minimization of E subject to J = J0 within the Q = 0 sector.
std::pair<Field, MinimizeReport> minimize_constrained(const Field& seed, const Vec3& j0, const EnergyParams& p,
                                                      const MinimizeOptions& opts = {});

/// Projected-gradient minimization of E without the J constraint.
std::pair<Field, MinimizeReport> minimize_free(const Field& seed, const EnergyParams& p,
                                               const MinimizeOptions& opts = {});

struct EquivarianceDefect {
  double value = 0.0;
  Vec3 axis = kE3;
};

/// Minimum over axes of |e x m - d_chi m| / |grad m| (162-axis grid, then a
/// local pattern search around the best grid axis).
EquivarianceDefect equivariance_defect_search(const Field& m);
double equivariance_defect(const Field& m);

}  // namespace spherosim
