#pragma once

#include <functional>
#include <vector>

#include "spherosim/functionals.hpp"
#include "spherosim/profile.hpp"

namespace spherosim {

/// Composite Gauss-Legendre rule in the polar angle psi in [0, pi] with
/// r = tan(psi / 2). Panels are aligned with the profile breakpoints and
/// graded geometrically towards its core scale.
struct RadialQuadrature {
  std::vector<double> psi;
  std::vector<double> weights;  // d psi weights
  int panels = 0;

  /// `refine` splits every base panel into that many equal pieces.
  static RadialQuadrature for_profile(const EquivariantProfile& p, int refine = 1, int nodes_per_panel = 16);
  /// Integral of f(r) dr over [0, infinity).
  double integrate_dr(const std::function<double(double)>& f) const;
  /// Integral of f(r) 2 pi r dr (area form of the chart).
  double integrate_area(const std::function<double(double)>& f) const;
};

struct OracleEnergy {
  double exchange = 0.0;
  double anisotropy = 0.0;
  double total = 0.0;
};

/// Energy of a k-equivariant profile. Frame profiles use the moving-frame
/// reduction E0 + E1.
OracleEnergy oracle_energy_parts(const EquivariantProfile& p, const EnergyParams& params, int refine = 1);
double oracle_energy(const EquivariantProfile& p, const EnergyParams& params, int refine = 1);

/// Exchange of a co-rotational frame profile through the ambient conversion
/// (second route for the moving-frame reduction).
double oracle_exchange_ambient_route(const EquivariantProfile& frame, int refine = 1);

/// k (cos theta(0) - cos theta(inf)) / 2 of the ambient profile.
double oracle_charge(const EquivariantProfile& p);

struct OracleMomentum {
  double S3 = 0.0;
  double L3 = 0.0;          // 4 pi Q - int lambda |x|^2 omega dx
  double J3_closed = 0.0;   // (1 - k) S3 + 4 pi k p
  double J3_direct = 0.0;   // S3 + L3
};

/// Both routes for J3; throws RouteMismatch if they differ by more than 1e-6.
OracleMomentum oracle_momentum(const EquivariantProfile& p, int refine = 1);
/// Closed-form J3 after the route cross-check.
double oracle_J3(const EquivariantProfile& p, int refine = 1);

}  // namespace spherosim
