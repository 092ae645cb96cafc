#pragma once

#include <string>
#include <vector>

#include "spherosim/functionals.hpp"

namespace spherosim {

enum class Scheme { ProjectedRK4, SemiImplicitMidpoint };

struct EvolveConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 10;
  Scheme scheme = Scheme::ProjectedRK4;
};

/// Throws InvalidArgument for non-positive dt, negative t_end or record_every < 1.
void validate(const EvolveConfig& cfg);

/// Heuristic explicit stability bound h^2/4 from the minimum edge length.
double stability_bound(const TriMesh& mesh);

/// Right-hand side -v x grad E(v) of the Landau-Lifshitz equation.
VertexVectors ll_rhs(const TriMesh& mesh, std::span<const Vec3> values, const EnergyParams& p);

/// One step of dm/dt = -m x grad E(m).
Field ll_step(const Field& m, double dt, const EnergyParams& p, Scheme scheme = Scheme::ProjectedRK4);

struct TracePoint {
  double t = 0.0;
  Diagnostics d;
};

struct EvolveResult {
  std::vector<TracePoint> trace;
  Field final_field;
  std::vector<std::string> warnings;
};

/// Integrates to t_end (the last step is shortened to land on it), recording
/// diagnostics at t = 0, every record_every steps and at the end.
EvolveResult evolve(const Field& m0, const EvolveConfig& cfg, const EnergyParams& p);

struct SpinningFit {
  double nu_hat = 0.0;
  double residual_rel = 0.0;
};

/// Least-squares fit of {m, E} = nu {m, J3}; see SpinningFit.
SpinningFit spinning_fit(const Field& m, const EnergyParams& p, const Vec3& axis = kE3);

/// Same fit against a caller-supplied generator field g.
SpinningFit spinning_fit(const Field& m, const EnergyParams& p, std::span<const Vec3> g);

/// Maximum relative drifts along a trace.
struct Drift {
  double energy = 0.0;    // max |E(t) - E(0)| / E(0)
  double momentum = 0.0;  // max |J(t) - J(0)| / (1 + |J(0)|)
  double charge = 0.0;    // max |Q(t) - Q(0)|
};
Drift trace_drift(const std::vector<TracePoint>& trace);

}  // namespace spherosim
