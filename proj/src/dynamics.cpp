#include "spherosim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spherosim/error.hpp"
#include "spherosim/parallel.hpp"

namespace spherosim {
namespace {

// out = a + s * b
VertexVectors axpy(std::span<const Vec3> a, double s, std::span<const Vec3> b) {
  VertexVectors out(a.size());
  parallel_for(a.size(), [&](std::size_t i) { out[i] = a[i] + s * b[i]; });
  return out;
}

Field rk4_step(const Field& m, double dt, const EnergyParams& p) {
  const auto& mesh = m.mesh();
  const auto y = m.values();
  const VertexVectors k1 = ll_rhs(mesh, y, p);
  const VertexVectors k2 = ll_rhs(mesh, axpy(y, 0.5 * dt, k1), p);
  const VertexVectors k3 = ll_rhs(mesh, axpy(y, 0.5 * dt, k2), p);
  const VertexVectors k4 = ll_rhs(mesh, axpy(y, dt, k3), p);
  VertexVectors out(y.size());
  parallel_for(y.size(), [&](std::size_t i) {
    out[i] = (y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).normalized();
  });
  return Field(m.mesh_ptr(), std::move(out));
}

Field midpoint_step(const Field& m, double dt, const EnergyParams& p) {
  const auto& mesh = m.mesh();
  const auto y = m.values();
  VertexVectors next(y.begin(), y.end());
  VertexVectors mid(y.size());
  for (int it = 0; it < 50; ++it) {
    parallel_for(y.size(), [&](std::size_t i) { mid[i] = 0.5 * (y[i] + next[i]); });
    const VertexVectors f = ll_rhs(mesh, mid, p);
    double change = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const Vec3 updated = y[i] + dt * f[i];
      change = std::max(change, (updated - next[i]).lpNorm<Eigen::Infinity>());
      next[i] = updated;
    }
    if (change < 1e-12) {
      for (auto& v : next) v.normalize();
      return Field(m.mesh_ptr(), std::move(next));
    }
  }
  throw Error(ErrorCode::MidpointNoConvergence,
              "fixed-point iteration did not converge in 50 iterations; reduce dt");
}

}  // namespace

void validate(const EvolveConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end must be non-negative");
  }
  if (cfg.record_every < 1) throw Error(ErrorCode::InvalidArgument, "record_every must be >= 1");
}

double stability_bound(const TriMesh& mesh) {
  const double h = mesh.min_edge_length();
  return 0.25 * h * h;
}

VertexVectors ll_rhs(const TriMesh& mesh, std::span<const Vec3> values, const EnergyParams& p) {
  VertexVectors g = grad_energy(mesh, values, p);
  parallel_for(g.size(), [&](std::size_t i) { g[i] = -values[i].cross(g[i]); });
  return g;
}

Field ll_step(const Field& m, double dt, const EnergyParams& p, Scheme scheme) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  return scheme == Scheme::ProjectedRK4 ? rk4_step(m, dt, p) : midpoint_step(m, dt, p);
}

EvolveResult evolve(const Field& m0, const EvolveConfig& cfg, const EnergyParams& p) {
  validate(cfg);
  validate(p);
  EvolveResult result{{}, m0, {}};
  const double bound = stability_bound(m0.mesh());
  if (cfg.dt > bound) {
    std::ostringstream msg;
    msg << "dt = " << cfg.dt << " exceeds the explicit stability estimate h^2/4 = " << bound;
    result.warnings.push_back(msg.str());
  }
  const auto steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  result.trace.push_back({0.0, diagnose(m0, p)});
  double t = 0.0;
  for (long n = 1; n <= steps; ++n) {
    const double h = std::min(cfg.dt, cfg.t_end - t);
    result.final_field = ll_step(result.final_field, h, p, cfg.scheme);
    t = n == steps ? cfg.t_end : t + h;
    if (n % cfg.record_every == 0 || n == steps) result.trace.push_back({t, diagnose(result.final_field, p)});
  }
  return result;
}

SpinningFit spinning_fit(const Field& m, const EnergyParams& p, std::span<const Vec3> g) {
  const auto& mesh = m.mesh();
  const VertexVectors a = ll_rhs(mesh, m.values(), p);
  const double gg = l2_inner(mesh, g, g);
  const double a_norm = l2_norm(mesh, a);
  SpinningFit fit;
  if (std::sqrt(gg) < 1e-10) {
    fit.residual_rel = a_norm / std::max(a_norm, 1e-14);
    return fit;
  }
  fit.nu_hat = l2_inner(mesh, a, g) / gg;
  const VertexVectors r = axpy(a, -fit.nu_hat, g);
  fit.residual_rel = l2_norm(mesh, r) / std::max(a_norm, 1e-14);
  return fit;
}

SpinningFit spinning_fit(const Field& m, const EnergyParams& p, const Vec3& axis) {
  const VertexVectors g = generator_J3(m, axis);
  return spinning_fit(m, p, g);
}

Drift trace_drift(const std::vector<TracePoint>& trace) {
  Drift d;
  if (trace.empty()) return d;
  const auto& first = trace.front().d;
  for (const auto& tp : trace) {
    d.energy = std::max(d.energy, std::abs(tp.d.total - first.total) / first.total);
    d.momentum = std::max(d.momentum, (tp.d.J - first.J).norm() / (1.0 + first.J.norm()));
    d.charge = std::max(d.charge, std::abs(tp.d.Q - first.Q));
  }
  return d;
}

}  // namespace spherosim
