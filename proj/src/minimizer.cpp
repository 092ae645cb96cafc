#include "spherosim/minimizer.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spherosim/error.hpp"
#include "spherosim/parallel.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEightPi = 8.0 * kPi;

struct Penalty {
  bool active = false;
  Vec3 j0 = Vec3::Zero();
  Vec3 lambda = Vec3::Zero();
  double mu = 0.0;
};

struct Evaluation {
  double lagrangian = 0.0;
  double energy = 0.0;
  Vec3 J = Vec3::Zero();
};

Evaluation evaluate(const Field& m, const EnergyParams& p, const Penalty& pen) {
  Evaluation ev;
  ev.energy = energy(m, p).total;
  ev.lagrangian = ev.energy;
  if (pen.active) {
    ev.J = angular_momentum(m);
    const Vec3 r = ev.J - pen.j0;
    ev.lagrangian += -pen.lambda.dot(r) + 0.5 * pen.mu * r.squaredNorm();
  }
  return ev;
}

// Change of the augmented Lagrangian between two nearby fields, summed term by
// term so that the rounding error scales with the size of the change rather
// than with the size of the functional.
double lagrangian_change(const Field& a, const Field& b, const EnergyParams& p, const Penalty& pen, const Vec3& j_a) {
  const auto& mesh = a.mesh();
  const auto edges = mesh.edges();
  const auto area = mesh.vertex_area();
  const double d_exchange = 0.5 * pairwise_sum<double>(edges.size(), [&](std::size_t k) {
    const auto i = static_cast<std::size_t>(edges[k].i), j = static_cast<std::size_t>(edges[k].j);
    const Vec3 da = a[i] - a[j], db = b[i] - b[j];
    return edges[k].cotan_weight * (db - da).dot(db + da);
  }, 0.0);
  const double d_anis = 0.5 * p.kappa * pairwise_sum<double>(a.size(), [&](std::size_t i) {
    const double ca = a[i].dot(mesh.vertex(i)), cb = b[i].dot(mesh.vertex(i));
    return area[i] * (ca - cb) * (ca + cb);
  }, 0.0);
  double delta = d_exchange + d_anis;
  if (pen.active) {
    const auto oa = image_solid_angles(a);
    const auto ob = image_solid_angles(b);
    const Vec3 d_l = pairwise_sum<Vec3>(oa.size(), [&](std::size_t t) -> Vec3 {
      return (ob[t] - oa[t]) * mesh.triangle_centroid(t);
    }, Vec3::Zero());
    const Vec3 d_s = pairwise_sum<Vec3>(a.size(), [&](std::size_t i) -> Vec3 { return area[i] * (b[i] - a[i]); },
                                        Vec3::Zero());
    const Vec3 dj = d_s + d_l;
    const Vec3 r = j_a - pen.j0;
    delta += -pen.lambda.dot(dj) + 0.5 * pen.mu * (2.0 * r.dot(dj) + dj.squaredNorm());
  }
  return delta;
}

// Tangent-projected L2 gradient of the augmented Lagrangian with coefficient
// c = lambda - mu (J - J0) on grad J.
VertexVectors lagrangian_gradient(const Field& m, const EnergyParams& p, const Penalty& pen, const Vec3& J) {
  VertexVectors g = grad_energy(m, p);
  if (pen.active) {
    const Vec3 c = pen.lambda - pen.mu * (J - pen.j0);
    const auto gl = grad_L_all(m);
    parallel_for(g.size(), [&](std::size_t i) {
      for (int a = 0; a < 3; ++a) {
        const auto as = static_cast<std::size_t>(a);
        g[i] -= c[a] * (Vec3::Unit(a) + gl[as][i]);
      }
    });
  }
  return tangent_project(m, g);
}

Field retract(const Field& m, double step, std::span<const Vec3> d) {
  VertexVectors v(m.size());
  parallel_for(m.size(), [&](std::size_t i) { v[i] = (m[i] + step * d[i]).normalized(); });
  return Field(m.mesh_ptr(), std::move(v));
}

double inner(const TriMesh& mesh, std::span<const Vec3> a, std::span<const Vec3> b) {
  const auto area = mesh.vertex_area();
  return pairwise_sum<double>(a.size(), [&](std::size_t i) { return area[i] * a[i].dot(b[i]); }, 0.0);
}

void axpy(double alpha, std::span<const Vec3> x, VertexVectors& y) {
  parallel_for(y.size(), [&](std::size_t i) { y[i] += alpha * x[i]; });
}

struct InnerResult {
  Field m;
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  Evaluation ev;
};

// Riemannian L-BFGS with projection transport and Armijo backtracking. The
// charge is checked every few iterations; a sector change rolls back to the
// last good checkpoint once with a tenfold smaller step cap.
InnerResult inner_solve(Field m, const EnergyParams& p, const Penalty& pen, const MinimizeOptions& o, double q_ref,
                        int& retries) {
  constexpr std::size_t kMemory = 8;
  const auto& mesh = m.mesh();
  Evaluation ev = evaluate(m, p, pen);
  VertexVectors g = lagrangian_gradient(m, p, pen, ev.J);
  double gnorm = l2_norm(mesh, g);
  double step_cap = o.max_displacement;
  std::vector<VertexVectors> hist_s, hist_y;
  std::vector<double> hist_rho;
  Field checkpoint = m;
  Evaluation checkpoint_ev = ev;
  bool retried = false;
  int it = 0;
  for (; it < o.max_inner; ++it) {
    if (gnorm <= o.inner_tol) return {std::move(m), it, true, gnorm, ev};
    // Two-loop recursion for d = -H g.
    VertexVectors d = g;
    std::vector<double> alpha(hist_s.size());
    for (std::size_t k = hist_s.size(); k-- > 0;) {
      alpha[k] = hist_rho[k] * inner(mesh, hist_s[k], d);
      axpy(-alpha[k], hist_y[k], d);
    }
    double gamma = 1e-3 / std::max(gnorm, 1.0);
    if (!hist_s.empty()) gamma = 1.0 / (hist_rho.back() * inner(mesh, hist_y.back(), hist_y.back()));
    gamma = std::clamp(gamma, o.step_min, o.step_max);
    for (auto& v : d) v *= gamma;
    for (std::size_t k = 0; k < hist_s.size(); ++k) {
      const double beta = hist_rho[k] * inner(mesh, hist_y[k], d);
      axpy(alpha[k] - beta, hist_s[k], d);
    }
    d = tangent_project(m, d);
    for (auto& v : d) v = -v;
    double slope = -inner(mesh, d, g);
    if (!(slope > 0.0)) {
      hist_s.clear();
      hist_y.clear();
      hist_rho.clear();
      d = g;
      for (auto& v : d) v *= -gamma;
      slope = gamma * gnorm * gnorm;
    }
    // Cap the largest vertex displacement.
    double dmax = 0.0;
    for (const auto& v : d) dmax = std::max(dmax, v.norm());
    double eta = std::min(1.0, step_cap / std::max(dmax, 1e-300));
    // Rounding allowance of the change evaluation, scaled by the functional sizes.
    const double noise = 1e3 * std::numeric_limits<double>::epsilon() *
                         (ev.energy + (pen.active ? (pen.lambda.norm() + pen.mu * (ev.J - pen.j0).norm()) *
                                                        (ev.J.norm() + 1.0) : 0.0));
    bool accepted = false;
    Field trial = m;
    Evaluation trial_ev;
    while (eta * dmax >= 1e-14) {
      trial = retract(m, eta, d);
      try {
        const double change = lagrangian_change(m, trial, p, pen, ev.J);
        if (change <= -o.armijo_c * eta * slope + noise) {
          trial_ev = evaluate(trial, p, pen);
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::IllConditionedTriangle) throw;
      }
      eta *= o.armijo_shrink;
    }
    if (!accepted) {
      if (hist_s.empty()) break;
      hist_s.clear();
      hist_y.clear();
      hist_rho.clear();
      continue;
    }
    VertexVectors g_new = lagrangian_gradient(trial, p, pen, trial_ev.J);
    VertexVectors sk(m.size()), yk(m.size());
    parallel_for(m.size(), [&](std::size_t i) {
      sk[i] = trial[i] - m[i];
      yk[i] = g_new[i] - g[i];
    });
    sk = tangent_project(trial, sk);
    yk = tangent_project(trial, yk);
    for (std::size_t k = 0; k < hist_s.size(); ++k) {
      hist_s[k] = tangent_project(trial, hist_s[k]);
      hist_y[k] = tangent_project(trial, hist_y[k]);
    }
    const double sy = inner(mesh, sk, yk);
    if (sy > 1e-12 * std::sqrt(inner(mesh, sk, sk) * inner(mesh, yk, yk))) {
      hist_s.push_back(std::move(sk));
      hist_y.push_back(std::move(yk));
      hist_rho.push_back(1.0 / sy);
      if (hist_s.size() > kMemory) {
        hist_s.erase(hist_s.begin());
        hist_y.erase(hist_y.begin());
        hist_rho.erase(hist_rho.begin());
      }
    }
    m = std::move(trial);
    ev = trial_ev;
    g = std::move(g_new);
    gnorm = l2_norm(mesh, g);
    if ((it + 1) % o.charge_check_every == 0) {
      double q = std::numeric_limits<double>::infinity();
      try {
        q = charge(m);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::IllConditionedTriangle) throw;
      }
      if (std::abs(q - q_ref) > 0.5) {
        if (retried) {
          throw Error(ErrorCode::TopologicalSectorChange,
                      "charge left the sector of the seed during descent (Q = " + std::to_string(q) + ")");
        }
        retried = true;
        ++retries;
        m = checkpoint;
        ev = checkpoint_ev;
        g = lagrangian_gradient(m, p, pen, ev.J);
        gnorm = l2_norm(mesh, g);
        step_cap *= 0.1;
        hist_s.clear();
        hist_y.clear();
        hist_rho.clear();
        continue;
      }
      checkpoint = m;
      checkpoint_ev = ev;
    }
  }
  return {std::move(m), it, gnorm <= o.inner_tol, gnorm, ev};
}

void finalize_report(MinimizeReport& rep, const Field& m, const EnergyParams& p) {
  const Diagnostics d = diagnose(m, p);
  rep.E_final = d.total;
  rep.J_final = d.J;
  rep.Q_final = d.Q;
  const auto defect = equivariance_defect_search(m);
  rep.equivariance_defect = defect.value;
  rep.equivariance_axis = defect.axis;
}

}  // namespace

void validate(const MinimizeOptions& o) {
  const bool ok = o.mu0 > 0 && o.mu_growth > 1 && o.mu_max >= o.mu0 && o.inner_tol > 0 && o.constraint_tol > 0 &&
                  o.max_outer > 0 && o.max_inner > 0 && o.armijo_c > 0 && o.armijo_c < 1 && o.armijo_shrink > 0 &&
                  o.armijo_shrink < 1 && o.step_min > 0 && o.step_max >= o.step_min && o.max_displacement > 0 &&
                  o.charge_check_every > 0;
  if (!ok) throw Error(ErrorCode::InvalidArgument, "invalid minimizer options");
}

std::vector<double> seed_epsilon_grid() {
  std::vector<double> eps(12);
  for (std::size_t j = 0; j < eps.size(); ++j) eps[j] = 0.4 * std::pow(0.63, static_cast<double>(j));
  return eps;
}

double trial_seed_epsilon(const EnergyParams& p, const std::shared_ptr<const TriMesh>& mesh) {
  validate(p);
  double best_eps = -1.0, best_e = kEightPi;
  for (double eps : seed_epsilon_grid()) {
    const Field m = Field::from_function(mesh, profile_function(trial_profile(eps)));
    const Diagnostics d = diagnose(m, p);
    if (std::abs(d.Q) < 1e-4 && d.total < best_e) {
      best_e = d.total;
      best_eps = eps;
    }
  }
  if (best_eps < 0.0) {
    throw Error(ErrorCode::TargetUnreachable, "no trial scale in the grid has E < 8 pi on this mesh");
  }
  return best_eps;
}

Field seed_field(const Vec3& j0, const EnergyParams& p, std::shared_ptr<const TriMesh> mesh,
                 std::optional<double> epsilon) {
  validate(p);
  const double target = j0.norm();
  if (!(target > 4.0 * kPi)) {
    throw Error(ErrorCode::TargetTooSmall, "|J0| must exceed 4 pi");
  }
  const double best_eps = epsilon ? *epsilon : trial_seed_epsilon(p, mesh);
  const SphereFunction trial = profile_function(trial_profile(best_eps));
  // (ii) bisection on the elliptical distortion parameter.
  auto excess = [&](double s) {
    return angular_momentum(Field::from_function(mesh, elliptical_distort(trial, s))).norm() - target;
  };
  double lo = 1.0, hi = -1.0;
  for (double s = 1.25; s <= 3.0 + 1e-12; s += 0.25) {
    if (excess(s) > 0.0) {
      hi = s;
      break;
    }
    lo = s;
  }
  if (hi < 0.0) {
    throw Error(ErrorCode::TargetUnreachable, "distortion s in (1, 3] does not reach |J0|");
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    s = 0.5 * (lo + hi);
    const double f = excess(s);
    if (std::abs(f) < 1e-6) break;
    (f > 0.0 ? hi : lo) = s;
  }
  const SphereFunction distorted = elliptical_distort(trial, s);
  // (iii) joint rotation taking J onto the direction of J0.
  const Field m = Field::from_function(mesh, distorted);
  const Vec3 j = angular_momentum(m);
  const Mat3 r = Eigen::Quaterniond::FromTwoVectors(j, j0).toRotationMatrix();
  Field rotated = rotate_joint(m, r);
  const double q = charge(rotated);
  if (std::abs(q) > 1e-4) {
    throw Error(ErrorCode::TargetUnreachable,
                "rotated seed left the Q = 0 sector (core under-resolved on this mesh)");
  }
  return rotated;
}

std::pair<Field, MinimizeReport> minimize_constrained(const Field& seed, const Vec3& j0, const EnergyParams& p,
                                                      const MinimizeOptions& opts) {
  validate(p);
  validate(opts);
  const double q_seed = charge(seed);
  if (std::abs(q_seed) > 1e-4) {
    throw Error(ErrorCode::InvalidArgument, "seed must have Q = 0 (got " + std::to_string(q_seed) + ")");
  }
  MinimizeReport rep;
  rep.constrained = true;
  rep.J_target = j0;
  Penalty pen{true, j0, Vec3::Zero(), opts.mu0};
  Field m = seed;
  double prev_residual = std::numeric_limits<double>::infinity();
  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    InnerResult in = inner_solve(m, p, pen, opts, 0.0, rep.step_retries);
    m = std::move(in.m);
    rep.inner_iterations += in.iterations;
    rep.outer_iterations = outer;
    const Vec3 r = in.ev.J - j0;
    const double residual = r.norm();
    OuterRecord rec{outer, in.iterations, pen.mu, in.ev.lagrangian, in.ev.energy, residual, in.gradient_norm, {}};
    pen.lambda -= pen.mu * r;
    rec.multiplier = pen.lambda;
    rep.trace.push_back(rec);
    if (residual <= opts.constraint_tol && in.converged) {
      rep.converged = true;
      break;
    }
    if (in.iterations == 0 && !in.converged) break;
    if (residual > opts.constraint_tol && residual > 0.5 * prev_residual) pen.mu = std::min(pen.mu * opts.mu_growth, opts.mu_max);
    prev_residual = residual;
  }
  rep.multiplier = pen.lambda;
  {
    Penalty kkt{true, j0, pen.lambda, 0.0};
    rep.kkt_residual = l2_norm(m.mesh(), lagrangian_gradient(m, p, kkt, angular_momentum(m)));
  }
  finalize_report(rep, m, p);
  if (!rep.converged && opts.fail_on_max_iterations) {
    std::ostringstream msg;
    msg << "augmented Lagrangian did not converge in " << opts.max_outer
        << " outer iterations (|J - J0| = " << (rep.J_final - j0).norm() << ")";
    throw Error(ErrorCode::MaxIterations, msg.str());
  }
  return {std::move(m), std::move(rep)};
}

std::pair<Field, MinimizeReport> minimize_free(const Field& seed, const EnergyParams& p, const MinimizeOptions& opts) {
  validate(p);
  validate(opts);
  MinimizeReport rep;
  const double q_seed = std::round(charge(seed));
  InnerResult in = inner_solve(seed, p, Penalty{}, opts, q_seed, rep.step_retries);
  rep.converged = in.converged;
  rep.inner_iterations = in.iterations;
  rep.outer_iterations = 1;
  rep.kkt_residual = in.gradient_norm;
  rep.trace.push_back({1, in.iterations, 0.0, in.ev.lagrangian, in.ev.energy, 0.0, in.gradient_norm, Vec3::Zero()});
  finalize_report(rep, in.m, p);
  if (!rep.converged && opts.fail_on_max_iterations) {
    throw Error(ErrorCode::MaxIterations, "projected gradient descent did not reach inner_tol in " +
                                              std::to_string(opts.max_inner) + " iterations");
  }
  return {std::move(in.m), std::move(rep)};
}

EquivarianceDefect equivariance_defect_search(const Field& m) {
  const double grad_norm = std::sqrt(2.0 * energy(m, {1.0}).exchange);
  if (grad_norm < 1e-12) return {0.0, kE3};  // constant fields are equivariant about any axis
  const VertexJacobian jac = vertex_jacobian(m);
  auto defect = [&](const Vec3& e) { return axis_equivariance_defect(m, e, jac, grad_norm); };
  static const auto axes = TriMesh::icosphere(2);
  EquivarianceDefect best{std::numeric_limits<double>::infinity(), kE3};
  for (const Vec3& e : axes->vertices()) {
    const double v = defect(e);
    if (v < best.value) best = {v, e};
  }
  // Pattern search on the sphere of axes.
  double h = 0.5 * axes->mean_edge_length();
  while (h > 1e-4) {
    const Vec3 helper = std::abs(best.axis.z()) < 0.9 ? kE3 : kE1;
    const Vec3 t1 = helper.cross(best.axis).normalized();
    const Vec3 t2 = best.axis.cross(t1);
    bool improved = false;
    for (const Vec3& d : {t1, Vec3(-t1), t2, Vec3(-t2)}) {
      const Vec3 e = (best.axis + h * d).normalized();
      const double v = defect(e);
      if (v < best.value) {
        best = {v, e};
        improved = true;
      }
    }
    if (!improved) h *= 0.5;
  }
  return best;
}

double equivariance_defect(const Field& m) { return equivariance_defect_search(m).value; }

}  // namespace spherosim
