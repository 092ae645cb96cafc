#include "spherosim/verify.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "spherosim/dynamics.hpp"
#include "spherosim/equivariant_oracle.hpp"
#include "spherosim/error.hpp"
#include "spherosim/minimizer.hpp"
#include "spherosim/parallel.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * kPi;
constexpr double kEightPi = 8.0 * kPi;

std::string fmt(const std::initializer_list<std::pair<const char*, double>>& items) {
  std::ostringstream s;
  s.precision(6);
  bool first = true;
  for (const auto& [k, v] : items) {
    if (!first) s << ", ";
    first = false;
    s << k << " = " << v;
  }
  return s.str();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-8);
  return v.normalized();
}

// Integrates dm/dt = -m x G(m) with classical RK4 and renormalization.
template <class Gradient>
Field hamiltonian_flow(const Field& m0, double t_end, int steps, const Gradient& grad) {
  const double dt = t_end / steps;
  const auto mesh = m0.mesh_ptr();
  auto rhs = [&](const VertexVectors& v) {
    const VertexVectors g = grad(Field(mesh, [&] {
      VertexVectors u(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i].normalized();
      return u;
    }()));
    VertexVectors out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = -v[i].cross(g[i]);
    return out;
  };
  VertexVectors y(m0.values().begin(), m0.values().end());
  for (int s = 0; s < steps; ++s) {
    const VertexVectors k1 = rhs(y);
    VertexVectors tmp(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const VertexVectors k2 = rhs(tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const VertexVectors k3 = rhs(tmp);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + dt * k3[i];
    const VertexVectors k4 = rhs(tmp);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = (y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).normalized();
    }
  }
  return Field(mesh, std::move(y));
}

double l2_distance(const Field& a, const Field& b) {
  VertexVectors d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(a.mesh(), d);
}

double l2_distance(const Field& a, std::span<const Vec3> b) {
  VertexVectors d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return l2_norm(a.mesh(), d);
}

Field sample(const std::shared_ptr<const TriMesh>& mesh, const SphereFunction& f) {
  return Field::from_function(mesh, f);
}

double j3_distorted(const std::shared_ptr<const TriMesh>& mesh, const SphereFunction& f, double s) {
  return angular_momentum(sample(mesh, elliptical_distort(f, s))).z();
}

// -- Groups ---------------------------------------------------------------

void chart_identities(const TriMesh& mesh, std::mt19937_64& rng, std::vector<CheckResult>& out) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double err = 0.0;
  for (int n = 0; n < 200; ++n) {
    const ChartPoint x{u(rng), u(rng)};
    const Vec3 y = stereo_to_sphere(x);
    const double lam = conformal_factor(x);
    const auto [d1, d2] = chart_jacobian(x);
    const ChartPoint back = sphere_to_stereo(y);
    err = std::max({err, std::abs(y.norm() - 1.0), std::abs(0.5 * (d1.squaredNorm() + d2.squaredNorm()) - lam * lam) / (lam * lam),
                    std::abs(d1.dot(d2)) / (lam * lam), std::hypot(back.x1 - x.x1, back.x2 - x.x2) / (1.0 + std::hypot(x.x1, x.x2))});
  }
  out.push_back(make_check("01 chart identities", err, 1e-12, "|Phi| = 1, |grad Phi|^2 / 2 = lambda^2, conformality, round trip"));
  const std::string mesh_errors = check_mesh_invariants(mesh);
  double area = 0.0;
  for (double a : mesh.vertex_area()) area += a;
  out.push_back(make_check("01 mesh invariants", std::abs(area - kFourPi) / kFourPi + (mesh_errors.empty() ? 0.0 : 1.0),
                           1e-12, mesh_errors.empty() ? fmt({{"total area", area}}) : mesh_errors));
}

void frame_indifference(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p, double scale,
                        std::mt19937_64& rng, std::vector<CheckResult>& out) {
  const SphereFunction f = profile_function(trial_profile(0.2));
  const Diagnostics d0 = diagnose(sample(mesh, f), p);
  double err_j = 0.0, err_e = 0.0;
  for (int n = 0; n < 10; ++n) {
    const Mat3 r = random_rotation(rng);
    const Diagnostics d = diagnose(sample(mesh, rotate_joint(f, r)), p);
    err_j = std::max(err_j, (d.J - r * d0.J).norm() / d0.J.norm());
    err_e = std::max(err_e, std::abs(d.total - d0.total) / d0.total);
  }
  out.push_back(make_check("02 frame indifference J", err_j, 1e-3 * scale, "max |J(m_R) - R J(m)| / |J(m)|, 10 rotations"));
  out.push_back(make_check("02 frame indifference E", err_e, 1e-4 * scale, "max |E(m_R) - E(m)| / E(m), 10 rotations"));
}

void first_variations(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p, std::mt19937_64& rng,
                      std::vector<CheckResult>& out) {
  const Field m = sample(mesh, random_smooth_function(rng));
  const VertexVectors ge = grad_energy(m, p);
  const VertexVectors gs = grad_S(3, *mesh);
  const VertexVectors gl = grad_L3(m);
  const double h = 1e-5;
  double err[3] = {0.0, 0.0, 0.0};
  for (int n = 0; n < 5; ++n) {
    const VertexVectors v = random_tangent_field(m, rng);
    auto moved = [&](double t) {
      VertexVectors w(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) w[i] = (m[i] + t * v[i]).normalized();
      return Field(mesh, std::move(w));
    };
    const Field mp = moved(h), mm = moved(-h);
    const double fd[3] = {(energy(mp, p).total - energy(mm, p).total) / (2.0 * h),
                          (spin_momentum(mp).z() - spin_momentum(mm).z()) / (2.0 * h),
                          (orbital_momentum(mp).z() - orbital_momentum(mm).z()) / (2.0 * h)};
    const double an[3] = {l2_inner(*mesh, ge, v), l2_inner(*mesh, gs, v), l2_inner(*mesh, gl, v)};
    for (int k = 0; k < 3; ++k) err[k] = std::max(err[k], std::abs(fd[k] - an[k]) / std::abs(an[k]));
  }
  out.push_back(make_check("03 first variation E", err[0], 1e-4, "central FD vs <grad E, v>, 5 directions"));
  out.push_back(make_check("03 first variation S3", err[1], 1e-4, "central FD vs <grad S3, v>, 5 directions"));
  out.push_back(make_check("03 first variation L3", err[2], 1e-4, "central FD vs <grad L3, v>, 5 directions"));
}

void generator_flows(const std::shared_ptr<const TriMesh>& mesh, double scale, std::mt19937_64& rng,
                     std::vector<CheckResult>& out) {
  const SphereFunction f = random_smooth_function(rng);
  const Field m = sample(mesh, f);
  const double alpha = 0.1;
  const Mat3 r = axis_rotation(kE3, alpha);
  const Field spin = hamiltonian_flow(m, alpha, 50, [&](const Field& x) { return grad_S(3, x.mesh()); });
  VertexVectors spin_exact(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) spin_exact[i] = r * m[i];
  out.push_back(make_check("04 generator flow S3", l2_distance(spin, spin_exact), 1e-8,
                           "flow of {m, S3} for time 0.1 vs spin rotation, L2 distance"));
  const Field orbit = hamiltonian_flow(m, alpha, 50, [&](const Field& x) { return grad_L3(x); });
  const Field orbit_exact = sample(mesh, [&](const Vec3& y) { return f(r.transpose() * y); });
  out.push_back(make_check("04 generator flow L3", l2_distance(orbit, orbit_exact), 1e-2 * scale,
                           "flow of {m, L3} for time 0.1 vs coordinate rotation, L2 distance"));
}

void commutation(const std::shared_ptr<const TriMesh>& mesh, double scale, std::mt19937_64& rng,
                 std::vector<CheckResult>& out) {
  double err_s = 0.0, err_l = 0.0;
  int used = 0, redrawn = 0;
  while (used < 20) {
    const Field m = sample(mesh, random_smooth_function(rng));
    const double s3 = spin_momentum(m).z(), l3 = orbital_momentum(m).z();
    // Antipodally odd fields have S3 = L3 = 0 exactly on the symmetric mesh.
    if (std::abs(s3) < 1e-12 || std::abs(l3) < 1e-12) {
      ++redrawn;
      continue;
    }
    ++used;
    const double ss = poisson_bracket(grad_S(1, *mesh), grad_S(2, *mesh), m);
    err_s = std::max(err_s, std::abs(ss - s3) / std::abs(s3));
    const auto gl = grad_L_all(m, true);
    const double ll = poisson_bracket(gl[0], gl[1], m);
    err_l = std::max(err_l, std::abs(ll - l3) / std::abs(l3));
  }
  const std::string det = "max relative error, 20 random fields, " + std::to_string(redrawn) + " odd draws replaced";
  out.push_back(make_check("05 commutation {S1,S2} = S3", err_s, 1e-4, det));
  out.push_back(make_check("05 commutation {L1,L2} = L3", err_l, 1e-2 * scale, det));
}

void equivariant_j3(const std::shared_ptr<const TriMesh>& mesh, double scale, std::vector<CheckResult>& out) {
  struct Case {
    int k;
    double t0, tinf;
  };
  const Case cases[] = {{-1, 0.0, kPi}, {0, 0.0, 0.0}, {1, 0.0, kPi}, {1, 0.0, 0.0}, {1, kPi, kPi}, {2, 0.0, kPi}};
  double err = 0.0, err_norm = 0.0;
  std::ostringstream det;
  for (const Case& c : cases) {
    const EquivariantProfile prof = smooth_profile(c.k, c.t0, c.tinf, {0.3, -0.15}, {0.4});
    const Field m = from_equivariant(prof, mesh);
    const Vec3 J = angular_momentum(m);
    const double S3 = spin_momentum(m).z();
    const double closed = (1.0 - c.k) * S3 + kFourPi * c.k * polarity(prof);
    err = std::max(err, std::abs(J.z() - closed) / (1.0 + std::abs(J.z())));
    if (c.k == 1) err_norm = std::max(err_norm, std::abs(J.norm() - kFourPi * std::abs(polarity(prof))) / (1.0 + J.norm()));
    det << "k=" << c.k << " J3=" << J.z() << " closed=" << closed << "; ";
  }
  out.push_back(make_check("06 equivariant J3 identity", err, 1e-3 * scale, det.str()));
  out.push_back(make_check("06 |J| = 4 pi |p| for k = 1", err_norm, 1e-3 * scale, "co-rotational cases"));
}

void elliptical(const std::shared_ptr<const TriMesh>& mesh, double scale, std::vector<CheckResult>& out) {
  const double ds = 0.02;
  struct Case {
    const char* name;
    SphereFunction f;
  };
  const Case cases[] = {{"trial", profile_function(trial_profile(0.2))},
                        {"nu", [](const Vec3& y) { return Vec3(y.normalized()); }}};
  double err_h = 0.0, err_perp = 0.0;
  std::ostringstream det;
  for (const Case& c : cases) {
    const double jp = j3_distorted(mesh, c.f, 1.0 + ds), j0 = j3_distorted(mesh, c.f, 1.0),
                 jm = j3_distorted(mesh, c.f, 1.0 - ds);
    const double fd = (jp - 2.0 * j0 + jm) / (ds * ds);
    const double rhs = elliptical_hessian_rhs(sample(mesh, c.f), 1e-3 * scale);
    err_h = std::max(err_h, std::abs(fd - rhs) / std::abs(rhs));
    const Vec3 Js = angular_momentum(sample(mesh, elliptical_distort(c.f, 1.1)));
    err_perp = std::max(err_perp, std::hypot(Js.x(), Js.y()) / std::max(Js.norm(), 1.0));
    det << c.name << ": FD " << fd << " analytic " << rhs << "; ";
  }
  out.push_back(make_check("07 elliptical Hessian", err_h, 1e-2 * scale, det.str()));
  out.push_back(make_check("07 elliptical J1 = J2 = 0", err_perp, 1e-3 * scale, "|(J1, J2)| / max(|J|, 1) at s = 1.1"));
}

void hedgehog_local_max(const std::shared_ptr<const TriMesh>& mesh, double scale, std::vector<CheckResult>& out) {
  const SphereFunction f = profile_function(trial_profile(0.2));
  const double j = j3_distorted(mesh, f, 1.0);
  const double jl = j3_distorted(mesh, f, 0.9), jh = j3_distorted(mesh, f, 1.1);
  out.push_back(make_check("08 J3 = -4 pi on trial field", std::abs(j + kFourPi) / kFourPi, 1e-2 * scale,
                           fmt({{"J3", j}})));
  const double margin = std::max(jl, jh) - j;
  out.push_back(make_check("08 strict local max of J3", margin / kFourPi, 0.0,
                           fmt({{"J3(0.9) - J3(1)", jl - j}, {"J3(1.1) - J3(1)", jh - j}})));
}

void frame_split(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p, double scale,
                 std::vector<CheckResult>& out) {
  double err = 0.0;
  std::ostringstream det;
  for (double eps : {0.4, 0.3, 0.2}) {
    const EquivariantProfile prof = trial_profile(eps);
    const double e_mesh = energy(frame_assemble(FrameField::from_profile(prof), mesh), p).total;
    const FrameEnergy fe = frame_energy(FrameField::from_profile(prof), p);
    err = std::max(err, std::abs(e_mesh - fe.total) / e_mesh);
    det << "eps=" << eps << " E=" << e_mesh << " E0+E1=" << fe.total << "; ";
  }
  out.push_back(make_check("09 moving-frame split", err, 1e-3 * scale, det.str()));
}

void trial_bound(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p, std::vector<CheckResult>& out) {
  std::vector<double> grid = seed_epsilon_grid();
  auto search = [&](const std::vector<double>& g) {
    double best = -1.0, best_e = 0.0;
    for (double eps : g) {
      const double e = oracle_energy(trial_profile(eps), p);
      if (best < 0.0 || e < best_e) {
        best = eps;
        best_e = e;
      }
    }
    return std::pair{best, best_e};
  };
  auto [eps, e] = search(grid);
  bool widened = false;
  if (!(e < kEightPi)) {
    widened = true;
    for (int j = 12; j < 24; ++j) grid.push_back(0.4 * std::pow(0.63, j));
    std::tie(eps, e) = search(grid);
  }
  const double q = charge(from_equivariant(trial_profile(eps), mesh));
  out.push_back(make_check("10 trial bound E(eps*) < 8 pi", (e - kEightPi) / kEightPi, 0.0,
                           fmt({{"eps*", eps}, {"E", e}, {"widened", widened ? 1.0 : 0.0}})));
  out.push_back(make_check("10 trial charge Q = 0", std::abs(q), 1e-6, fmt({{"Q", q}})));
}

void conservation(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p, double t_end,
                  std::mt19937_64& rng, std::vector<CheckResult>& out) {
  std::vector<std::pair<const char*, Field>> starts;
  starts.emplace_back("perturbed hedgehog", sample(mesh, random_smooth_function(rng)));
  starts.emplace_back("trial", from_equivariant(trial_profile(0.3), mesh));
  starts.emplace_back("random Q=0", sample(mesh, random_smooth_function(rng, kE3)));
  EvolveConfig cfg;
  cfg.dt = std::min(1e-3, 0.8 * stability_bound(*mesh));
  cfg.t_end = t_end;
  double de = 0.0, dj = 0.0, dq = 0.0;
  for (auto& [name, m] : starts) {
    const Drift d = trace_drift(evolve(m, cfg, p).trace);
    de = std::max(de, d.energy);
    dj = std::max(dj, d.momentum);
    dq = std::max(dq, d.charge);
  }
  const std::string det = fmt({{"dt", cfg.dt}, {"T", t_end}});
  out.push_back(make_check("11 conservation E", de, 1e-4, det));
  out.push_back(make_check("11 conservation J", dj, 1e-4, det));
  out.push_back(make_check("11 conservation Q", dq, 1e-6, det));
}

void belavin_polyakov(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p, double scale,
                      std::uint64_t seed, std::vector<CheckResult>& out) {
  double worst = -1e300;
  std::string worst_name;
  for (const auto& entry : field_corpus(mesh, seed)) {
    const double deficit = kFourPi * std::abs(charge(entry.field)) - energy(entry.field, p).exchange;
    if (deficit > worst) {
      worst = deficit;
      worst_name = entry.name;
    }
  }
  out.push_back(make_check("12 Belavin-Polyakov bound", worst, 1e-2 * scale,
                           "max of 4 pi |Q| - exchange over the corpus (" + worst_name + ")"));
}

// Free Q = 0 minimizer from the first trial scale that stays in the sector.
std::optional<std::pair<Field, MinimizeReport>> free_q0_minimizer(const std::shared_ptr<const TriMesh>& mesh,
                                                                  double kappa) {
  MinimizeOptions o;
  o.fail_on_max_iterations = false;
  for (double eps : seed_epsilon_grid()) {
    try {
      auto res = minimize_free(from_equivariant(trial_profile(eps), mesh), {kappa}, o);
      if (res.second.converged && std::abs(res.second.Q_final) < 1e-4) return res;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TopologicalSectorChange && e.code() != ErrorCode::IllConditionedTriangle) throw;
    }
  }
  return std::nullopt;
}

void concentration(const std::shared_ptr<const TriMesh>& mesh, std::vector<CheckResult>& out) {
  std::vector<double> areas;
  std::ostringstream det;
  bool all = true;
  for (double kappa : {10.0, 50.0, 200.0}) {
    const auto res = free_q0_minimizer(mesh, kappa);
    if (!res) {
      all = false;
      det << "kappa=" << kappa << ": no Q=0 minimizer; ";
      continue;
    }
    areas.push_back(sublevel_area(res->first, 0.9));
    det << "kappa=" << kappa << " E=" << res->second.E_final << " area=" << areas.back() << "; ";
  }
  double violation = 1.0;
  if (all) {
    violation = std::max(areas[1] - areas[0], areas[2] - areas[1]) / areas[0];
    if (violation == 0.0) violation = 1e-300;
  }
  out.push_back(make_check("13 concentration sweep", violation, 0.0, det.str()));
}

void spinning_certificate(const std::shared_ptr<const TriMesh>& mesh, const EnergyParams& p,
                         std::vector<CheckResult>& out) {
  const Vec3 j0(0.0, 0.0, -4.1 * kPi);
  try {
    const Field seed = seed_field(j0, p, mesh);
    MinimizeOptions o;
    o.fail_on_max_iterations = false;
    auto [m, rep] = minimize_constrained(seed, j0, p, o);
    out.push_back(make_check("14 converged", rep.converged ? 0.0 : 1.0, 0.0,
                             fmt({{"outer", static_cast<double>(rep.outer_iterations)}, {"kkt", rep.kkt_residual}})));
    out.push_back(make_check("14 E < 8 pi", (rep.E_final - kEightPi) / kEightPi, 0.0, fmt({{"E", rep.E_final}})));
    out.push_back(make_check("14 |J - J0|", (rep.J_final - j0).norm(), 1e-4, ""));
    out.push_back(make_check("14 Q = 0", std::abs(rep.Q_final), 1e-4, ""));
    out.push_back(make_check("14 not equivariant", 0.01 - rep.equivariance_defect, 0.0,
                             fmt({{"defect", rep.equivariance_defect}})));
    const SpinningFit fit = spinning_fit(m, p);
    out.push_back(make_check("14 spinning residual", fit.residual_rel, 1e-2,
                             fmt({{"nu_hat", fit.nu_hat}, {"multiplier3", rep.multiplier.z()}})));
    EvolveConfig cfg;
    cfg.dt = std::min(1e-3, 0.8 * stability_bound(*mesh));
    cfg.t_end = 0.1;
    cfg.record_every = 1000000;
    const Field evolved = evolve(m, cfg, p).final_field;
    const Field rotated = rotate_joint(m, axis_rotation(kE3, fit.nu_hat * cfg.t_end));
    out.push_back(make_check("14 rigid rotation tracking", l2_distance(evolved, rotated), 1e-2,
                             "L2 distance at t = 0.1"));
  } catch (const Error& e) {
    out.push_back(make_check("14 spinning certificate", 1.0, 0.0, e.what()));
  }
}

}  // namespace

CheckResult make_check(std::string name, double measured_error, double tolerance, std::string details) {
  CheckResult r{std::move(name), measured_error, tolerance, false, std::move(details)};
  r.passed = measured_error <= tolerance;
  return r;
}

double tolerance_scale(int level) { return level >= 5 ? 1.0 : std::pow(4.0, 5 - level); }

double sublevel_area(const Field& m, double t) {
  const auto& mesh = m.mesh();
  const auto area = mesh.vertex_area();
  return pairwise_sum<double>(m.size(), [&](std::size_t i) { return m[i].dot(mesh.vertex(i)) < t ? area[i] : 0.0; },
                              0.0);
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

SphereFunction random_smooth_function(std::mt19937_64& rng, const Vec3& base) {
  std::uniform_int_distribution<int> degree(1, 3);
  struct Mode {
    Vec3 c;
    std::vector<Vec3> forms;
  };
  std::vector<Mode> modes(3);
  for (auto& mode : modes) {
    mode.c = random_unit(rng);
    const int d = degree(rng);
    for (int k = 0; k < d; ++k) mode.forms.push_back(random_unit(rng));
  }
  return [modes, base](const Vec3& y) {
    Vec3 v = base.isZero() ? Vec3(y.normalized()) : base;
    for (const auto& mode : modes) {
      double pv = 1.0;
      for (const auto& a : mode.forms) pv *= a.dot(y);
      v += 0.25 * pv * mode.c;
    }
    return Vec3(v.normalized());
  };
}

VertexVectors random_tangent_field(const Field& m, std::mt19937_64& rng) {
  const SphereFunction f = random_smooth_function(rng, random_unit(rng));
  VertexVectors v(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = f(m.mesh().vertex(i));
  return tangent_project(m, v);
}

std::vector<CorpusEntry> field_corpus(std::shared_ptr<const TriMesh> mesh, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusEntry> c;
  c.push_back({"hedgehog +", hedgehog(1, mesh), 1.0});
  c.push_back({"hedgehog -", hedgehog(-1, mesh), -1.0});
  c.push_back({"constant e3", constant_field(kE3, mesh), 0.0});
  c.push_back({"trial eps=0.2", from_equivariant(trial_profile(0.2), mesh), 0.0});
  c.push_back({"equivariant k=2", from_equivariant(smooth_profile(2, 0.0, kPi, {0.2}, {}), mesh), 2.0});
  c.push_back({"equivariant k=-1", from_equivariant(smooth_profile(-1, 0.0, kPi, {-0.3}, {0.5}), mesh), -1.0});
  c.push_back({"equivariant k=1 p=1", from_equivariant(smooth_profile(1, 0.0, 0.0, {0.8}, {}), mesh), 0.0});
  c.push_back({"random around nu", Field::from_function(mesh, random_smooth_function(rng)), 1.0});
  c.push_back({"random around e3", Field::from_function(mesh, random_smooth_function(rng, kE3)), 0.0});
  return c;
}

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
  if (opts.level < 3 || opts.level > 6) throw Error(ErrorCode::LevelOutOfRange, "suite level must be in [3, 6]");
  const EnergyParams p{opts.kappa};
  validate(p);
  const auto mesh = TriMesh::icosphere(opts.level);
  const double scale = tolerance_scale(opts.level);
  std::mt19937_64 rng(opts.seed);
  std::vector<CheckResult> out;
  auto guarded = [&](const char* group, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      out.push_back(make_check(group, 1.0, 0.0, e.what()));
    }
  };
  guarded("01 chart identities", [&] { chart_identities(*mesh, rng, out); });
  guarded("02 frame indifference", [&] { frame_indifference(mesh, p, scale, rng, out); });
  guarded("03 first variations", [&] { first_variations(mesh, p, rng, out); });
  guarded("04 generator flows", [&] { generator_flows(mesh, scale, rng, out); });
  guarded("05 commutation", [&] { commutation(mesh, scale, rng, out); });
  guarded("06 equivariant J3", [&] { equivariant_j3(mesh, scale, out); });
  guarded("07 elliptical distortion", [&] { elliptical(mesh, scale, out); });
  guarded("08 hedgehog J3 local max", [&] { hedgehog_local_max(mesh, scale, out); });
  guarded("09 moving-frame split", [&] { frame_split(mesh, p, scale, out); });
  guarded("10 trial bound", [&] { trial_bound(mesh, p, out); });
  guarded("11 conservation", [&] { conservation(mesh, p, opts.conservation_t_end, rng, out); });
  guarded("12 Belavin-Polyakov", [&] { belavin_polyakov(mesh, p, scale, opts.seed, out); });
  guarded("13 concentration", [&] { concentration(mesh, out); });
  if (opts.level >= 4) {
    guarded("14 spinning certificate", [&] { spinning_certificate(mesh, p, out); });
  } else {
    CheckResult skipped = make_check("14 spinning certificate", 0.0, 0.0, "skipped: mesh under-resolved below level 4");
    out.push_back(skipped);
  }
  return out;
}

std::vector<CheckResult> run_suite(int level, double kappa, std::uint64_t seed) {
  SuiteOptions o;
  o.level = level;
  o.kappa = kappa;
  o.seed = seed;
  return run_suite(o);
}

}  // namespace spherosim
