#include "spherosim/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spherosim/error.hpp"
#include "spherosim/parallel.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_south_pole(const Vec3& y) { return (y + kE3).norm() < 1e-12; }

}  // namespace

Field::Field(std::shared_ptr<const TriMesh> mesh, VertexVectors values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (!mesh_ || values_.size() != mesh_->vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "field size does not match mesh");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Vec3& v = values_[i];
    if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-10) {
      throw Error(ErrorCode::InvalidArgument,
                  "field value at vertex " + std::to_string(i) + " is not a unit vector");
    }
  }
}

Field Field::from_function(std::shared_ptr<const TriMesh> mesh, const SphereFunction& f) {
  VertexVectors v(mesh->vertex_count());
  parallel_for(v.size(), [&](std::size_t i) { v[i] = f(mesh->vertex(i)).normalized(); });
  return Field(std::move(mesh), std::move(v));
}

Field hedgehog(int sign, std::shared_ptr<const TriMesh> mesh) {
  const double s = sign >= 0 ? 1.0 : -1.0;
  VertexVectors v(mesh->vertex_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * mesh->vertex(i);
  return Field(std::move(mesh), std::move(v));
}

Field constant_field(const Vec3& d, std::shared_ptr<const TriMesh> mesh) {
  if (!d.allFinite() || std::abs(d.norm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::NonUnitDirection, "constant field direction must be a unit vector");
  }
  return Field(mesh, VertexVectors(mesh->vertex_count(), d.normalized()));
}

Field from_equivariant(const EquivariantProfile& p, std::shared_ptr<const TriMesh> mesh) {
  return Field::from_function(mesh, profile_function(p));
}

SphereFunction profile_function(const EquivariantProfile& p) {
  return [p](const Vec3& y) { return evaluate_profile(p, y); };
}

Vec3 interpolate(const Field& m, const Vec3& y) {
  const auto loc = m.mesh().locate(y);
  const auto& tri = m.mesh().triangles()[static_cast<std::size_t>(loc.triangle)];
  const Vec3 blend =
      loc.weights[0] * m[tri[0]] + loc.weights[1] * m[tri[1]] + loc.weights[2] * m[tri[2]];
  const double n = blend.norm();
  if (n < 1e-6) throw Error(ErrorCode::DegenerateBlend, "interpolated vector has vanishing norm");
  return blend / n;
}

Field rotate_joint(const Field& m, const Mat3& r) {
  if (!is_rotation(r)) throw Error(ErrorCode::NotARotation, "matrix is not in SO(3)");
  const auto& mesh = m.mesh();
  const Mat3 rt = r.transpose();
  VertexVectors v(m.size());
  parallel_for(v.size(), [&](std::size_t i) {
    v[i] = (r * interpolate(m, rt * mesh.vertex(i))).normalized();
  });
  return Field(m.mesh_ptr(), std::move(v));
}

SphereFunction rotate_joint(SphereFunction f, const Mat3& r) {
  if (!is_rotation(r)) throw Error(ErrorCode::NotARotation, "matrix is not in SO(3)");
  return [f = std::move(f), r](const Vec3& y) -> Vec3 { return r * f(r.transpose() * y); };
}

namespace {

Vec3 distorted_point(const Vec3& y, double s) {
  const ChartPoint x = sphere_to_stereo(y);
  return stereo_to_sphere({s * x.x1, x.x2});
}

}  // namespace

Field elliptical_distort(const Field& m, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "distortion factor must be positive");
  const auto& mesh = m.mesh();
  VertexVectors v(m.size());
  parallel_for(v.size(), [&](std::size_t i) {
    const Vec3& y = mesh.vertex(i);
    v[i] = is_south_pole(y) ? m[i] : interpolate(m, distorted_point(y, s));
  });
  return Field(m.mesh_ptr(), std::move(v));
}

SphereFunction elliptical_distort(SphereFunction f, double s) {
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "distortion factor must be positive");
  return [f = std::move(f), s](const Vec3& y) -> Vec3 {
    return is_south_pole(y) ? f(y) : f(distorted_point(y, s));
  };
}

Vec3 VertexJacobian::along(const TriMesh& mesh, std::size_t i, const Vec3& v) const {
  const auto& [t1, t2] = mesh.tangent_basis(i);
  return v.dot(t1) * d[i].first + v.dot(t2) * d[i].second;
}

VertexJacobian vertex_jacobian(const Field& m) {
  const auto& mesh = m.mesh();
  VertexJacobian jac;
  jac.d.resize(m.size());
  parallel_for(m.size(), [&](std::size_t i) {
    auto [d1, d2] = mesh.tangent_derivatives(i, m.values());
    const Vec3& mi = m[i];
    jac.d[i] = {d1 - d1.dot(mi) * mi, d2 - d2.dot(mi) * mi};
  });
  return jac;
}

VertexVectors azimuthal_derivative(const Field& m, const Vec3& axis) {
  const auto& mesh = m.mesh();
  const Vec3 e = axis.normalized();
  const VertexJacobian jac = vertex_jacobian(m);
  VertexVectors out(m.size());
  parallel_for(m.size(), [&](std::size_t i) {
    const Vec3 t = e.cross(mesh.vertex(i));
    out[i] = t.norm() < 1e-8 ? Vec3::Zero() : jac.along(mesh, i, t);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Frame fields on the polar chart grid.

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

std::vector<double> barycentric_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 1.0);
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = 0; b < x.size(); ++b) {
      if (a != b) w[a] /= (x[a] - x[b]);
    }
  }
  return w;
}

}  // namespace

FrameField FrameField::sample(const ChartFunction& u, std::vector<double> breakpoints,
                              int nodes_per_panel, int n_chi) {
  if (breakpoints.size() < 2 || breakpoints.front() != 0.0 ||
      !std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw Error(ErrorCode::InvalidArgument, "frame grid breakpoints must start at 0 and increase");
  }
  if (nodes_per_panel < 2 || n_chi < 4 || n_chi % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "frame grid needs >= 2 radial nodes and even n_chi >= 4");
  }
  FrameField f;
  f.breakpoints_ = std::move(breakpoints);
  f.nodes_per_panel_ = nodes_per_panel;
  f.n_chi_ = n_chi;
  std::vector<double> w;
  gauss_legendre(nodes_per_panel, f.gl_nodes_, w);
  f.bary_ = barycentric_weights(f.gl_nodes_);
  const auto& bw = f.bary_;
  const auto p = static_cast<std::size_t>(nodes_per_panel);
  f.diff_ = Eigen::MatrixXd::Zero(nodes_per_panel, nodes_per_panel);
  for (std::size_t a = 0; a < p; ++a) {
    double diag = 0.0;
    for (std::size_t b = 0; b < p; ++b) {
      if (a == b) continue;
      const double v = (bw[b] / bw[a]) / (f.gl_nodes_[a] - f.gl_nodes_[b]);
      f.diff_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      diag -= v;
    }
    f.diff_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = diag;
  }
  for (std::size_t k = 0; k + 1 < f.breakpoints_.size(); ++k) {
    const double lo = f.breakpoints_[k], hi = f.breakpoints_[k + 1];
    for (std::size_t a = 0; a < p; ++a) {
      f.r_nodes_.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * f.gl_nodes_[a]);
      f.r_weights_.push_back(0.5 * (hi - lo) * w[a]);
    }
  }
  f.values_.resize(f.r_nodes_.size() * static_cast<std::size_t>(n_chi));
  for (int i = 0; i < f.n_r(); ++i) {
    for (int j = 0; j < n_chi; ++j) {
      const double r = f.r_nodes_[static_cast<std::size_t>(i)];
      const double chi = f.chi_node(j);
      f.values_[f.index(i, j)] = u({r * std::cos(chi), r * std::sin(chi)}).normalized();
    }
  }
  return f;
}

FrameField FrameField::from_profile(const EquivariantProfile& frame, int nodes_per_panel, int n_chi) {
  if (frame.flavor != ProfileFlavor::Frame || !std::isfinite(frame.tail_start)) {
    throw Error(ErrorCode::InvalidArgument, "frame grid needs a frame profile with compact support");
  }
  std::vector<double> bp{0.0};
  const double first = frame.breakpoints.empty() ? frame.tail_start : frame.breakpoints.front();
  for (double t = frame.core_scale / 64.0; t < first; t *= std::sqrt(2.0)) {
    if (t > bp.back()) bp.push_back(t);
  }
  for (double b : frame.breakpoints) {
    if (b > bp.back() && b < frame.tail_start) {
      // Split long smooth panels once.
      const double prev = bp.back();
      if (b - prev > 0.25) bp.push_back(0.5 * (prev + b));
      bp.push_back(b);
    }
  }
  if (frame.tail_start - bp.back() > 0.25) bp.push_back(0.5 * (bp.back() + frame.tail_start));
  bp.push_back(frame.tail_start);
  return sample([frame](ChartPoint x) {
    return frame_components(frame, x.radius(), std::atan2(x.x2, x.x1));
  }, std::move(bp), nodes_per_panel, n_chi);
}

double FrameField::chi_node(int j) const { return 2.0 * kPi * j / n_chi_; }

Vec3 FrameField::du_dr(int i, int j) const {
  const int k = panel_of(i);
  const int a = i % nodes_per_panel_;
  const double scale = 2.0 / (breakpoints_[static_cast<std::size_t>(k + 1)] - breakpoints_[static_cast<std::size_t>(k)]);
  Vec3 d = Vec3::Zero();
  for (int b = 0; b < nodes_per_panel_; ++b) d += diff_(a, b) * u(k * nodes_per_panel_ + b, j);
  return scale * d;
}

Vec3 FrameField::du_dchi(int i, int j) const {
  // Periodic spectral differentiation (even n).
  const double h = 2.0 * kPi / n_chi_;
  Vec3 d = Vec3::Zero();
  for (int l = 0; l < n_chi_; ++l) {
    if (l == j) continue;
    const int diff = j - l;
    const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
    d += 0.5 * sign / std::tan(0.5 * diff * h) * u(i, l);
  }
  return d;
}

Vec3 FrameField::radial_interp(int j, double r) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), r);
  int k = static_cast<int>(it - breakpoints_.begin()) - 1;
  k = std::clamp(k, 0, static_cast<int>(breakpoints_.size()) - 2);
  const double lo = breakpoints_[static_cast<std::size_t>(k)], hi = breakpoints_[static_cast<std::size_t>(k + 1)];
  const double t = (2.0 * r - lo - hi) / (hi - lo);
  const auto& bw = bary_;
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (int b = 0; b < nodes_per_panel_; ++b) {
    const double dt = t - gl_nodes_[static_cast<std::size_t>(b)];
    if (dt == 0.0) return u(k * nodes_per_panel_ + b, j);
    const double c = bw[static_cast<std::size_t>(b)] / dt;
    num += c * u(k * nodes_per_panel_ + b, j);
    den += c;
  }
  return num / den;
}

Vec3 FrameField::evaluate(ChartPoint x) const {
  const double r = x.radius();
  if (r >= support_radius()) return kE3;
  const double chi = std::atan2(x.x2, x.x1);
  Vec3 acc = Vec3::Zero();
  for (int j = 0; j < n_chi_; ++j) {
    const double t = chi - chi_node(j);
    const double st = std::sin(0.5 * t);
    double s = 1.0;
    if (std::abs(st) > 1e-14) s = std::sin(0.5 * n_chi_ * t) / (n_chi_ * std::tan(0.5 * t));
    if (s != 0.0) acc += s * radial_interp(j, r);
  }
  return acc.normalized();
}

double FrameField::tail_defect() const {
  double worst = 0.0;
  for (int j = 0; j < n_chi_; ++j) {
    worst = std::max(worst, (radial_interp(j, support_radius()) - kE3).norm());
  }
  return worst;
}

Field frame_assemble(const FrameField& u, std::shared_ptr<const TriMesh> mesh) {
  VertexVectors v(mesh->vertex_count());
  parallel_for(v.size(), [&](std::size_t i) {
    const Vec3& y = mesh->vertex(i);
    if (is_south_pole(y)) {
      v[i] = y;
      return;
    }
    const ChartPoint x = sphere_to_stereo(y);
    if (x.radius() >= u.support_radius()) {
      v[i] = y;
      return;
    }
    const Vec3 c = u.evaluate(x);
    auto [t1, t2] = chart_frame(x);
    v[i] = (c.x() * t1 + c.y() * t2 + c.z() * y).normalized();
  });
  return Field(std::move(mesh), std::move(v));
}

}  // namespace spherosim
