#include "spherosim/functionals.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spherosim/error.hpp"
#include "spherosim/parallel.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;

const Vec3& axis_vector(int axis) {
  switch (axis) {
    case 1: return kE1;
    case 2: return kE2;
    case 3: return kE3;
    default: throw Error(ErrorCode::InvalidArgument, "axis must be 1, 2 or 3");
  }
}

// d Omega / d a for unit a, b, c (already tangent to a by degree-0 homogeneity).
Vec3 solid_angle_gradient(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 bxc = b.cross(c);
  const double num = a.dot(bxc);
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  const double scale = 2.0 / (num * num + den * den);
  return scale * (den * bxc - num * ((1.0 + b.dot(c)) * a + b + c));
}

}  // namespace

void validate(const EnergyParams& p) {
  if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) {
    throw Error(ErrorCode::InvalidArgument, "kappa must be positive and finite");
  }
}

double l2_inner(const TriMesh& mesh, std::span<const Vec3> a, std::span<const Vec3> b) {
  const auto area = mesh.vertex_area();
  return pairwise_sum<double>(a.size(), [&](std::size_t i) { return area[i] * a[i].dot(b[i]); }, 0.0);
}

double l2_norm(const TriMesh& mesh, std::span<const Vec3> a) { return std::sqrt(l2_inner(mesh, a, a)); }

VertexVectors tangent_project(const Field& m, std::span<const Vec3> g) {
  VertexVectors out(g.size());
  parallel_for(g.size(), [&](std::size_t i) { out[i] = g[i] - g[i].dot(m[i]) * m[i]; });
  return out;
}

EnergyParts energy(const Field& m, const EnergyParams& p) {
  const auto& mesh = m.mesh();
  const auto edges = mesh.edges();
  const auto area = mesh.vertex_area();
  EnergyParts e;
  e.exchange = 0.5 * pairwise_sum<double>(edges.size(), [&](std::size_t k) {
    const auto& ed = edges[k];
    return ed.cotan_weight * (m[static_cast<std::size_t>(ed.i)] - m[static_cast<std::size_t>(ed.j)]).squaredNorm();
  }, 0.0);
  e.anisotropy = 0.5 * p.kappa * pairwise_sum<double>(m.size(), [&](std::size_t i) {
    const double c = m[i].dot(mesh.vertex(i));
    return area[i] * (1.0 - c * c);
  }, 0.0);
  e.total = e.exchange + e.anisotropy;
  return e;
}

std::vector<double> image_solid_angles(const Field& m) {
  const auto tris = m.mesh().triangles();
  std::vector<double> omega(tris.size());
  parallel_for(tris.size(), [&](std::size_t t) {
    const auto& tri = tris[t];
    omega[t] = solid_angle(m[tri[0]], m[tri[1]], m[tri[2]]);
  });
  for (std::size_t t = 0; t < omega.size(); ++t) {
    if (std::abs(omega[t]) > kPi) {
      throw Error(ErrorCode::IllConditionedTriangle,
                  "image of triangle " + std::to_string(t) + " subtends more than pi (under-resolved field)");
    }
  }
  return omega;
}

double charge(const Field& m) {
  const auto omega = image_solid_angles(m);
  return pairwise_sum<double>(omega.size(), [&](std::size_t t) { return omega[t]; }, 0.0) / (4.0 * kPi);
}

double vorticity_integral(const Field& m, const std::function<double(ChartPoint)>& w) {
  const auto omega = image_solid_angles(m);
  const auto& mesh = m.mesh();
  return pairwise_sum<double>(omega.size(), [&](std::size_t t) {
    return omega[t] * w(sphere_to_stereo(mesh.triangle_centroid(t)));
  }, 0.0);
}

Vec3 spin_momentum(const Field& m) {
  const auto area = m.mesh().vertex_area();
  return pairwise_sum<Vec3>(m.size(), [&](std::size_t i) -> Vec3 { return area[i] * m[i]; }, Vec3::Zero());
}

Vec3 orbital_momentum(const Field& m) {
  const auto omega = image_solid_angles(m);
  const auto& mesh = m.mesh();
  return pairwise_sum<Vec3>(omega.size(), [&](std::size_t t) -> Vec3 {
    return omega[t] * mesh.triangle_centroid(t);
  }, Vec3::Zero());
}

double orbital_momentum3_chart(const Field& m) {
  const double q = charge(m);
  return 4.0 * kPi * q - vorticity_integral(m, [](ChartPoint x) {
    return conformal_factor(x) * x.radius_sq();
  });
}

Vec3 angular_momentum(const Field& m) { return spin_momentum(m) + orbital_momentum(m); }

Diagnostics diagnose(const Field& m, const EnergyParams& p) {
  Diagnostics d;
  const auto e = energy(m, p);
  d.exchange = e.exchange;
  d.anisotropy = e.anisotropy;
  d.total = e.total;
  const auto omega = image_solid_angles(m);
  const auto& mesh = m.mesh();
  d.Q = pairwise_sum<double>(omega.size(), [&](std::size_t t) { return omega[t]; }, 0.0) / (4.0 * kPi);
  d.L = pairwise_sum<Vec3>(omega.size(), [&](std::size_t t) -> Vec3 {
    return omega[t] * mesh.triangle_centroid(t);
  }, Vec3::Zero());
  d.S = spin_momentum(m);
  d.J = d.S + d.L;
  return d;
}

VertexVectors laplace_beltrami(const TriMesh& mesh, std::span<const Vec3> v) {
  VertexVectors out(v.size());
  const auto area = mesh.vertex_area();
  parallel_for(v.size(), [&](std::size_t i) {
    const auto nb = mesh.neighbors(i);
    const auto w = mesh.neighbor_weights(i);
    Vec3 acc = Vec3::Zero();
    for (std::size_t k = 0; k < nb.size(); ++k) acc += w[k] * (v[static_cast<std::size_t>(nb[k])] - v[i]);
    out[i] = acc / area[i];
  });
  return out;
}

VertexVectors grad_energy(const TriMesh& mesh, std::span<const Vec3> values, const EnergyParams& p) {
  VertexVectors g = laplace_beltrami(mesh, values);
  parallel_for(g.size(), [&](std::size_t i) {
    const Vec3& nu = mesh.vertex(i);
    g[i] = -(g[i] + p.kappa * values[i].dot(nu) * nu);
  });
  return g;
}

VertexVectors grad_energy(const Field& m, const EnergyParams& p) {
  return grad_energy(m.mesh(), m.values(), p);
}

VertexVectors grad_S(int axis, const TriMesh& mesh) {
  return VertexVectors(mesh.vertex_count(), axis_vector(axis));
}

std::array<VertexVectors, 3> grad_L_all(const Field& m, bool full_variation) {
  const auto& mesh = m.mesh();
  const auto tris = mesh.triangles();
  // Per-triangle solid-angle gradients for each corner.
  std::vector<std::array<Vec3, 3>> dtri(tris.size());
  std::vector<double> half_det;
  if (full_variation) half_det.resize(tris.size());
  parallel_for(tris.size(), [&](std::size_t t) {
    const Vec3 &a = m[tris[t][0]], &b = m[tris[t][1]], &c = m[tris[t][2]];
    dtri[t] = {solid_angle_gradient(a, b, c), solid_angle_gradient(b, c, a), solid_angle_gradient(c, a, b)};
    if (full_variation) half_det[t] = 0.5 * a.dot(b.cross(c));
  });
  std::array<VertexVectors, 3> g;
  for (auto& v : g) v.assign(m.size(), Vec3::Zero());
  const auto area = mesh.vertex_area();
  parallel_for(m.size(), [&](std::size_t i) {
    Mat3 acc = Mat3::Zero();  // column a: gradient of L_a
    Vec3 normal = Vec3::Zero();
    for (int t : mesh.vertex_triangles(i)) {
      const auto ts = static_cast<std::size_t>(t);
      const auto& tri = tris[ts];
      const int corner = tri[0] == static_cast<int>(i) ? 0 : (tri[1] == static_cast<int>(i) ? 1 : 2);
      const Vec3& nu_c = mesh.triangle_centroid(ts);
      acc += dtri[ts][static_cast<std::size_t>(corner)] * nu_c.transpose();
      if (full_variation) normal -= (Vec3::Ones() - nu_c) * half_det[ts];
    }
    for (int a = 0; a < 3; ++a) {
      g[static_cast<std::size_t>(a)][i] = acc.col(a) / area[i];
      if (full_variation) g[static_cast<std::size_t>(a)][i] += normal[a] / area[i] * m[i];
    }
  });
  return g;
}

VertexVectors grad_L(int axis, const Field& m, bool full_variation) {
  axis_vector(axis);
  return std::move(grad_L_all(m, full_variation)[static_cast<std::size_t>(axis - 1)]);
}

VertexVectors grad_L3(const Field& m, bool full_variation) { return grad_L(3, m, full_variation); }

VertexVectors grad_L3_continuum(const Field& m) {
  VertexVectors d = azimuthal_derivative(m, kE3);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = -m[i].cross(d[i]);
  return d;
}

double orbital_momentum3_cubic(const Field& m, std::span<const Vec3> values, double q0) {
  const auto& mesh = m.mesh();
  const auto tris = mesh.triangles();
  const double moment = pairwise_sum<double>(tris.size(), [&](std::size_t t) {
    const auto& tri = tris[t];
    const double det = values[static_cast<std::size_t>(tri[0])].dot(
        values[static_cast<std::size_t>(tri[1])].cross(values[static_cast<std::size_t>(tri[2])]));
    return (1.0 - mesh.triangle_centroid(t).z()) * 0.5 * det;
  }, 0.0);
  return 4.0 * kPi * q0 - moment;
}

double poisson_bracket(std::span<const Vec3> grad_f, std::span<const Vec3> grad_g, const Field& m) {
  const auto area = m.mesh().vertex_area();
  return pairwise_sum<double>(m.size(), [&](std::size_t i) {
    return area[i] * m[i].dot(grad_f[i].cross(grad_g[i]));
  }, 0.0);
}

VertexVectors generator_J3(const Field& m, const Vec3& axis) {
  const Vec3 e = axis.normalized();
  VertexVectors d = azimuthal_derivative(m, e);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = e.cross(m[i]) - d[i];
  return d;
}

double axis_equivariance_defect(const Field& m, const Vec3& axis, const VertexJacobian& jac,
                                double grad_norm) {
  const auto& mesh = m.mesh();
  const auto area = mesh.vertex_area();
  const Vec3 e = axis.normalized();
  const double sq = pairwise_sum<double>(m.size(), [&](std::size_t i) {
    const Vec3 t = e.cross(mesh.vertex(i));
    const Vec3 d = t.norm() < 1e-8 ? Vec3::Zero() : jac.along(mesh, i, t);
    return area[i] * (e.cross(m[i]) - d).squaredNorm();
  }, 0.0);
  return std::sqrt(sq) / grad_norm;
}

FrameEnergy frame_energy(const FrameField& u, const EnergyParams& p) {
  if (u.tail_defect() > 1e-6) {
    throw Error(ErrorCode::UnsupportedTail, "frame field must equal e3 at the support radius");
  }
  const double dchi = 2.0 * kPi / u.n_chi();
  double e0 = 0.0, e1 = 0.0;
  for (int i = 0; i < u.n_r(); ++i) {
    const double r = u.r_node(i);
    const double lam = 2.0 / (1.0 + r * r);
    double row0 = 0.0, row1 = 0.0;
    for (int j = 0; j < u.n_chi(); ++j) {
      const double chi = u.chi_node(j);
      const double c = std::cos(chi), s = std::sin(chi);
      const Vec3& v = u.u(i, j);
      const Vec3 dr = u.du_dr(i, j);
      const Vec3 dc = u.du_dchi(i, j);
      const Vec3 d1 = c * dr - (s / r) * dc;
      const Vec3 d2 = s * dr + (c / r) * dc;
      const double grad_sq = d1.squaredNorm() + d2.squaredNorm();
      const double div = d1.x() + d2.y();
      const double adv = v.x() * d1.z() + v.y() * d2.z();
      const double u3sq = v.z() * v.z();
      const double cross_chi = v.x() * dc.y() - v.y() * dc.x();
      const double x_dot_u = r * (c * v.x() + s * v.y());
      row0 += 0.5 * grad_sq + (v.z() * div - adv) * lam + 0.5 * p.kappa * (1.0 - u3sq) * lam * lam;
      row1 += ((1.0 - u3sq) - cross_chi) * lam + (u3sq - x_dot_u * v.z()) * lam * lam;
    }
    e0 += u.r_weight(i) * r * dchi * row0;
    e1 += u.r_weight(i) * r * dchi * row1;
  }
  const double big_r = u.support_radius();
  e1 += 4.0 * kPi / (1.0 + big_r * big_r);
  return {e0, e1, e0 + e1};
}

double elliptical_hessian_rhs(const Field& m, double defect_tol) {
  const double grad_norm = std::sqrt(2.0 * energy(m, {1.0}).exchange);
  if (grad_norm > 1e-12) {
    const double defect = axis_equivariance_defect(m, kE3, vertex_jacobian(m), grad_norm);
    if (defect > defect_tol) {
      throw Error(ErrorCode::NotEquivariant,
                  "field is not equivariant about e3 (defect " + std::to_string(defect) + ")");
    }
  }
  return -0.5 * vorticity_integral(m, [](ChartPoint x) {
    const double lam = conformal_factor(x);
    return x.radius_sq() * lam * lam;
  });
}

}  // namespace spherosim
