#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "spherosim/geometry.hpp"
#include "spherosim/profile.hpp"

namespace spherosim {

using VertexVectors = std::vector<Vec3>;
using SphereFunction = std::function<Vec3(const Vec3&)>;

/// Discretized magnetization: one unit vector per mesh vertex.
class Field {
 public:
  /// Validates unit length (1e-10) and finiteness.
  Field(std::shared_ptr<const TriMesh> mesh, VertexVectors values);

  /// Samples f at every vertex and normalizes.
  static Field from_function(std::shared_ptr<const TriMesh> mesh, const SphereFunction& f);

  const TriMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
  std::span<const Vec3> values() const { return values_; }
  const Vec3& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

 private:
  std::shared_ptr<const TriMesh> mesh_;
  VertexVectors values_;
};

/// m = sign * nu.
Field hedgehog(int sign, std::shared_ptr<const TriMesh> mesh);

/// m = d everywhere; throws NonUnitDirection unless |d| = 1 within 1e-10.
Field constant_field(const Vec3& d, std::shared_ptr<const TriMesh> mesh);

/// Samples an equivariant profile (either flavor) at the vertices.
Field from_equivariant(const EquivariantProfile& p, std::shared_ptr<const TriMesh> mesh);

/// Normalized gnomonic-barycentric blend of the containing triangle's values.
/// Throws DegenerateBlend when the blend has norm < 1e-6.
Vec3 interpolate(const Field& m, const Vec3& y);

/// m_R(y) = R m(R^T y); throws NotARotation unless R in SO(3) to 1e-10.
Field rotate_joint(const Field& m, const Mat3& r);

/// Exact joint rotation of an analytic field.
SphereFunction rotate_joint(SphereFunction f, const Mat3& r);

/// m_s(x) = m(s x1, x2) in the north-pole chart; the south pole keeps its value.
Field elliptical_distort(const Field& m, double s);

/// Analytic counterpart of elliptical_distort.
SphereFunction elliptical_distort(SphereFunction f, double s);

/// Directional derivative of m along e x y at every vertex (derivative along
/// the rotation orbit about `axis`), tangent to m. Zero where |e x y| < 1e-8.
VertexVectors azimuthal_derivative(const Field& m, const Vec3& axis = kE3);

/// Per-vertex tangent derivatives of m (see TriMesh::tangent_derivatives),
/// projected to the tangent plane of m.
struct VertexJacobian {
  std::vector<std::pair<Vec3, Vec3>> d;  // (d m / d t1, d m / d t2)
  /// Derivative along an arbitrary tangent direction v at vertex i.
  Vec3 along(const TriMesh& mesh, std::size_t i, const Vec3& v) const;
};
VertexJacobian vertex_jacobian(const Field& m);

/// Moving-frame components u on a polar chart grid: composite Gauss-Legendre
/// nodes in r on [0, support radius], uniform periodic nodes in chi.
/// u = e3 (m = nu) outside the support radius.
class FrameField {
 public:
  using ChartFunction = std::function<Vec3(ChartPoint)>;

  /// Samples u at the grid nodes. `breakpoints` must start at 0 and end at
  /// the support radius; nodes are placed per panel.
  static FrameField sample(const ChartFunction& u, std::vector<double> breakpoints,
                           int nodes_per_panel = 12, int n_chi = 32);

  /// Grid adapted to a frame profile (graded towards its core scale).
  static FrameField from_profile(const EquivariantProfile& frame, int nodes_per_panel = 12,
                                 int n_chi = 32);

  double support_radius() const { return breakpoints_.back(); }
  int n_r() const { return static_cast<int>(r_nodes_.size()); }
  int n_chi() const { return n_chi_; }
  double r_node(int i) const { return r_nodes_[static_cast<std::size_t>(i)]; }
  double r_weight(int i) const { return r_weights_[static_cast<std::size_t>(i)]; }
  double chi_node(int j) const;
  const Vec3& u(int i, int j) const { return values_[index(i, j)]; }

  /// du/dr and du/dchi at a node (panel-local polynomial / Fourier differentiation).
  Vec3 du_dr(int i, int j) const;
  Vec3 du_dchi(int i, int j) const;

  /// Interpolated u (normalized) at any chart point; e3 beyond the support.
  Vec3 evaluate(ChartPoint x) const;

  /// Polynomial extrapolation of u to r = support radius, maximum over chi of |u - e3|.
  double tail_defect() const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_chi_) + static_cast<std::size_t>(j);
  }
  int panel_of(int i) const { return i / nodes_per_panel_; }
  Vec3 radial_interp(int j, double r) const;

  std::vector<double> breakpoints_;
  int nodes_per_panel_ = 0;
  int n_chi_ = 0;
  std::vector<double> r_nodes_, r_weights_;
  std::vector<Vec3> values_;
  std::vector<double> gl_nodes_;  // reference nodes on [-1, 1]
  std::vector<double> bary_;      // barycentric weights of gl_nodes_
  Eigen::MatrixXd diff_;          // reference differentiation matrix
};

/// m = u1 tau1 + u2 tau2 + u3 nu at every vertex; m = nu beyond the support.
Field frame_assemble(const FrameField& u, std::shared_ptr<const TriMesh> mesh);

/// Analytic field of a frame profile (exact evaluation, no grid).
SphereFunction profile_function(const EquivariantProfile& p);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace spherosim
