#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace spherosim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kE1{1.0, 0.0, 0.0};
inline const Vec3 kE2{0.0, 1.0, 0.0};
inline const Vec3 kE3{0.0, 0.0, 1.0};

/// Point of the north-pole stereographic chart. Covers the sphere minus -e3.
struct ChartPoint {
  double x1 = 0.0;
  double x2 = 0.0;

  double radius_sq() const { return x1 * x1 + x2 * x2; }
  double radius() const;
};

/// Phi(x) = lambda(x) (x1, x2, (1 - |x|^2) / 2).
Vec3 stereo_to_sphere(ChartPoint x);

/// Inverse chart. Throws SouthPoleSingularity within 1e-10 of -e3.
ChartPoint sphere_to_stereo(const Vec3& y);

/// lambda(x) = 2 / (1 + |x|^2).
double conformal_factor(ChartPoint x);

/// Partial derivatives dPhi/dx1, dPhi/dx2 (each of length lambda).
std::pair<Vec3, Vec3> chart_jacobian(ChartPoint x);

/// Unit coordinate fields tau1, tau2 of the chart, so {tau1, tau2, nu} is a
/// positively oriented orthonormal frame.
std::pair<Vec3, Vec3> chart_frame(ChartPoint x);

/// Signed solid angle of the spherical triangle (a, b, c), Oosterom-Strackee
/// form. Homogeneous of degree zero in each argument.
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

/// Rotation by `angle` about the unit vector `axis` (right-handed).
Mat3 axis_rotation(const Vec3& axis, double angle);

/// Checks orthogonality and det = +1 to `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-10);

struct MeshEdge {
  int i = 0;
  int j = 0;
  double cotan_weight = 0.0;
};

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> weights{};  // gnomonic barycentric, sum to 1
};

/// Oriented geodesic triangulation of the unit sphere with lumped vertex
/// areas (spherical, partitioning exactly 4 pi) and cotangent edge weights.
/// Immutable after construction.
class TriMesh {
 public:
  /// Icosahedron with vertices at both poles, subdivided `level` times.
  /// The xz-plane is a mirror plane of every level.
  static std::shared_ptr<const TriMesh> icosphere(int level);

  int level() const { return level_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  std::span<const Vec3> vertices() const { return vertices_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  std::span<const double> vertex_area() const { return vertex_area_; }
  std::span<const MeshEdge> edges() const { return edges_; }

  /// Normalized centroid of mesh triangle t.
  const Vec3& triangle_centroid(std::size_t t) const { return centroids_[t]; }

  /// CSR adjacency of the cotan Laplacian.
  std::span<const int> neighbors(std::size_t i) const;
  std::span<const double> neighbor_weights(std::size_t i) const;

  /// Triangles incident to vertex i.
  std::span<const int> vertex_triangles(std::size_t i) const;

  /// Vertices at graph distance 1 or 2 from i.
  std::span<const int> two_ring(std::size_t i) const;

  double min_edge_length() const { return min_edge_; }
  double mean_edge_length() const { return mean_edge_; }

  /// Index of the vertex at +e3 / -e3.
  int north_pole() const { return 0; }
  int south_pole() const { return 1; }

  /// Orthonormal tangent basis (t1, t2) at vertex i with t1 x t2 = y_i.
  const std::pair<Vec3, Vec3>& tangent_basis(std::size_t i) const { return tangent_basis_[i]; }

  /// Tangent derivatives (d/dt1, d/dt2) of a per-vertex vector field at vertex
  /// i from a cubic least-squares fit over the 2-ring (gnomonic coordinates).
  std::pair<Vec3, Vec3> tangent_derivatives(std::size_t i, std::span<const Vec3> values) const;

  /// Spherical triangle containing y (any nonzero vector) and its
  /// gnomonic barycentric weights.
  PointLocation locate(const Vec3& y) const;

 private:
  TriMesh() = default;
  void finalize();
  int walk(int start, const Vec3& y, std::array<double, 3>& w) const;

  int level_ = 0;
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 3>> triangle_neighbors_;  // across edge opposite corner k
  std::vector<Vec3> centroids_;
  std::vector<double> vertex_area_;
  std::vector<MeshEdge> edges_;
  std::vector<int> adj_offset_, adj_index_;
  std::vector<double> adj_weight_;
  std::vector<int> vt_offset_, vt_index_;
  std::vector<int> ring_offset_, ring_index_;
  std::vector<std::pair<Vec3, Vec3>> tangent_basis_;
  std::vector<double> grad_w1_, grad_w2_;  // aligned with ring_index_
  std::vector<int> bucket_start_;
  int bucket_nz_ = 0, bucket_naz_ = 0;
  double min_edge_ = 0.0, mean_edge_ = 0.0;
};

/// Checks Euler characteristic, edge manifoldness/orientation and unit vertices.
/// Returns an empty string on success, otherwise a description of the defect.
std::string check_mesh_invariants(const TriMesh& mesh);

/// OFF text export (vertices then triangles).
void write_off(const TriMesh& mesh, std::ostream& out);

}  // namespace spherosim
