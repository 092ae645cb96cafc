#include "spherosim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

#include "spherosim/error.hpp"

namespace spherosim {

double ChartPoint::radius() const { return std::sqrt(radius_sq()); }

Vec3 stereo_to_sphere(ChartPoint x) {
  const double r2 = x.radius_sq();
  const double lam = 2.0 / (1.0 + r2);
  return {lam * x.x1, lam * x.x2, (1.0 - r2) / (1.0 + r2)};
}

ChartPoint sphere_to_stereo(const Vec3& y) {
  if ((y + kE3).norm() < 1e-10) {
    throw Error(ErrorCode::SouthPoleSingularity, "point is the chart singularity -e3");
  }
  const double denom = 1.0 + y.z();
  return {y.x() / denom, y.y() / denom};
}

double conformal_factor(ChartPoint x) { return 2.0 / (1.0 + x.radius_sq()); }

std::pair<Vec3, Vec3> chart_jacobian(ChartPoint x) {
  const double lam = conformal_factor(x);
  const double r2 = x.radius_sq();
  const Vec3 base{x.x1, x.x2, 0.5 * (1.0 - r2)};
  // d lambda / dx_a = -lambda^2 x_a
  const Vec3 d1 = -lam * lam * x.x1 * base + lam * Vec3{1.0, 0.0, -x.x1};
  const Vec3 d2 = -lam * lam * x.x2 * base + lam * Vec3{0.0, 1.0, -x.x2};
  return {d1, d2};
}

std::pair<Vec3, Vec3> chart_frame(ChartPoint x) {
  const double lam = conformal_factor(x);
  auto [d1, d2] = chart_jacobian(x);
  return {d1 / lam, d2 / lam};
}

double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const Vec3 ua = a / la, ub = b / lb, uc = c / lc;
  // Edge vectors keep the triple product accurate for small triangles.
  const double num = ua.dot((ub - ua).cross(uc - ua));
  // 1 + a.b + b.c + c.a = s.(w + s/2) with s the sum of the most nearly
  // opposite pair and w the remaining vector; no cancellation when s is small.
  const Vec3 sab = ua + ub, sbc = ub + uc, sca = uc + ua;
  const double nab = sab.squaredNorm(), nbc = sbc.squaredNorm(), nca = sca.squaredNorm();
  double den;
  if (nab <= nbc && nab <= nca) {
    den = sab.dot(uc + 0.5 * sab);
  } else if (nbc <= nca) {
    den = sbc.dot(ua + 0.5 * sbc);
  } else {
    den = sca.dot(ub + 0.5 * sca);
  }
  return 2.0 * std::atan2(num, den);
}

Mat3 axis_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace

std::shared_ptr<const TriMesh> TriMesh::icosphere(int level) {
  if (level < 0 || level > 8) {
    throw Error(ErrorCode::LevelOutOfRange,
                "icosphere level must be in [0, 8], got " + std::to_string(level));
  }
  std::shared_ptr<TriMesh> mesh(new TriMesh());
  mesh->level_ = level;
  auto& verts = mesh->vertices_;
  auto& tris = mesh->triangles_;

  // Poles first, then the two pentagonal rings.
  verts.push_back(kE3);
  verts.push_back(-kE3);
  const double z = 1.0 / std::sqrt(5.0);
  const double rho = 2.0 / std::sqrt(5.0);
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 5.0;
    verts.emplace_back(rho * std::cos(a), rho * std::sin(a), z);
  }
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 5.0 + std::numbers::pi / 5.0;
    verts.emplace_back(rho * std::cos(a), rho * std::sin(a), -z);
  }
  auto up = [](int k) { return 2 + (k % 5); };
  auto lo = [](int k) { return 7 + (k % 5); };
  for (int k = 0; k < 5; ++k) {
    tris.push_back({0, up(k), up(k + 1)});
    tris.push_back({up(k), lo(k), up(k + 1)});
    tris.push_back({up(k + 1), lo(k), lo(k + 1)});
    tris.push_back({1, lo(k + 1), lo(k)});
  }

  for (int l = 0; l < level; ++l) {
    std::unordered_map<std::uint64_t, int> midpoint;
    midpoint.reserve(tris.size() * 2);
    auto mid = [&](int a, int b) {
      const auto key = edge_key(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(verts.size());
      verts.push_back((verts[a] + verts[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris.swap(next);
  }

  for (auto& t : tris) {
    const Vec3& a = verts[t[0]];
    if (a.dot(verts[t[1]].cross(verts[t[2]])) < 0.0) std::swap(t[1], t[2]);
  }
  mesh->finalize();
  return mesh;
}

void TriMesh::finalize() {
  const std::size_t nv = vertices_.size();
  const std::size_t nt = triangles_.size();

  vertex_area_.assign(nv, 0.0);
  centroids_.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    const Vec3 &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
    const double area = solid_angle(a, b, c);
    for (int k = 0; k < 3; ++k) vertex_area_[tri[k]] += area / 3.0;
    centroids_[t] = (a + b + c).normalized();
  }

  // Edges with cotangent weights; triangle adjacency across edges.
  std::map<std::uint64_t, std::size_t> edge_index;
  triangle_neighbors_.assign(nt, {-1, -1, -1});
  std::vector<std::array<int, 2>> edge_tris;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int i = tri[(k + 1) % 3];
      const int j = tri[(k + 2) % 3];
      const Vec3& o = vertices_[tri[k]];
      const Vec3 ei = vertices_[i] - o;
      const Vec3 ej = vertices_[j] - o;
      const double cot = ei.dot(ej) / ei.cross(ej).norm();
      const auto key = edge_key(i, j);
      auto it = edge_index.find(key);
      if (it == edge_index.end()) {
        edge_index.emplace(key, edges_.size());
        edges_.push_back({std::min(i, j), std::max(i, j), 0.5 * cot});
        edge_tris.push_back({static_cast<int>(t), -1});
      } else {
        edges_[it->second].cotan_weight += 0.5 * cot;
        edge_tris[it->second][1] = static_cast<int>(t);
      }
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const auto e = edge_index.at(edge_key(tri[(k + 1) % 3], tri[(k + 2) % 3]));
      const auto& pair = edge_tris[e];
      triangle_neighbors_[t][k] = pair[0] == static_cast<int>(t) ? pair[1] : pair[0];
    }
  }

  // CSR adjacency.
  std::vector<std::vector<std::pair<int, double>>> adj(nv);
  double len_sum = 0.0;
  min_edge_ = std::numeric_limits<double>::infinity();
  for (const auto& e : edges_) {
    adj[e.i].emplace_back(e.j, e.cotan_weight);
    adj[e.j].emplace_back(e.i, e.cotan_weight);
    const double len = (vertices_[e.i] - vertices_[e.j]).norm();
    len_sum += len;
    min_edge_ = std::min(min_edge_, len);
  }
  mean_edge_ = len_sum / static_cast<double>(edges_.size());
  adj_offset_.assign(nv + 1, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adj_offset_[i + 1] = adj_offset_[i] + static_cast<int>(adj[i].size());
    for (const auto& [j, w] : adj[i]) {
      adj_index_.push_back(j);
      adj_weight_.push_back(w);
    }
  }

  std::vector<std::vector<int>> vt(nv);
  for (std::size_t t = 0; t < nt; ++t) {
    for (int v : triangles_[t]) vt[v].push_back(static_cast<int>(t));
  }
  vt_offset_.assign(nv + 1, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    vt_offset_[i + 1] = vt_offset_[i] + static_cast<int>(vt[i].size());
    vt_index_.insert(vt_index_.end(), vt[i].begin(), vt[i].end());
  }

  ring_offset_.assign(nv + 1, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    std::set<int> ring;
    for (int j : neighbors(i)) {
      ring.insert(j);
      for (int k : neighbors(static_cast<std::size_t>(j))) ring.insert(k);
    }
    ring.erase(static_cast<int>(i));
    ring_offset_[i + 1] = ring_offset_[i] + static_cast<int>(ring.size());
    ring_index_.insert(ring_index_.end(), ring.begin(), ring.end());
  }

  // Least-squares derivative stencils: m_j - m_i ~ cubic polynomial in the
  // gnomonic coordinates of y_j; keep the rows producing the linear terms.
  tangent_basis_.resize(nv);
  grad_w1_.assign(ring_index_.size(), 0.0);
  grad_w2_.assign(ring_index_.size(), 0.0);
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec3& y = vertices_[i];
    const Vec3 helper = std::abs(y.z()) < 0.9 ? kE3 : kE1;
    const Vec3 t1 = helper.cross(y).normalized();
    const Vec3 t2 = y.cross(t1);
    tangent_basis_[i] = {t1, t2};
    const auto ring = two_ring(i);
    const auto n = static_cast<Eigen::Index>(ring.size());
    double h = 0.0;
    for (int j : ring) h = std::max(h, (vertices_[j] - y).norm());
    Eigen::MatrixXd a(n, 9);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Vec3& yj = vertices_[ring[r]];
      const Vec3 p = yj / yj.dot(y) - y;
      const double u = p.dot(t1) / h, v = p.dot(t2) / h;
      a.row(r) << u, v, u * u, u * v, v * v, u * u * u, u * u * v, u * v * v, v * v * v;
    }
    const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
    for (Eigen::Index r = 0; r < n; ++r) {
      grad_w1_[ring_offset_[i] + r] = pinv(0, r) / h;
      grad_w2_[ring_offset_[i] + r] = pinv(1, r) / h;
    }
  }

  // Starting triangles for point-location walks on a (z, azimuth) grid.
  bucket_nz_ = 32;
  bucket_naz_ = 64;
  bucket_start_.assign(static_cast<std::size_t>(bucket_nz_ * bucket_naz_), 0);
  int start = 0;
  std::array<double, 3> w{};
  for (int iz = 0; iz < bucket_nz_; ++iz) {
    const double zc = -1.0 + (iz + 0.5) * 2.0 / bucket_nz_;
    const double rc = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    for (int ia = 0; ia < bucket_naz_; ++ia) {
      const double phi = -std::numbers::pi + (ia + 0.5) * 2.0 * std::numbers::pi / bucket_naz_;
      const Vec3 c{rc * std::cos(phi), rc * std::sin(phi), zc};
      start = walk(start, c, w);
      bucket_start_[static_cast<std::size_t>(iz * bucket_naz_ + ia)] = start;
    }
  }
}

std::span<const int> TriMesh::neighbors(std::size_t i) const {
  return {adj_index_.data() + adj_offset_[i],
          static_cast<std::size_t>(adj_offset_[i + 1] - adj_offset_[i])};
}

std::span<const double> TriMesh::neighbor_weights(std::size_t i) const {
  return {adj_weight_.data() + adj_offset_[i],
          static_cast<std::size_t>(adj_offset_[i + 1] - adj_offset_[i])};
}

std::span<const int> TriMesh::vertex_triangles(std::size_t i) const {
  return {vt_index_.data() + vt_offset_[i],
          static_cast<std::size_t>(vt_offset_[i + 1] - vt_offset_[i])};
}

std::span<const int> TriMesh::two_ring(std::size_t i) const {
  return {ring_index_.data() + ring_offset_[i],
          static_cast<std::size_t>(ring_offset_[i + 1] - ring_offset_[i])};
}

std::pair<Vec3, Vec3> TriMesh::tangent_derivatives(std::size_t i,
                                                  std::span<const Vec3> values) const {
  Vec3 d1 = Vec3::Zero(), d2 = Vec3::Zero();
  const Vec3& mi = values[i];
  for (int r = ring_offset_[i]; r < ring_offset_[i + 1]; ++r) {
    const Vec3 diff = values[static_cast<std::size_t>(ring_index_[r])] - mi;
    d1 += grad_w1_[r] * diff;
    d2 += grad_w2_[r] * diff;
  }
  return {d1, d2};
}

int TriMesh::walk(int start, const Vec3& y, std::array<double, 3>& w) const {
  int t = start;
  int prev = -1;
  const std::size_t max_steps = 4 * triangles_.size() + 16;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto& tri = triangles_[static_cast<std::size_t>(t)];
    const Vec3 &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
    const std::array<double, 3> d{y.dot(b.cross(c)), y.dot(c.cross(a)), y.dot(a.cross(b))};
    int worst = -1;
    double worst_val = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (d[k] < worst_val && triangle_neighbors_[t][k] != prev) {
        worst_val = d[k];
        worst = k;
      }
    }
    if (worst < 0) {
      if (d[0] >= 0.0 && d[1] >= 0.0 && d[2] >= 0.0) {
        const double s = d[0] + d[1] + d[2];
        w = {d[0] / s, d[1] / s, d[2] / s};
        return t;
      }
      // Only the edge we came through is negative (round-off): step back.
      for (int k = 0; k < 3; ++k) {
        if (d[k] < 0.0) worst = k;
      }
    }
    prev = t;
    t = triangle_neighbors_[t][worst];
  }
  // Fallback: exhaustive search (never reached on icospheres in practice).
  double best = -std::numeric_limits<double>::infinity();
  int best_t = 0;
  for (std::size_t s = 0; s < triangles_.size(); ++s) {
    const auto& tri = triangles_[s];
    const Vec3 &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
    const double m = std::min({y.dot(b.cross(c)), y.dot(c.cross(a)), y.dot(a.cross(b))});
    if (m > best) {
      best = m;
      best_t = static_cast<int>(s);
    }
  }
  const auto& tri = triangles_[static_cast<std::size_t>(best_t)];
  const Vec3 &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
  std::array<double, 3> d{y.dot(b.cross(c)), y.dot(c.cross(a)), y.dot(a.cross(b))};
  for (auto& v : d) v = std::max(v, 0.0);
  const double s = d[0] + d[1] + d[2];
  w = {d[0] / s, d[1] / s, d[2] / s};
  return best_t;
}

PointLocation TriMesh::locate(const Vec3& y) const {
  const Vec3 u = y.normalized();
  const int iz = std::clamp(static_cast<int>((u.z() + 1.0) * 0.5 * bucket_nz_), 0, bucket_nz_ - 1);
  const double phi = std::atan2(u.y(), u.x());
  const int ia = std::clamp(
      static_cast<int>((phi + std::numbers::pi) / (2.0 * std::numbers::pi) * bucket_naz_), 0,
      bucket_naz_ - 1);
  PointLocation loc;
  loc.triangle = walk(bucket_start_[static_cast<std::size_t>(iz * bucket_naz_ + ia)], u, loc.weights);
  return loc;
}

std::string check_mesh_invariants(const TriMesh& mesh) {
  std::ostringstream err;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    if (std::abs(mesh.vertex(i).norm() - 1.0) > 1e-12) {
      err << "vertex " << i << " not unit; ";
      break;
    }
  }
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles()) {
    for (int k = 0; k < 3; ++k) directed[{t[k], t[(k + 1) % 3]}] += 1;
  }
  for (const auto& [e, count] : directed) {
    if (count != 1 || directed.count({e.second, e.first}) != 1 ||
        directed.at({e.second, e.first}) != 1) {
      err << "edge (" << e.first << "," << e.second << ") not shared by exactly two "
          << "oppositely oriented triangles; ";
      break;
    }
  }
  const long v = static_cast<long>(mesh.vertex_count());
  const long e = static_cast<long>(mesh.edges().size());
  const long f = static_cast<long>(mesh.triangle_count());
  if (v - e + f != 2) err << "Euler characteristic " << v - e + f << " != 2; ";
  for (const auto& t : mesh.triangles()) {
    const Vec3 &a = mesh.vertex(t[0]), &b = mesh.vertex(t[1]), &c = mesh.vertex(t[2]);
    if (a.dot(b.cross(c)) <= 0.0) {
      err << "triangle not counterclockwise from outside; ";
      break;
    }
  }
  return err.str();
}

void write_off(const TriMesh& mesh, std::ostream& out) {
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.triangle_count() << " 0\n";
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace spherosim
