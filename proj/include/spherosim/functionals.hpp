#pragma once

#include <array>
#include <functional>

#include "spherosim/field.hpp"

namespace spherosim {

struct EnergyParams {
  double kappa = 1.0;  // anisotropy strength, > 0
};

/// Throws InvalidArgument unless kappa > 0 and finite.
void validate(const EnergyParams& p);

struct EnergyParts {
  double exchange = 0.0;
  double anisotropy = 0.0;
  double total = 0.0;
};

struct Diagnostics {
  double exchange = 0.0;
  double anisotropy = 0.0;
  double total = 0.0;
  double Q = 0.0;
  Vec3 S = Vec3::Zero();
  Vec3 L = Vec3::Zero();
  Vec3 J = Vec3::Zero();
};

// -- Inner products with respect to the lumped surface measure.
double l2_inner(const TriMesh& mesh, std::span<const Vec3> a, std::span<const Vec3> b);
double l2_norm(const TriMesh& mesh, std::span<const Vec3> a);

/// Removes the component of g along m at every vertex.
VertexVectors tangent_project(const Field& m, std::span<const Vec3> g);

/// Cotan Dirichlet energy plus lumped anisotropy.
EnergyParts energy(const Field& m, const EnergyParams& p);

/// Signed solid angle of every image triangle, oriented by the mesh.
/// Throws IllConditionedTriangle if any |Omega_T| > pi.
std::vector<double> image_solid_angles(const Field& m);

/// Degree: sum of image solid angles / 4 pi.
double charge(const Field& m);

/// sum_T Omega_T w(x_T), x_T the chart point of the mesh triangle centroid:
/// the discrete integral of w(x) omega(m) dx.
double vorticity_integral(const Field& m, const std::function<double(ChartPoint)>& w);

/// S = sum_i A_i m_i.
Vec3 spin_momentum(const Field& m);

/// L = sum_T Omega_T nu(centroid_T).
Vec3 orbital_momentum(const Field& m);

/// Third component through the chart: 4 pi Q - int lambda |x|^2 omega dx.
double orbital_momentum3_chart(const Field& m);

/// J = S + L.
Vec3 angular_momentum(const Field& m);

Diagnostics diagnose(const Field& m, const EnergyParams& p);

/// Cotan Laplace-Beltrami of a vertex field: (sum_j w_ij (v_j - v_i)) / A_i.
VertexVectors laplace_beltrami(const TriMesh& mesh, std::span<const Vec3> v);

/// L2 gradient -[Delta m + kappa (m.nu) nu] (not tangent projected).
VertexVectors grad_energy(const Field& m, const EnergyParams& p);
/// Same formula on arbitrary (not necessarily unit) vertex values.
VertexVectors grad_energy(const TriMesh& mesh, std::span<const Vec3> values, const EnergyParams& p);

/// Gradient of S_axis (axis in {1, 2, 3}): the constant field e_axis.
VertexVectors grad_S(int axis, const TriMesh& mesh);

/// Exact L2 gradients of the discrete L components (tangent to m). With
/// `full_variation` each adds the normal part of the variation of
/// -int lambda|x|^2 omega(m) dx about the matching axis, i.e. -3 (1 - nu_a)
/// times the surface Jacobian of m, for non-tangent variations.
std::array<VertexVectors, 3> grad_L_all(const Field& m, bool full_variation = false);
VertexVectors grad_L(int axis, const Field& m, bool full_variation = false);
VertexVectors grad_L3(const Field& m, bool full_variation = false);

/// Continuum formula -(m x d_chi m) with the mesh azimuthal derivative.
VertexVectors grad_L3_continuum(const Field& m);

/// Cubic extension 4 pi Q0 - sum_T (1 - nu_3(c_T)) det(m_a, m_b, m_c) / 2 of
/// L3, the functional whose normal variation `full_variation` describes.
double orbital_momentum3_cubic(const Field& m, std::span<const Vec3> values, double q0);

/// {F, G} = sum_i A_i m_i . (gradF_i x gradG_i).
double poisson_bracket(std::span<const Vec3> grad_f, std::span<const Vec3> grad_g, const Field& m);

/// {m, J_e} = e x m - d_chi^e m for the rotation axis e (default e3).
VertexVectors generator_J3(const Field& m, const Vec3& axis = kE3);

/// ||e x m - d_chi^e m|| / ||grad m|| for one axis.
double axis_equivariance_defect(const Field& m, const Vec3& axis, const VertexJacobian& jac,
                                double grad_norm);

struct FrameEnergy {
  double E0 = 0.0;
  double E1 = 0.0;
  double total = 0.0;
};

/// Moving-frame energy split by tensor-product quadrature on the grid plus
/// the exact contribution of u = e3 outside the support. Throws UnsupportedTail.
FrameEnergy frame_energy(const FrameField& u, const EnergyParams& p);

/// -1/2 int omega(m) |x|^2 lambda^2 dx for a field equivariant about e3.
/// Throws NotEquivariant if the e3 defect exceeds `defect_tol`.
double elliptical_hessian_rhs(const Field& m, double defect_tol = 1e-3);

}  // namespace spherosim
