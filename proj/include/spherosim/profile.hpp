#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "spherosim/geometry.hpp"

namespace spherosim {

/// Whether theta/alpha describe the ambient field m or its components u in
/// the moving frame {tau1, tau2, nu}.
enum class ProfileFlavor { Ambient, Frame };

/// Radial description of a k-equivariant field in polar chart coordinates
/// x = r e^{i chi}: polar angle theta(r) (m3 = cos theta, or u3 = cos theta)
/// and azimuth phi = k chi + alpha(r).
///
/// Profiles are either analytic (closures with derivatives) or piecewise
/// linear in r; `breakpoints` lists the r values where derivatives may jump
/// so quadratures can align panels with them.
struct EquivariantProfile {
  int k = 1;
  ProfileFlavor flavor = ProfileFlavor::Ambient;
  std::function<double(double)> theta;
  std::function<double(double)> dtheta;
  std::function<double(double)> alpha;
  std::function<double(double)> dalpha;
  double theta_zero = 0.0;  // theta(0)
  double theta_inf = 0.0;   // theta(infinity)
  double alpha_inf = 0.0;
  std::vector<double> breakpoints;
  /// Smallest length scale of the profile (grading hint for quadrature).
  double core_scale = 1.0;
  /// theta is only defined on [0, r_max]; beyond it the tail must be constant.
  double r_max = std::numeric_limits<double>::infinity();
  /// For r >= tail_start the field equals its value at infinity exactly
  /// (ambient: theta = theta_inf; frame: theta = 0 means m = nu).
  double tail_start = std::numeric_limits<double>::infinity();
};

/// theta(0), theta(inf) in {0, pi} within 1e-8.
bool is_smooth_at_poles(const EquivariantProfile& p);

/// Polarity (m3(e3) + m3(-e3)) / 2 of an ambient profile.
double polarity(const EquivariantProfile& p);

/// m = nu: ambient, k = 1, theta = 2 atan r, alpha = 0.
EquivariantProfile identity_profile();

/// Ambient profile with constant theta (k arbitrary).
EquivariantProfile constant_profile(double theta, int k = 1);

/// Frame profile of the co-rotational trial construction with core scale eps:
/// theta = pi - 2 atan(r / eps) for r <= 1, linear decay to 0 on [1, 2],
/// zero beyond; phi = chi. Throws EpsilonOutOfRange unless 0 < eps < 1/2.
EquivariantProfile trial_profile(double epsilon);

/// Ambient profile with smooth random theta/alpha (polar-angle Fourier modes)
/// and prescribed pole values.
EquivariantProfile smooth_profile(int k, double theta_zero, double theta_inf,
                                  const std::vector<double>& theta_modes,
                                  const std::vector<double>& alpha_modes);

/// Piecewise-linear profile sampled at increasing radii r[0] = 0 < ... < r[n-1] = r_max.
EquivariantProfile sampled_profile(int k, ProfileFlavor flavor, std::vector<double> r,
                                   std::vector<double> theta, std::vector<double> alpha,
                                   double theta_inf);

/// Log-spaced radial grid: 0 followed by n-1 points geometrically spaced in
/// [r_min, r_max].
std::vector<double> log_grid(std::size_t n, double r_min, double r_max);

/// Samples an analytic profile on `r` (PL representation of the same field).
EquivariantProfile resample(const EquivariantProfile& p, const std::vector<double>& r);

/// Converts a co-rotational frame profile (k = 1) to the ambient profile of
/// the assembled field m = u1 tau1 + u2 tau2 + u3 nu. Throws InvalidArgument for k != 1.
EquivariantProfile frame_to_ambient(const EquivariantProfile& frame);

/// Evaluates the represented field (ambient vector m) at chart radius r and angle chi.
/// r = infinity denotes the south pole.
Vec3 evaluate_profile(const EquivariantProfile& p, double r, double chi);

/// Evaluates at a sphere point.
Vec3 evaluate_profile(const EquivariantProfile& p, const Vec3& y);

/// Frame components u(r, chi) of a frame profile.
Vec3 frame_components(const EquivariantProfile& p, double r, double chi);

}  // namespace spherosim
