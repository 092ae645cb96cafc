#include "spherosim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "spherosim/error.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;

double near_pole_value(double theta) {
  const double wrapped = std::remainder(theta, 2.0 * kPi);
  return std::min(std::abs(wrapped), std::abs(std::abs(wrapped) - kPi));
}

struct PiecewiseLinear {
  std::vector<double> x, y;

  std::size_t segment(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(i, x.size() - 2);
  }
  double value(double t) const {
    const std::size_t i = segment(t);
    const double w = (t - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * y[i] + w * y[i + 1];
  }
  double slope(double t) const {
    const std::size_t i = segment(t);
    return (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  }
};

}  // namespace

bool is_smooth_at_poles(const EquivariantProfile& p) {
  return near_pole_value(p.theta_zero) <= 1e-8 && near_pole_value(p.theta_inf) <= 1e-8;
}

double polarity(const EquivariantProfile& p) {
  return 0.5 * (std::cos(p.theta_zero) + std::cos(p.theta_inf));
}

EquivariantProfile identity_profile() {
  EquivariantProfile p;
  p.k = 1;
  p.flavor = ProfileFlavor::Ambient;
  p.theta = [](double r) { return 2.0 * std::atan(r); };
  p.dtheta = [](double r) { return 2.0 / (1.0 + r * r); };
  p.theta_zero = 0.0;
  p.theta_inf = kPi;
  return p;
}

EquivariantProfile constant_profile(double theta, int k) {
  EquivariantProfile p;
  p.k = k;
  p.flavor = ProfileFlavor::Ambient;
  p.theta = [theta](double) { return theta; };
  p.dtheta = [](double) { return 0.0; };
  p.theta_zero = theta;
  p.theta_inf = theta;
  p.tail_start = 0.0;
  return p;
}

EquivariantProfile trial_profile(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw Error(ErrorCode::EpsilonOutOfRange, "trial scale must satisfy 0 < eps < 1/2");
  }
  const double junction = kPi - 2.0 * std::atan(1.0 / epsilon);
  EquivariantProfile p;
  p.k = 1;
  p.flavor = ProfileFlavor::Frame;
  p.theta = [epsilon, junction](double r) {
    if (r <= 1.0) return kPi - 2.0 * std::atan(r / epsilon);
    if (r < 2.0) return junction * (2.0 - r);
    return 0.0;
  };
  p.dtheta = [epsilon, junction](double r) {
    if (r <= 1.0) return -2.0 * epsilon / (epsilon * epsilon + r * r);
    if (r < 2.0) return -junction;
    return 0.0;
  };
  p.theta_zero = kPi;
  p.theta_inf = 0.0;
  p.breakpoints = {1.0, 2.0};
  p.core_scale = epsilon;
  p.tail_start = 2.0;
  return p;
}

EquivariantProfile smooth_profile(int k, double theta_zero, double theta_inf,
                                  const std::vector<double>& theta_modes,
                                  const std::vector<double>& alpha_modes) {
  // Smooth in the polar angle psi = 2 atan r; sine modes vanish at both poles.
  EquivariantProfile p;
  p.k = k;
  p.flavor = ProfileFlavor::Ambient;
  p.theta_zero = theta_zero;
  p.theta_inf = theta_inf;
  auto tm = theta_modes;
  auto am = alpha_modes;
  p.theta = [=](double r) {
    const double psi = 2.0 * std::atan(r);
    double v = theta_zero + (theta_inf - theta_zero) * psi / kPi;
    for (std::size_t n = 0; n < tm.size(); ++n) v += tm[n] * std::sin((n + 1.0) * psi);
    return v;
  };
  p.dtheta = [=](double r) {
    const double psi = 2.0 * std::atan(r);
    double v = (theta_inf - theta_zero) / kPi;
    for (std::size_t n = 0; n < tm.size(); ++n) v += tm[n] * (n + 1.0) * std::cos((n + 1.0) * psi);
    return v * 2.0 / (1.0 + r * r);
  };
  if (!am.empty()) {
    p.alpha = [=](double r) {
      const double psi = 2.0 * std::atan(r);
      double v = 0.0;
      for (std::size_t n = 0; n < am.size(); ++n) v += am[n] * std::sin((n + 1.0) * psi);
      return v;
    };
    p.dalpha = [=](double r) {
      const double psi = 2.0 * std::atan(r);
      double v = 0.0;
      for (std::size_t n = 0; n < am.size(); ++n) v += am[n] * (n + 1.0) * std::cos((n + 1.0) * psi);
      return v * 2.0 / (1.0 + r * r);
    };
  }
  return p;
}

std::vector<double> log_grid(std::size_t n, double r_min, double r_max) {
  if (n < 3 || !(r_min > 0.0) || !(r_max > r_min)) {
    throw Error(ErrorCode::InvalidArgument, "log_grid needs n >= 3 and 0 < r_min < r_max");
  }
  std::vector<double> r(n);
  r[0] = 0.0;
  const double ratio = std::log(r_max / r_min) / static_cast<double>(n - 2);
  for (std::size_t i = 1; i < n; ++i) r[i] = r_min * std::exp(ratio * static_cast<double>(i - 1));
  r[n - 1] = r_max;
  return r;
}

EquivariantProfile sampled_profile(int k, ProfileFlavor flavor, std::vector<double> r,
                                   std::vector<double> theta, std::vector<double> alpha,
                                   double theta_inf) {
  if (r.size() < 2 || theta.size() != r.size() || (!alpha.empty() && alpha.size() != r.size())) {
    throw Error(ErrorCode::InvalidArgument, "profile samples must have matching lengths >= 2");
  }
  if (r.front() != 0.0 || !std::is_sorted(r.begin(), r.end()) ||
      std::adjacent_find(r.begin(), r.end()) != r.end()) {
    throw Error(ErrorCode::InvalidArgument, "profile radii must start at 0 and increase strictly");
  }
  for (double t : theta) {
    if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "non-finite profile sample");
  }
  EquivariantProfile p;
  p.k = k;
  p.flavor = flavor;
  p.theta_zero = theta.front();
  p.theta_inf = theta_inf;
  p.r_max = r.back();
  p.core_scale = r.size() > 1 ? r[1] : 1.0;
  p.breakpoints.assign(r.begin() + 1, r.end() - 1);
  auto th = std::make_shared<PiecewiseLinear>(PiecewiseLinear{r, theta});
  p.theta = [th](double t) { return th->value(t); };
  p.dtheta = [th](double t) { return th->slope(t); };
  if (!alpha.empty()) {
    p.alpha_inf = alpha.back();
    auto al = std::make_shared<PiecewiseLinear>(PiecewiseLinear{r, std::move(alpha)});
    p.alpha = [al](double t) { return al->value(t); };
    p.dalpha = [al](double t) { return al->slope(t); };
  }
  if (std::abs(theta.back() - theta_inf) <= 1e-8) p.tail_start = r.back();
  return p;
}

EquivariantProfile resample(const EquivariantProfile& p, const std::vector<double>& r) {
  std::vector<double> theta(r.size()), alpha;
  for (std::size_t i = 0; i < r.size(); ++i) theta[i] = p.theta(r[i]);
  if (p.alpha) {
    alpha.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) alpha[i] = p.alpha(r[i]);
  }
  auto out = sampled_profile(p.k, p.flavor, r, std::move(theta), std::move(alpha), p.theta_inf);
  out.theta_zero = p.theta_zero;
  return out;
}

EquivariantProfile frame_to_ambient(const EquivariantProfile& frame) {
  if (frame.flavor == ProfileFlavor::Ambient) return frame;
  if (frame.k != 1 || frame.alpha) {
    throw Error(ErrorCode::InvalidArgument,
                "frame-to-ambient conversion needs a co-rotational profile (k = 1, alpha = 0)");
  }
  // m = sin(theta) tau_r + cos(theta) nu has polar angle theta + psi, psi = 2 atan r.
  EquivariantProfile a = frame;
  a.flavor = ProfileFlavor::Ambient;
  auto th = frame.theta;
  auto dth = frame.dtheta;
  a.theta = [th](double r) { return th(r) + 2.0 * std::atan(r); };
  a.dtheta = [dth](double r) { return dth(r) + 2.0 / (1.0 + r * r); };
  a.theta_inf = frame.theta_inf + kPi;
  // Beyond the frame tail the field is nu, which is not constant in the chart.
  a.tail_start = std::numeric_limits<double>::infinity();
  return a;
}

Vec3 frame_components(const EquivariantProfile& p, double r, double chi) {
  double th = 0.0, al = 0.0;
  if (std::isinf(r) || r > p.r_max) {
    if (!(r >= p.tail_start) && !std::isinf(r)) {
      throw Error(ErrorCode::ProfileOutOfRange, "point beyond r_max with non-constant tail");
    }
    th = p.theta_inf;
    al = p.alpha_inf;
  } else {
    th = p.theta(r);
    al = p.alpha ? p.alpha(r) : 0.0;
  }
  const double phi = p.k * chi + al;
  return {std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th)};
}

Vec3 evaluate_profile(const EquivariantProfile& p, double r, double chi) {
  if (p.flavor == ProfileFlavor::Ambient) {
    if (std::isinf(r)) {
      const double phi = p.k * chi + p.alpha_inf;
      return {std::sin(p.theta_inf) * std::cos(phi), std::sin(p.theta_inf) * std::sin(phi),
              std::cos(p.theta_inf)};
    }
    return frame_components(p, r, chi);
  }
  if (std::isinf(r)) return std::cos(p.theta_inf) * (-kE3);
  const Vec3 u = frame_components(p, r, chi);
  const ChartPoint x{r * std::cos(chi), r * std::sin(chi)};
  auto [t1, t2] = chart_frame(x);
  return (u.x() * t1 + u.y() * t2 + u.z() * stereo_to_sphere(x)).normalized();
}

Vec3 evaluate_profile(const EquivariantProfile& p, const Vec3& y) {
  const Vec3 yn = y.normalized();
  if ((yn + kE3).norm() < 1e-12) return evaluate_profile(p, std::numeric_limits<double>::infinity(), 0.0);
  const ChartPoint x = sphere_to_stereo(yn);
  return evaluate_profile(p, x.radius(), std::atan2(x.x2, x.x1));
}

}  // namespace spherosim
