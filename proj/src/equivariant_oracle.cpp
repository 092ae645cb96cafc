#include "spherosim/equivariant_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spherosim/error.hpp"
#include "spherosim/parallel.hpp"

namespace spherosim {
namespace {

constexpr double kPi = std::numbers::pi;

double lambda_of(double r) { return 2.0 / (1.0 + r * r); }

struct Angles {
  double theta = 0.0, dtheta = 0.0, alpha = 0.0, dalpha = 0.0;
};

Angles angles_at(const EquivariantProfile& p, double r) {
  Angles a;
  if (r > p.r_max) {
    if (!(r >= p.tail_start)) {
      throw Error(ErrorCode::ProfileOutOfRange, "quadrature node beyond r_max with non-constant tail");
    }
    a.theta = p.theta_inf;
    a.alpha = p.alpha_inf;
    return a;
  }
  a.theta = p.theta(r);
  a.dtheta = p.dtheta ? p.dtheta(r) : 0.0;
  if (p.alpha) {
    a.alpha = p.alpha(r);
    a.dalpha = p.dalpha ? p.dalpha(r) : 0.0;
  }
  return a;
}

// Ambient angles of either flavor; frame profiles are co-rotational, so the
// ambient polar angle is theta + 2 atan r.
Angles ambient_angles(const EquivariantProfile& p, double r) {
  Angles a = angles_at(p, r);
  if (p.flavor == ProfileFlavor::Frame) {
    a.theta += 2.0 * std::atan(r);
    a.dtheta += lambda_of(r);
  }
  return a;
}

void require_corotational(const EquivariantProfile& p) {
  if (p.k != 1 || p.alpha) {
    throw Error(ErrorCode::InvalidArgument, "frame profiles must be co-rotational (k = 1, alpha = 0)");
  }
}

}  // namespace

RadialQuadrature RadialQuadrature::for_profile(const EquivariantProfile& p, int refine, int nodes_per_panel) {
  if (refine < 1 || nodes_per_panel < 2) {
    throw Error(ErrorCode::InvalidArgument, "quadrature needs refine >= 1 and at least 2 nodes per panel");
  }
  std::vector<double> cuts{0.0, kPi};
  auto add_radius = [&](double r) {
    if (r > 0.0 && std::isfinite(r)) cuts.push_back(2.0 * std::atan(r));
  };
  for (double b : p.breakpoints) add_radius(b);
  add_radius(p.r_max);
  add_radius(p.tail_start);
  const double core = p.core_scale > 0.0 && std::isfinite(p.core_scale) ? p.core_scale : 1.0;
  for (double r = core / 64.0; r < 4.0; r *= 2.0) add_radius(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-15; }), cuts.end());

  std::vector<double> edges{cuts.front()};
  constexpr double kMaxWidth = kPi / 16.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double a = cuts[i - 1], b = cuts[i];
    const int pieces = refine * std::max(1, static_cast<int>(std::ceil((b - a) / kMaxWidth)));
    for (int k = 1; k <= pieces; ++k) edges.push_back(a + (b - a) * k / pieces);
  }

  std::vector<double> gx, gw;
  gauss_legendre(nodes_per_panel, gx, gw);
  RadialQuadrature q;
  q.panels = static_cast<int>(edges.size()) - 1;
  q.psi.reserve(static_cast<std::size_t>(q.panels * nodes_per_panel));
  q.weights.reserve(q.psi.capacity());
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double mid = 0.5 * (edges[i] + edges[i - 1]), half = 0.5 * (edges[i] - edges[i - 1]);
    for (std::size_t k = 0; k < gx.size(); ++k) {
      q.psi.push_back(mid + half * gx[k]);
      q.weights.push_back(half * gw[k]);
    }
  }
  return q;
}

double RadialQuadrature::integrate_dr(const std::function<double(double)>& f) const {
  return pairwise_sum<double>(psi.size(), [&](std::size_t i) {
    const double r = std::tan(0.5 * psi[i]);
    return weights[i] * f(r) / lambda_of(r);
  }, 0.0);
}

double RadialQuadrature::integrate_area(const std::function<double(double)>& f) const {
  return integrate_dr([&](double r) { return 2.0 * kPi * r * f(r); });
}

OracleEnergy oracle_energy_parts(const EquivariantProfile& p, const EnergyParams& params, int refine) {
  validate(params);
  const auto q = RadialQuadrature::for_profile(p, refine);
  OracleEnergy e;
  if (p.flavor == ProfileFlavor::Frame) {
    require_corotational(p);
    e.exchange = q.integrate_area([&](double r) {
      const Angles a = angles_at(p, r);
      const double s = std::sin(a.theta), c = std::cos(a.theta), l = lambda_of(r);
      const double grad = 0.5 * a.dtheta * a.dtheta + (r > 0.0 ? 0.5 * s * s / (r * r) : 0.0);
      const double mixed = (a.dtheta + (r > 0.0 ? s * c / r : 0.0)) * l;
      return grad + mixed + (c * c - r * s * c) * l * l;
    });
    e.anisotropy = 0.5 * params.kappa * q.integrate_area([&](double r) {
      const double s = std::sin(angles_at(p, r).theta), l = lambda_of(r);
      return s * s * l * l;
    });
  } else {
    const double k = p.k;
    e.exchange = 0.5 * q.integrate_area([&](double r) {
      const Angles a = angles_at(p, r);
      const double s = std::sin(a.theta);
      const double azimuthal = r > 0.0 ? k * k / (r * r) : 0.0;
      return a.dtheta * a.dtheta + s * s * (a.dalpha * a.dalpha + azimuthal);
    });
    e.anisotropy = 0.5 * params.kappa * q.integrate_area([&](double r) {
      const Angles a = angles_at(p, r);
      const double l = lambda_of(r);
      const double sp = r * l, cp = (1.0 - r * r) / (1.0 + r * r);  // sin, cos of the polar angle of nu
      const double st = std::sin(a.theta), ct = std::cos(a.theta);
      // chi-average of (m . nu)^2; m . nu = st sp cos((k - 1) chi + alpha) + ct cp.
      double mean_sq = ct * ct * cp * cp;
      if (p.k == 1) {
        const double ca = std::cos(a.alpha);
        mean_sq += st * st * sp * sp * ca * ca + 2.0 * st * sp * ct * cp * ca;
      } else {
        mean_sq += 0.5 * st * st * sp * sp;
      }
      return (1.0 - mean_sq) * l * l;
    });
  }
  e.total = e.exchange + e.anisotropy;
  return e;
}

double oracle_energy(const EquivariantProfile& p, const EnergyParams& params, int refine) {
  return oracle_energy_parts(p, params, refine).total;
}

double oracle_exchange_ambient_route(const EquivariantProfile& frame, int refine) {
  require_corotational(frame);
  const auto q = RadialQuadrature::for_profile(frame, refine);
  return 0.5 * q.integrate_area([&](double r) {
    const Angles a = ambient_angles(frame, r);
    const double s = std::sin(a.theta);
    return a.dtheta * a.dtheta + (r > 0.0 ? s * s / (r * r) : 0.0);
  });
}

double oracle_charge(const EquivariantProfile& p) {
  if (p.flavor == ProfileFlavor::Frame) return oracle_charge(frame_to_ambient(p));
  return 0.5 * p.k * (std::cos(p.theta_zero) - std::cos(p.theta_inf));
}

OracleMomentum oracle_momentum(const EquivariantProfile& p, int refine) {
  if (p.flavor == ProfileFlavor::Frame) require_corotational(p);
  const int k = p.k;
  const auto q = RadialQuadrature::for_profile(p, refine);
  OracleMomentum m;
  m.S3 = q.integrate_area([&](double r) {
    const double l = lambda_of(r);
    return l * l * std::cos(ambient_angles(p, r).theta);
  });
  const EquivariantProfile a = frame_to_ambient(p);
  const double Q = oracle_charge(a);
  // omega = k sin(theta) theta' / r, so int lambda |x|^2 omega dx = 2 pi k int lambda r^2 sin(theta) theta' dr.
  const double moment = 2.0 * kPi * k * q.integrate_dr([&](double r) {
    const Angles t = ambient_angles(p, r);
    return lambda_of(r) * r * r * std::sin(t.theta) * t.dtheta;
  });
  m.L3 = 4.0 * kPi * Q - moment;
  m.J3_direct = m.S3 + m.L3;
  m.J3_closed = (1.0 - k) * m.S3 + 4.0 * kPi * k * polarity(a);
  if (std::abs(m.J3_direct - m.J3_closed) > 1e-6) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "closed-form J3 " << m.J3_closed << " vs direct route " << m.J3_direct;
    throw Error(ErrorCode::RouteMismatch, msg.str());
  }
  return m;
}

double oracle_J3(const EquivariantProfile& p, int refine) { return oracle_momentum(p, refine).J3_closed; }

}  // namespace spherosim
