#include "almg/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <sstream>

namespace almg::classical {

namespace {

constexpr double kTrajectorySlack = 1e-9;

void require_in_disk(const State& s, const char* who) {
  if (!in_disk(s)) {
    std::ostringstream msg;
    msg << who << ": (Q,P)=(" << s.q << "," << s.p << ") lies outside the disk Q^2+P^2<=2";
    throw DiskExit(msg.str(), 0.0);
  }
}

State rk4_step(const State& s, const ModelParams& params, double h) {
  const Velocity k1 = rhs(s, params);
  const Velocity k2 = rhs({s.q + 0.5 * h * k1.dq, s.p + 0.5 * h * k1.dp}, params);
  const Velocity k3 = rhs({s.q + 0.5 * h * k2.dq, s.p + 0.5 * h * k2.dp}, params);
  const Velocity k4 = rhs({s.q + h * k3.dq, s.p + h * k3.dp}, params);
  return {s.q + h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq),
          s.p + h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp)};
}

template <class Visit>
State run_rk4(const State& s0, const ModelParams& params, double T, double h, Visit&& visit) {
  if (!(h > 0.0)) throw std::invalid_argument("integrate_orbit: step must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("integrate_orbit: horizon must be non-negative");
  require_in_disk(s0, "integrate_orbit");
  State s = s0;
  visit(0.0, s);
  const auto steps = static_cast<long long>(std::ceil(T / h - 1e-9));
  for (long long k = 0; k < steps; ++k) {
    const double t0 = k * h;
    const double step = std::min(h, T - t0);
    s = rk4_step(s, params, step);
    const double t = (k + 1 == steps) ? T : t0 + step;
    if (s.radius_squared() > kDiskRadiusSquared + kTrajectorySlack) {
      std::ostringstream msg;
      msg << "integrate_orbit: trajectory left the disk at t=" << t;
      throw DiskExit(msg.str(), t);
    }
    visit(t, s);
  }
  return s;
}

}  // namespace

bool in_disk(const State& s, double slack) {
  return std::isfinite(s.q) && std::isfinite(s.p) &&
         s.radius_squared() <= kDiskRadiusSquared + slack;
}

double energy(const State& s, const ModelParams& params) {
  require_in_disk(s, "classical energy");
  const double xi = params.xi();
  const double alpha = params.alpha();
  const double r2 = s.radius_squared();
  return 0.5 * (1.0 - xi) * r2 + 0.25 * alpha * r2 * r2 + xi * s.q * s.q * (r2 - 2.0) + xi;
}

Velocity rhs(const State& s, const ModelParams& params) {
  const double xi = params.xi();
  const double alpha = params.alpha();
  const double q2 = s.q * s.q;
  const double p2 = s.p * s.p;
  return {s.p * ((alpha + 2.0 * xi) * q2 + alpha * p2 - xi + 1.0),
          -s.q * ((alpha + 2.0 * xi) * p2 + (alpha + 4.0 * xi) * q2 - 5.0 * xi + 1.0)};
}

std::vector<OrbitPoint> integrate_orbit(const State& s0, const ModelParams& params, double T,
                                        double h) {
  std::vector<OrbitPoint> out;
  out.reserve(static_cast<std::size_t>(T / h) + 2);
  run_rk4(s0, params, T, h, [&](double t, const State& s) {
    const double r2 = s.radius_squared();
    // Slightly outside within the integration slack: evaluate on the boundary.
    State e = s;
    if (r2 > kDiskRadiusSquared) {
      const double scale = std::sqrt(kDiskRadiusSquared / r2);
      e = {s.q * scale, s.p * scale};
    }
    out.push_back({t, s.q, s.p, energy(e, params)});
  });
  return out;
}

State propagate(const State& s0, const ModelParams& params, double T, double h) {
  return run_rk4(s0, params, T, h, [](double, const State&) {});
}

std::array<double, 3> spin(const State& s, double j) {
  require_in_disk(s, "classical spin");
  const double r2 = s.radius_squared();
  const double root = std::sqrt(std::max(0.0, kDiskRadiusSquared - r2));
  return {j * s.q * root, -j * s.p * root, j * (r2 - 1.0)};
}

FromQuantum from_quantum(const CVec& psi, int two_j) {
  const double j = 0.5 * two_j;
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) throw std::invalid_argument("from_quantum: zero state");
  auto [jx, jy, jz] = spin_expectations(two_j, psi);
  jx /= norm2;
  jy /= norm2;
  jz /= norm2;
  const double r2 = 1.0 + jz / j;
  if (r2 < -1e-12 || r2 > kDiskRadiusSquared + 1e-12)
    throw std::invalid_argument("from_quantum: <Jz>/j outside [-1,1]");

  FromQuantum out;
  const double gap = kDiskRadiusSquared - r2;
  if (gap < 1e-10) {
    out.ill_conditioned = true;
    out.state = {0.0, 0.0};
    out.residual = std::abs(r2);
    return out;
  }
  const double root = std::sqrt(gap);
  out.state = {jx / (j * root), -jy / (j * root)};
  out.residual = std::abs(out.state.radius_squared() - std::max(0.0, r2));
  out.ill_conditioned = gap < 1e-6;
  return out;
}

Extrema energy_extrema(const ModelParams& params) {
  const double xi = params.xi();
  const double alpha = params.alpha();
  std::vector<State> candidates{{0.0, 0.0}, {0.0, std::sqrt(kDiskRadiusSquared)}};
  // Stationary points on the axes.
  if (alpha != 0.0) {
    const double p2 = (xi - 1.0) / alpha;
    if (p2 > 0.0 && p2 <= kDiskRadiusSquared) candidates.push_back({0.0, std::sqrt(p2)});
  }
  if (alpha + 4.0 * xi != 0.0) {
    const double q2 = (5.0 * xi - 1.0) / (alpha + 4.0 * xi);
    if (q2 > 0.0 && q2 <= kDiskRadiusSquared) candidates.push_back({std::sqrt(q2), 0.0});
  }
  // Polar grid for anything off the axes.
  constexpr int nr = 200;
  constexpr int nt = 256;
  for (int a = 1; a <= nr; ++a) {
    const double r = std::sqrt(kDiskRadiusSquared) * a / nr;
    for (int b = 0; b < nt; ++b) {
      const double th = 2.0 * kPi * b / nt;
      candidates.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  Extrema ex{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const State& s : candidates) {
    State c = s;
    if (c.radius_squared() > kDiskRadiusSquared) {
      const double scale = std::sqrt(kDiskRadiusSquared / c.radius_squared());
      c = {c.q * scale, c.p * scale};
    }
    const double e = energy(c, params);
    ex.min = std::min(ex.min, e);
    ex.max = std::max(ex.max, e);
  }
  return ex;
}

CriticalEnergies critical_energies(const ModelParams& params) {
  CriticalEnergies out;
  out.eps_c2 = params.xi();
  out.eps_c1 = 1.0 + params.alpha();
  const Extrema ex = energy_extrema(params);
  out.eps_min = ex.min;
  out.eps_max = ex.max;
  constexpr double margin = 1e-9;
  out.three_phases = ex.min + margin < out.eps_c1 && out.eps_c1 + margin < out.eps_c2 &&
                     out.eps_c2 + margin < ex.max;
  return out;
}

Phase classify(double eps, const CriticalEnergies& crit) {
  if (!crit.three_phases)
    throw std::logic_error("classify: parameters are outside the three-phase regime");
  if (eps < crit.eps_c1 - kPhaseTieTolerance) return Phase::I;
  if (eps > crit.eps_c2 + kPhaseTieTolerance) return Phase::III;
  return Phase::II;
}

}  // namespace almg::classical
