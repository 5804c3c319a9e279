#pragma once

#include <array>
#include <vector>

#include "almg/model.hpp"

namespace almg::classical {

/// Canonical phase-space point. The phase space is the disk Q^2 + P^2 <= 2;
/// its boundary collapses onto the Jz = +j pole.
struct State {
  double q = 0.0;
  double p = 0.0;

  double radius_squared() const noexcept { return q * q + p * p; }
};

/// Thrown when an input or a trajectory leaves the disk.
class DiskExit : public NumericalError {
 public:
  DiskExit(const std::string& what, double time) : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

inline constexpr double kDiskRadiusSquared = 2.0;

bool in_disk(const State& s, double slack = 1e-12);

/// Scaled classical energy H(Q,P) = <omega|H|omega>/N.
double energy(const State& s, const ModelParams& params);

struct Velocity {
  double dq = 0.0;
  double dp = 0.0;
};

/// Hamilton equations (dQ/dt, dP/dt) = (dH/dP, -dH/dQ).
Velocity rhs(const State& s, const ModelParams& params);

struct OrbitPoint {
  double t;
  double q;
  double p;
  double eps;
};

/// Fixed-step RK4 from s0 over [0, T] (the last step is shortened to land on T).
/// Throws DiskExit with the exit time if the trajectory leaves the disk.
std::vector<OrbitPoint> integrate_orbit(const State& s0, const ModelParams& params, double T,
                                        double h = 1e-3);

/// Final state only; same integrator as integrate_orbit.
State propagate(const State& s0, const ModelParams& params, double T, double h = 1e-3);

/// Spin expectations in a coherent state, (j_x, j_y, j_z).
std::array<double, 3> spin(const State& s, double j);

struct FromQuantum {
  State state;
  /// |Q^2 + P^2 - r^2| with r^2 = 1 + <Jz>/j.
  double residual = 0.0;
  /// Set when r^2 is so close to 2 that (Q, P) is poorly determined.
  bool ill_conditioned = false;
};

/// Canonical point carrying the first moments of a quantum state.
FromQuantum from_quantum(const CVec& psi, int two_j);

/// Critical energies of the two excited-state transitions: the saddle at the
/// origin (eps = xi) and the boundary pole (eps = 1 + alpha).
struct CriticalEnergies {
  double eps_c1 = 0.0;
  double eps_c2 = 0.0;
  /// True when eps_min < eps_c1 < eps_c2 < eps_max, i.e. three phases exist.
  bool three_phases = false;
  double eps_min = 0.0;
  double eps_max = 0.0;
};

struct Extrema {
  double min;
  double max;
};

/// Global extrema of the classical energy over the disk.
Extrema energy_extrema(const ModelParams& params);

CriticalEnergies critical_energies(const ModelParams& params);

inline constexpr double kPhaseTieTolerance = 1e-12;

/// I below eps_c1, III above eps_c2, II in between; boundary values are II.
/// Requires crit.three_phases.
Phase classify(double eps, const CriticalEnergies& crit);

}  // namespace almg::classical
