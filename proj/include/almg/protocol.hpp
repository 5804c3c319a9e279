#pragma once

#include <array>
#include <memory>
#include <vector>

#include "almg/classical.hpp"
#include "almg/eigensystem.hpp"

namespace almg {

/// Amplitudes over m = -j..j (index k = j + m).
using StateVector = CVec;

struct Superposition {
  double p = 0.5;
  double phi = 1.5 * kPi;
};

inline constexpr Superposition kS1{0.5, 1.5 * kPi};
inline constexpr Superposition kS2{1.0 / 3.0, 0.6 * kPi};

struct ProtocolSpec {
  int two_j = 800;
  double xi_ini = 0.6, alpha_ini = -2.0;
  double xi_int = 0.2, alpha_int = -0.8;
  double xi_fin = 0.5, alpha_fin = -0.6;
  Superposition state = kS1;
  double tau_int = 0.5;
  double tau_fin = 2000.0;
  double dt = 0.1;

  ModelParams theta_ini() const { return {xi_ini, alpha_ini, two_j}; }
  ModelParams theta_int() const { return {xi_int, alpha_int, two_j}; }
  ModelParams theta_fin() const { return {xi_fin, alpha_fin, two_j}; }
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// The two highest levels |E_max,+>, |E_max,->, with the odd one's sign chosen
/// so that Im <E_max,+|Jy|E_max,-> > 0.
struct TopDoublet {
  Vec plus;
  Vec minus;
  double jy_cross = 0.0;  ///< Im <E_max,+|Jy|E_max,-> after the convention
};

TopDoublet top_doublet(const EigenSystem& eig_ini);

/// sqrt(p)|E_max,+> + exp(i phi) sqrt(1-p)|E_max,->.
StateVector prepare_initial(const EigenSystem& eig_ini, Superposition s);
StateVector prepare_initial(const ModelParams& theta_ini, Superposition s);

/// exp(-i H t) psi with H diagonalized by eig.
StateVector evolve(const StateVector& psi, const EigenSystem& eig, double t);
/// Same on overlaps: c_n -> c_n exp(-i E_n t).
Overlaps evolve(const Overlaps& c, const EigenSystem& eig, double t);

struct Expectation {
  double value = 0.0;
  double imaginary_residue = 0.0;
};

/// <psi|O|psi> for a normalized psi. Throws if O is not Hermitian.
Expectation expval(const StateVector& psi, const CMat& op);

/// The three eigensystems and the initial state, shared read-only by every
/// run that differs only in tau_int (and the final-stage time).
class ProtocolContext {
 public:
  explicit ProtocolContext(const ProtocolSpec& spec);

  const ProtocolSpec& spec() const noexcept { return spec_; }
  const EigenSystem& initial_system() const noexcept { return *ini_; }
  const EigenSystem& intermediate_system() const noexcept { return *int_; }
  const EigenSystem& final_system() const noexcept { return *fin_; }
  const StateVector& initial_state() const noexcept { return psi0_; }

  /// State after tau_int in the intermediate Hamiltonian.
  StateVector state_at(double tau_int) const;
  /// Overlaps of state_at(tau_int) with the final eigenbasis.
  Overlaps final_overlaps(double tau_int) const;

 private:
  ProtocolSpec spec_;
  std::shared_ptr<const EigenSystem> ini_, int_, fin_;
  StateVector psi0_;
  Overlaps c_int_;
};

/// Result of one double quench. Final-stage states are synthesized on demand;
/// storing every sample would cost dim * tau_fin / dt amplitudes.
class ProtocolRun {
 public:
  ProtocolRun(const ProtocolContext& ctx, double tau_int);

  double tau_int() const noexcept { return tau_int_; }
  const StateVector& state_at_tau() const noexcept { return at_tau_; }
  const Overlaps& final_overlaps() const noexcept { return c_fin_; }
  /// 0, dt, ..., tau_fin (last point included when it lands on the grid to 1e-9).
  std::vector<double> grid() const;
  StateVector state(double t) const;

 private:
  const ProtocolContext* ctx_;
  double tau_int_;
  StateVector at_tau_;
  Overlaps c_fin_;
};

ProtocolRun run_protocol(const ProtocolContext& ctx);

struct LdosEntry {
  double eps;
  double weight;
  Parity parity;
  int index;
};

struct Ldos {
  std::vector<LdosEntry> entries;  ///< ascending in eps
  double mean = 0.0;
  double sigma = 0.0;
  /// Weight in phases I, II, III; NaN outside the three-phase regime.
  std::array<double, 3> occupation{};
};

Ldos ldos(const Overlaps& c, const EigenSystem& eig_fin, const classical::CriticalEnergies& crit);

/// Uniform grid 0, dt, ..., T.
std::vector<double> uniform_grid(double T, double dt);

}  // namespace almg
