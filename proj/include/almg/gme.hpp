#pragma once

#include <optional>
#include <string>
#include <vector>

#include "almg/charges.hpp"
#include "almg/observables.hpp"

namespace almg {

struct GmeOptions {
  /// Half-width of the energy window in units of sigma_eps.
  double width_factor = 2.0;
  /// Fixed half-width; overrides width_factor when set.
  std::optional<double> half_width;
};

/// One doublet of the window together with the unit phases that orient the
/// ensemble's off-diagonal element along each charge.
struct GmeDoublet {
  DoubletRow row;
  cplx beta = 0.0;  ///< rho_{+-} * 2N
};

/// Extended microcanonical ensemble over the parity doublets inside
/// [<eps> - d, <eps> + d]. Every doublet block is
///   rho_n = (1/2N) [[1+p, beta_n], [conj(beta_n), 1-p]]   (basis +, -)
/// with beta_n = sum_q lambda_q <+|Q|->/|<+|Q|->| over the charges of the
/// doublet's phase (Cx, Kx in I; Cy, Ky in III; none in II).
struct GmeEnsemble {
  double eps_mean = 0.0;
  double sigma = 0.0;
  double half_width = 0.0;
  double lo = 0.0, hi = 0.0;
  int n_I = 0, n_II = 0, n_III = 0;
  double p = 0.0;
  double c_x = 0.0, k_x = 0.0, c_y = 0.0, k_y = 0.0;
  /// Tilde-charge expectations of the quenched state that fix the parameters.
  double measured_cx = 0.0, measured_kx = 0.0, measured_cy = 0.0, measured_ky = 0.0;
  /// Sums of |<-|Q|+>| over the phase-I (x) and phase-III (y) doublets of the window.
  double s_x = 0.0, s_y = 0.0;
  std::vector<GmeDoublet> doublets;
  /// p^2 + c^2 + k^2 <= 1 for both parameter pairs.
  bool physical = true;
  /// A phase with no doublets in the window but a nonzero measured charge.
  bool inconsistent = false;
  std::string diagnostic;

  int total() const noexcept { return n_I + n_II + n_III; }
};

/// <Q~> of the state: Q restricted to levels below eps_c1 (x charges) or above
/// eps_c2 (y charges).
double tilde_expectation(const EigenCharges& q, Charge which, const Overlaps& c, const EigenSystem& eig,
                         const classical::CriticalEnergies& crit);

/// Throws std::invalid_argument when the window holds no doublet.
GmeEnsemble build_gme(const Overlaps& c, const EigenSystem& eig, const EigenCharges& q,
                      const DoubletTable& table, const classical::CriticalEnergies& crit,
                      const GmeOptions& options = {});

/// Tr[rho_GME O], assembled doublet by doublet.
double gme_expectation(const GmeEnsemble& ens, const EigenOperator& op);

}  // namespace almg
