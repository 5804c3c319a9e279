#pragma once

#include <array>
#include <string>
#include <vector>

#include "almg/gme.hpp"
#include "almg/observables.hpp"
#include "almg/protocol.hpp"

namespace almg {

/// Samples on t0, t0 + dt, ...
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;
};

/// Builds a series from explicit times; throws unless they are strictly
/// increasing and uniform to 1e-12 (relative to the step).
TimeSeries make_series(const std::vector<double>& t, std::vector<double> values);

/// Trapezoidal mean over the series' span. A single sample is its own mean.
double time_average(const TimeSeries& series);

/// Default degeneracy threshold 2 pi / tau_fin.
inline double default_gap_threshold(double tau_fin) { return 2.0 * kPi / tau_fin; }

/// Final-stage spin expectations; the classical columns follow the orbit
/// started at the canonical point of the state entering the final stage.
struct EvolutionRow {
  double t;
  double jx, jy, jz;
  double jx_classical, jy_classical;  ///< NaN when absent or after the orbit leaves the disk
};

/// One row per entry of t (ascending, >= 0), time measured from the start of
/// the final stage.
std::vector<EvolutionRow> track_evolution(const ProtocolContext& ctx, double tau_int, const std::vector<double>& t,
                                          bool with_classical, double h = 1e-3);

struct ScanRow {
  double tau_int = 0.0;
  double eps_mean = 0.0;
  double sigma_eps = 0.0;
  double jx = 0.0, jy = 0.0, jz = 0.0;
  double cx = 0.0, cy = 0.0, kx = 0.0, ky = 0.0;
  double gme_jx = 0.0, gme_jy = 0.0, gme_jz = 0.0;
  std::array<double, 3> occupation{};
  bool gme_ok = true;
  std::string gme_note;
};

struct ScanFailure {
  double tau_int;
  std::string message;
};

struct ScanResult {
  std::vector<ScanRow> rows;  ///< ascending tau_int
  std::vector<ScanFailure> failures;
};

/// Everything a scan row needs that does not depend on tau_int: the three
/// eigensystems, the final-basis observables with their horizon factors, the
/// charge elements and the doublet table.
class ScanContext {
 public:
  ScanContext(const ProtocolSpec& spec, GmeOptions gme = {});

  const ProtocolContext& protocol() const noexcept { return protocol_; }
  const classical::CriticalEnergies& critical() const noexcept { return crit_; }
  const EigenCharges& charges() const noexcept { return charges_; }
  const DoubletTable& doublets() const noexcept { return table_; }
  const EigenOperator& observable(Axis a) const { return spin_[static_cast<int>(a)]; }
  const EigenOperator& observable(Charge q) const { return charge_ops_[static_cast<int>(q)]; }

  /// Finite-horizon averages use the exact continuous average over [0, tau_fin].
  ScanRow row(double tau_int) const;

 private:
  ProtocolContext protocol_;
  GmeOptions gme_;
  classical::CriticalEnergies crit_;
  EigenCharges charges_;
  DoubletTable table_;
  std::vector<EigenOperator> spin_;
  std::vector<EigenOperator> charge_ops_;
  std::vector<HorizonAverager> spin_avg_;
  std::vector<HorizonAverager> charge_avg_;
};

ScanResult tau_scan(const ScanContext& ctx, const std::vector<double>& tau_grid, unsigned threads);
ScanResult tau_scan(const ProtocolSpec& spec, const std::vector<double>& tau_grid, unsigned threads,
                    const GmeOptions& gme = {});

}  // namespace almg
