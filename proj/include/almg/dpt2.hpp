#pragma once

#include <optional>
#include <string>
#include <vector>

#include "almg/protocol.hpp"

namespace almg {

/// Within-sector return amplitudes A_k(t) = sum_n |c_{n,k}|^2 exp(-i E_{n,k} t).
struct ReturnAmplitudes {
  std::vector<cplx> plus;
  std::vector<cplx> minus;
};

ReturnAmplitudes return_amplitudes(const Overlaps& c, const EigenSystem& eig,
                                   const std::vector<double>& t);

/// SP(t) = |A_+ + A_-|^2.
std::vector<double> survival(const Overlaps& c, const EigenSystem& eig, const std::vector<double>& t);
std::vector<double> survival(const StateVector& psi, const EigenSystem& eig, const std::vector<double>& t);

struct PprpSeries {
  std::vector<double> total;  ///< |A_+|^2 + |A_-|^2
  std::vector<double> plus;
  std::vector<double> minus;
};

PprpSeries pprp(const Overlaps& c, const EigenSystem& eig, const std::vector<double>& t);
PprpSeries pprp(const StateVector& psi, const EigenSystem& eig, const std::vector<double>& t);

inline constexpr double kRateFloor = 1e-300;

struct Rate {
  std::vector<double> values;
  /// Indices where the probability fell below kRateFloor and was clamped.
  std::vector<std::size_t> underflow;
};

/// -ln(value) / n_norm.
Rate rate(const std::vector<double>& probability, int n_norm);

/// Central differences on a uniform grid, one-sided second-order at the ends.
std::vector<double> rate_derivative(const std::vector<double>& r, double dt);

/// Earliest index where |second difference| exceeds factor x its median.
std::optional<std::size_t> detect_kink(const std::vector<double>& r, double factor = 10.0);

struct RateSeries {
  int two_j = 0;
  int n_norm = 0;  ///< N = 2j
  double tau_int = 0.0;
  std::vector<double> t;
  std::vector<double> sp, pprp, pprp_plus, pprp_minus;
  std::vector<double> rate_sp, rate_pprp, drate_pprp;
  bool underflow = false;
  int digits = 0;  ///< working precision of the extended path; 0 for double
  std::optional<double> kink_time;
};

/// Every probability and rate for a state entering the final stage.
RateSeries rate_series(const Overlaps& c, const EigenSystem& eig_fin, const std::vector<double>& t);

/// First time where |r_N - r~_N| exceeds threshold.
std::optional<double> first_separation(const RateSeries& s, double threshold);

/// max over t in [lo, hi] of |dr(t + half) - dr(t - half)|.
double derivative_jump(const RateSeries& s, double lo, double hi, double half);

struct SizeScanEntry {
  int two_j;
  std::optional<RateSeries> series;
  std::string error;
};

enum class Arithmetic { double_precision, extended };

/// One full protocol per spin length and tau_int; t must be a uniform grid.
/// Entries are ordered by spin length, then tau_int.
std::vector<SizeScanEntry> size_scan(const ProtocolSpec& spec, std::vector<int> two_j_list,
                                     std::vector<double> taus, const std::vector<double>& t,
                                     unsigned threads, Arithmetic arithmetic = Arithmetic::extended);

}  // namespace almg
