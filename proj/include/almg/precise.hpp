#pragma once

#include <vector>

#include "almg/dpt2.hpp"

namespace almg {

// Return probabilities of a macroscopic state fall like exp(-N r) and leave
// double precision within a few time units once N is in the hundreds: the
// amplitude is a sum of O(1) terms cancelling down to ~1e-16 and below that
// only round-off survives. This path refines every double-precision eigenpair
// by Rayleigh quotient iteration in MPFR arithmetic and carries the quench and
// the return amplitudes at that precision.

/// Precision levels (decimal digits) the extended path can run at.
inline constexpr int kPrecisionLevels[] = {50, 100, 200, 400};

struct PreciseOptions {
  int digits = 0;  ///< 0: start from default_digits and raise while unresolved
  unsigned threads = 1;
};

/// Starting level for spin length 2j, assuming rates up to about 0.15.
int default_digits(int two_j);

/// Rate series for each tau_int in `taus`, all sharing one refinement of the
/// three stages. `t` must be uniform. Each series records the digits used; a
/// series whose probabilities sit below the resolution of the highest level
/// has `underflow` set.
std::vector<RateSeries> precise_rate_series(const ProtocolContext& ctx, const std::vector<double>& taus,
                                            const std::vector<double>& t, const PreciseOptions& opt = {});

}  // namespace almg
