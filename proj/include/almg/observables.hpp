#pragma once

#include "almg/charges.hpp"
#include "almg/eigensystem.hpp"

namespace almg {

/// An observable written in one eigenbasis, split by its parity character.
/// Parity-even operators keep the two diagonal blocks (ee, oo); parity-odd
/// operators keep oe(a, b) = <E_{a,-}|O|E_{b,+}>.
struct EigenOperator {
  bool odd = false;
  CMat ee, oo, oe;

  static EigenOperator from_odd(const OddOperator& op, const EigenSystem& eig);
  static EigenOperator from_odd_elements(CMat oe);
  /// Any operator diagonal in m (Jz, Pi, ...).
  static EigenOperator from_m_diagonal(const Vec& diag, const EigenSystem& eig);
};

EigenOperator eigen_collective(Axis which, const EigenSystem& eig);

/// <psi|O|psi> for the state with these overlaps.
double expectation(const EigenOperator& op, const Overlaps& c);

/// <O> at time t under the Hamiltonian of the eigenbasis.
double expectation_at(const EigenOperator& op, const Overlaps& c, const EigenSystem& eig, double t);

/// (1/tau) int_0^tau exp(i w t) dt.
cplx horizon_factor(double omega, double tau);

/// Exact continuous average of <O(t)> over [0, tau]. The pair factors are
/// computed once, so repeated evaluation on new overlaps is O(dim^2).
class HorizonAverager {
 public:
  HorizonAverager(const EigenOperator& op, const EigenSystem& eig, double tau);
  double operator()(const Overlaps& c) const;

 private:
  EigenOperator weighted_;
};

/// Infinite-time average: diagonal terms plus every opposite- or same-parity
/// pair of distinct levels closer than gap_threshold (extensive energy).
double infinite_time_average(const EigenOperator& op, const Overlaps& c, const EigenSystem& eig,
                             double gap_threshold);

}  // namespace almg
