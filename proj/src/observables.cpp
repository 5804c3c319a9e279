#include "almg/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "almg/protocol.hpp"

namespace almg {

namespace {

void check_shape(const EigenOperator& op, const Overlaps& c) {
  if (op.odd) {
    if (op.oe.rows() != c.odd.size() || op.oe.cols() != c.even.size())
      throw std::invalid_argument("EigenOperator: overlaps do not match the operator");
  } else if (op.ee.rows() != c.even.size() || op.oo.rows() != c.odd.size()) {
    throw std::invalid_argument("EigenOperator: overlaps do not match the operator");
  }
}

template <class Weight>
CMat weighted_block(const CMat& m, const Vec& rows, const Vec& cols, Weight&& w) {
  CMat out(m.rows(), m.cols());
  for (Eigen::Index b = 0; b < m.cols(); ++b)
    for (Eigen::Index a = 0; a < m.rows(); ++a) out(a, b) = m(a, b) * w(rows[a] - cols[b]);
  return out;
}

}  // namespace

EigenOperator EigenOperator::from_odd(const OddOperator& op, const EigenSystem& eig) {
  return from_odd_elements(op.in_eigenbasis(eig));
}

EigenOperator EigenOperator::from_odd_elements(CMat oe) {
  EigenOperator out;
  out.odd = true;
  out.oe = std::move(oe);
  return out;
}

EigenOperator EigenOperator::from_m_diagonal(const Vec& diag, const EigenSystem& eig) {
  if (diag.size() != eig.dim()) throw std::invalid_argument("from_m_diagonal: dimension mismatch");
  EigenOperator out;
  for (Parity p : {Parity::even, Parity::odd}) {
    const ParitySector& s = eig.sector(p);
    Vec d(s.size());
    for (int r = 0; r < s.size(); ++r) d[r] = diag[s.basis[r]];
    const Mat block = s.vectors.transpose() * d.asDiagonal() * s.vectors;
    (p == Parity::even ? out.ee : out.oo) = block.cast<cplx>();
  }
  return out;
}

EigenOperator eigen_collective(Axis which, const EigenSystem& eig) {
  const int two_j = eig.params().two_j();
  if (which == Axis::z) {
    Vec m(eig.dim());
    for (int k = 0; k < eig.dim(); ++k) m[k] = m_of(two_j, k);
    return EigenOperator::from_m_diagonal(m, eig);
  }
  return EigenOperator::from_odd(collective_odd(two_j, which), eig);
}

double expectation(const EigenOperator& op, const Overlaps& c) {
  check_shape(op, c);
  if (op.odd) return 2.0 * c.odd.dot(op.oe * c.even).real();
  return c.even.dot(op.ee * c.even).real() + c.odd.dot(op.oo * c.odd).real();
}

double expectation_at(const EigenOperator& op, const Overlaps& c, const EigenSystem& eig, double t) {
  return expectation(op, evolve(c, eig, t));
}

cplx horizon_factor(double omega, double tau) {
  const double x = omega * tau;
  if (std::abs(x) < 1e-4) return {1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0};
  return (std::polar(1.0, x) - 1.0) / cplx(0.0, x);
}

HorizonAverager::HorizonAverager(const EigenOperator& op, const EigenSystem& eig, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("HorizonAverager: tau must be > 0");
  auto w = [tau](double omega) { return horizon_factor(omega, tau); };
  weighted_.odd = op.odd;
  const Vec& ep = eig.even().energies;
  const Vec& em = eig.odd().energies;
  if (op.odd) {
    weighted_.oe = weighted_block(op.oe, em, ep, w);
  } else {
    weighted_.ee = weighted_block(op.ee, ep, ep, w);
    weighted_.oo = weighted_block(op.oo, em, em, w);
  }
}

double HorizonAverager::operator()(const Overlaps& c) const { return expectation(weighted_, c); }

double infinite_time_average(const EigenOperator& op, const Overlaps& c, const EigenSystem& eig,
                             double gap_threshold) {
  check_shape(op, c);
  auto keep = [gap_threshold](double omega) { return std::abs(omega) < gap_threshold ? 1.0 : 0.0; };
  const Vec& ep = eig.even().energies;
  const Vec& em = eig.odd().energies;
  EigenOperator kept;
  kept.odd = op.odd;
  if (op.odd) {
    kept.oe = weighted_block(op.oe, em, ep, keep);
  } else {
    // Diagonal terms always survive; within a parity block the spectrum is simple.
    kept.ee = weighted_block(op.ee, ep, ep, keep);
    kept.oo = weighted_block(op.oo, em, em, keep);
    kept.ee.diagonal() = op.ee.diagonal();
    kept.oo.diagonal() = op.oo.diagonal();
  }
  return expectation(kept, c);
}

}  // namespace almg
