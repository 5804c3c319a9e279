#include "almg/gme.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "almg/protocol.hpp"

namespace almg {

namespace {

Side side_of(Charge q) { return (q == Charge::cx || q == Charge::kx) ? Side::below_c1 : Side::above_c2; }

// Element <E_{b,-}|Q~|E_{a,+}> of the window-restricted charge.
cplx tilde_element(const EigenCharges& q, Charge which, const EigenSystem& eig,
                   const classical::CriticalEnergies& crit, int minus, int plus) {
  const Side side = side_of(which);
  if (!in_window(eig.eps({Parity::odd, minus}), crit, side) ||
      !in_window(eig.eps({Parity::even, plus}), crit, side))
    return 0.0;
  return q.get(which)(minus, plus);
}

}  // namespace

double tilde_expectation(const EigenCharges& q, Charge which, const Overlaps& c, const EigenSystem& eig,
                         const classical::CriticalEnergies& crit) {
  const Side side = side_of(which);
  std::vector<int> plus, minus;
  for (int n = 0; n < eig.even().size(); ++n)
    if (in_window(eig.eps({Parity::even, n}), crit, side)) plus.push_back(n);
  for (int n = 0; n < eig.odd().size(); ++n)
    if (in_window(eig.eps({Parity::odd, n}), crit, side)) minus.push_back(n);
  const CMat& m = q.get(which);
  cplx sum = 0.0;
  for (int b : plus) {
    cplx col = 0.0;
    for (int a : minus) col += std::conj(c.odd[a]) * m(a, b);
    sum += col * c.even[b];
  }
  return 2.0 * sum.real();
}

GmeEnsemble build_gme(const Overlaps& c, const EigenSystem& eig, const EigenCharges& q,
                      const DoubletTable& table, const classical::CriticalEnergies& crit,
                      const GmeOptions& options) {
  if (!crit.three_phases)
    throw std::invalid_argument("build_gme: parameters are outside the three-phase regime");
  GmeEnsemble ens;
  const Ldos dist = ldos(c, eig, crit);
  ens.eps_mean = dist.mean;
  ens.sigma = dist.sigma;
  ens.half_width = options.half_width ? *options.half_width : options.width_factor * dist.sigma;
  ens.lo = ens.eps_mean - ens.half_width;
  ens.hi = ens.eps_mean + ens.half_width;

  for (const DoubletRow& row : table.rows) {
    if (row.eps_mean < ens.lo || row.eps_mean > ens.hi) continue;
    switch (*row.phase) {
      case Phase::I: ++ens.n_I; break;
      case Phase::II: ++ens.n_II; break;
      case Phase::III: ++ens.n_III; break;
    }
    ens.doublets.push_back({row, 0.0});
  }
  if (ens.doublets.empty()) {
    std::ostringstream msg;
    msg << "build_gme: no parity doublet inside the window [" << ens.lo << ", " << ens.hi << "]";
    throw std::invalid_argument(msg.str());
  }

  const double norm = c.norm_squared();
  ens.p = (c.even.squaredNorm() - c.odd.squaredNorm()) / norm;

  const double total = ens.total();
  auto solve = [&](Charge which, Phase phase, double& measured, double& lambda, double& s) {
    measured = tilde_expectation(q, which, c, eig, crit) / norm;
    s = 0.0;
    for (const GmeDoublet& d : ens.doublets)
      if (*d.row.phase == phase)
        s += std::abs(tilde_element(q, which, eig, crit, d.row.index_minus, d.row.index_plus));
    if (s > 0.0) {
      lambda = measured * total / s;
    } else {
      lambda = 0.0;
      if (std::abs(measured) > 1e-8) {
        ens.inconsistent = true;
        std::ostringstream msg;
        msg << "<" << to_string(which) << "~> = " << measured << " but phase " << to_string(phase)
            << " has no doublet in the window; ";
        ens.diagnostic += msg.str();
      }
    }
  };
  double s_kx = 0.0, s_ky = 0.0;
  solve(Charge::cx, Phase::I, ens.measured_cx, ens.c_x, ens.s_x);
  solve(Charge::kx, Phase::I, ens.measured_kx, ens.k_x, s_kx);
  solve(Charge::cy, Phase::III, ens.measured_cy, ens.c_y, ens.s_y);
  solve(Charge::ky, Phase::III, ens.measured_ky, ens.k_y, s_ky);

  for (GmeDoublet& d : ens.doublets) {
    auto add = [&](Charge which, double lambda) {
      const cplx e = tilde_element(q, which, eig, crit, d.row.index_minus, d.row.index_plus);
      // <+|Q|-> = conj(<-|Q|+>).
      if (std::abs(e) > 1e-300) d.beta += lambda * std::conj(e) / std::abs(e);
    };
    if (*d.row.phase == Phase::I) {
      add(Charge::cx, ens.c_x);
      add(Charge::kx, ens.k_x);
    } else if (*d.row.phase == Phase::III) {
      add(Charge::cy, ens.c_y);
      add(Charge::ky, ens.k_y);
    }
  }

  const double p2 = ens.p * ens.p;
  ens.physical = p2 + ens.c_x * ens.c_x + ens.k_x * ens.k_x <= 1.0 + 1e-12 &&
                 p2 + ens.c_y * ens.c_y + ens.k_y * ens.k_y <= 1.0 + 1e-12;
  return ens;
}

double gme_expectation(const GmeEnsemble& ens, const EigenOperator& op) {
  if (ens.doublets.empty()) throw std::invalid_argument("gme_expectation: empty ensemble");
  double sum = 0.0;
  for (const GmeDoublet& d : ens.doublets) {
    const int a = d.row.index_plus;
    const int b = d.row.index_minus;
    if (op.odd) {
      if (b >= op.oe.rows() || a >= op.oe.cols())
        throw std::invalid_argument("gme_expectation: dimension mismatch");
      sum += 2.0 * (d.beta * op.oe(b, a)).real();
    } else {
      if (a >= op.ee.rows() || b >= op.oo.rows())
        throw std::invalid_argument("gme_expectation: dimension mismatch");
      sum += (1.0 + ens.p) * op.ee(a, a).real() + (1.0 - ens.p) * op.oo(b, b).real();
    }
  }
  return sum / (2.0 * ens.total());
}

}  // namespace almg
