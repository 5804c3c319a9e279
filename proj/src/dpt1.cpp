#include "almg/dpt1.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "almg/parallel.hpp"

namespace almg {

TimeSeries make_series(const std::vector<double>& t, std::vector<double> values) {
  if (t.size() != values.size()) throw std::invalid_argument("make_series: size mismatch");
  if (t.empty()) throw std::invalid_argument("make_series: empty series");
  TimeSeries s;
  s.t0 = t.front();
  s.values = std::move(values);
  if (t.size() == 1) return s;
  s.dt = t[1] - t[0];
  if (!(s.dt > 0.0)) throw std::invalid_argument("make_series: times must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double step = t[i] - t[i - 1];
    if (std::abs(step - s.dt) > 1e-12 * std::max(1.0, std::abs(s.dt)) * static_cast<double>(i))
      throw std::invalid_argument("make_series: grid is not uniform");
  }
  return s;
}

double time_average(const TimeSeries& series) {
  const auto& v = series.values;
  if (v.empty()) throw std::invalid_argument("time_average: empty series");
  if (v.size() == 1) return v.front();
  double sum = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
  return sum / static_cast<double>(v.size() - 1);
}

ScanContext::ScanContext(const ProtocolSpec& spec, GmeOptions gme)
    : protocol_(spec), gme_(gme), crit_(classical::critical_energies(spec.theta_fin())) {
  const EigenSystem& fin = protocol_.final_system();
  {
    const ChargeSet set(spec.two_j);
    charges_ = charges_in_eigenbasis(set, fin);
  }
  table_ = doublet_pairing(fin, crit_);
  doublet_matrix_elements(table_, charges_);

  for (Axis a : {Axis::x, Axis::y, Axis::z}) spin_.push_back(eigen_collective(a, fin));
  for (Charge q : kAllCharges) charge_ops_.push_back(EigenOperator::from_odd_elements(charges_.get(q)));
  for (const auto& op : spin_) spin_avg_.emplace_back(op, fin, spec.tau_fin);
  for (const auto& op : charge_ops_) charge_avg_.emplace_back(op, fin, spec.tau_fin);
}

std::vector<EvolutionRow> track_evolution(const ProtocolContext& ctx, double tau_int, const std::vector<double>& t,
                                          bool with_classical, double h) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!(t[i] >= 0.0) || (i && !(t[i] > t[i - 1])))
      throw std::invalid_argument("track_evolution: times must be ascending and >= 0");
  const EigenSystem& fin = ctx.final_system();
  const Overlaps c = ctx.final_overlaps(tau_int);
  const int two_j = fin.params().two_j();
  const EigenOperator ops[3] = {eigen_collective(Axis::x, fin), eigen_collective(Axis::y, fin),
                                eigen_collective(Axis::z, fin)};
  classical::State s;
  bool alive = with_classical;
  double at = 0.0;
  if (alive) s = classical::from_quantum(ctx.state_at(tau_int), two_j).state;
  const double nan = std::nan("");

  std::vector<EvolutionRow> out;
  out.reserve(t.size());
  for (double ti : t) {
    EvolutionRow r{ti, 0, 0, 0, nan, nan};
    r.jx = expectation_at(ops[0], c, fin, ti);
    r.jy = expectation_at(ops[1], c, fin, ti);
    r.jz = expectation_at(ops[2], c, fin, ti);
    if (alive) {
      try {
        if (ti > at) s = classical::propagate(s, fin.params(), ti - at, h);
        at = ti;
        const auto v = classical::spin(s, fin.params().j());
        r.jx_classical = v[0];
        r.jy_classical = v[1];
      } catch (const classical::DiskExit&) {
        alive = false;
      }
    }
    out.push_back(r);
  }
  return out;
}

ScanRow ScanContext::row(double tau_int) const {
  const EigenSystem& fin = protocol_.final_system();
  const Overlaps c = protocol_.final_overlaps(tau_int);
  ScanRow r;
  r.tau_int = tau_int;
  const Ldos dist = ldos(c, fin, crit_);
  r.eps_mean = dist.mean;
  r.sigma_eps = dist.sigma;
  r.occupation = dist.occupation;
  r.jx = spin_avg_[0](c);
  r.jy = spin_avg_[1](c);
  r.jz = spin_avg_[2](c);
  r.cx = charge_avg_[0](c);
  r.cy = charge_avg_[1](c);
  r.kx = charge_avg_[2](c);
  r.ky = charge_avg_[3](c);
  try {
    const GmeEnsemble ens = build_gme(c, fin, charges_, table_, crit_, gme_);
    r.gme_jx = gme_expectation(ens, spin_[0]);
    r.gme_jy = gme_expectation(ens, spin_[1]);
    r.gme_jz = gme_expectation(ens, spin_[2]);
    if (ens.inconsistent) r.gme_note = ens.diagnostic;
  } catch (const std::invalid_argument& e) {
    r.gme_ok = false;
    r.gme_note = e.what();
    r.gme_jx = r.gme_jy = r.gme_jz = std::nan("");
  }
  return r;
}

ScanResult tau_scan(const ScanContext& ctx, const std::vector<double>& tau_grid, unsigned threads) {
  if (tau_grid.empty()) throw std::invalid_argument("tau_scan: empty tau grid");
  std::vector<std::optional<ScanRow>> slots(tau_grid.size());
  std::vector<std::string> errors(tau_grid.size());
  parallel_for(tau_grid.size(), threads, [&](std::size_t i) {
    try {
      slots[i] = ctx.row(tau_grid[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  ScanResult out;
  std::vector<std::size_t> order(tau_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return tau_grid[a] < tau_grid[b]; });
  for (std::size_t i : order) {
    if (slots[i])
      out.rows.push_back(*slots[i]);
    else
      out.failures.push_back({tau_grid[i], errors[i]});
  }
  return out;
}

ScanResult tau_scan(const ProtocolSpec& spec, const std::vector<double>& tau_grid, unsigned threads,
                    const GmeOptions& gme) {
  const ScanContext ctx(spec, gme);
  return tau_scan(ctx, tau_grid, threads);
}

}  // namespace almg
