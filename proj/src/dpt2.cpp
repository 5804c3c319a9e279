#include "almg/dpt2.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "almg/parallel.hpp"
#include "almg/precise.hpp"

namespace almg {

ReturnAmplitudes return_amplitudes(const Overlaps& c, const EigenSystem& eig,
                                   const std::vector<double>& t) {
  ReturnAmplitudes out;
  out.plus.assign(t.size(), 0.0);
  out.minus.assign(t.size(), 0.0);
  const double norm = c.norm_squared();
  if (!(norm > 0.0)) throw std::invalid_argument("return_amplitudes: zero state");
  for (Parity p : {Parity::even, Parity::odd}) {
    const Vec& e = eig.sector(p).energies;
    const CVec& v = c.sector(p);
    if (v.size() != e.size()) throw std::invalid_argument("return_amplitudes: dimension mismatch");
    std::vector<double> w;
    std::vector<double> en;
    for (Eigen::Index n = 0; n < v.size(); ++n) {
      const double weight = std::norm(v[n]) / norm;
      if (weight == 0.0) continue;
      w.push_back(weight);
      en.push_back(e[n]);
    }
    auto& dst = p == Parity::even ? out.plus : out.minus;
    for (std::size_t i = 0; i < t.size(); ++i) {
      double re = 0.0, im = 0.0;
      for (std::size_t n = 0; n < w.size(); ++n) {
        const double ph = -en[n] * t[i];
        re += w[n] * std::cos(ph);
        im += w[n] * std::sin(ph);
      }
      dst[i] = {re, im};
    }
  }
  return out;
}

std::vector<double> survival(const Overlaps& c, const EigenSystem& eig, const std::vector<double>& t) {
  const ReturnAmplitudes a = return_amplitudes(c, eig, t);
  std::vector<double> sp(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) sp[i] = std::min(1.0, std::norm(a.plus[i] + a.minus[i]));
  return sp;
}

std::vector<double> survival(const StateVector& psi, const EigenSystem& eig, const std::vector<double>& t) {
  return survival(eig.project(psi), eig, t);
}

PprpSeries pprp(const Overlaps& c, const EigenSystem& eig, const std::vector<double>& t) {
  const ReturnAmplitudes a = return_amplitudes(c, eig, t);
  PprpSeries out;
  out.total.resize(t.size());
  out.plus.resize(t.size());
  out.minus.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out.plus[i] = std::norm(a.plus[i]);
    out.minus[i] = std::norm(a.minus[i]);
    out.total[i] = std::min(1.0, out.plus[i] + out.minus[i]);
  }
  return out;
}

PprpSeries pprp(const StateVector& psi, const EigenSystem& eig, const std::vector<double>& t) {
  return pprp(eig.project(psi), eig, t);
}

Rate rate(const std::vector<double>& probability, int n_norm) {
  if (n_norm < 1) throw std::invalid_argument("rate: normalization must be >= 1");
  Rate out;
  out.values.resize(probability.size());
  for (std::size_t i = 0; i < probability.size(); ++i) {
    double v = probability[i];
    if (!(v >= kRateFloor)) {
      out.underflow.push_back(i);
      v = kRateFloor;
    }
    out.values[i] = -std::log(v) / n_norm;
  }
  return out;
}

std::vector<double> rate_derivative(const std::vector<double>& r, double dt) {
  if (r.size() < 3) throw std::invalid_argument("rate_derivative: need at least 3 samples");
  if (!(dt > 0.0)) throw std::invalid_argument("rate_derivative: dt must be > 0");
  const std::size_t n = r.size();
  std::vector<double> d(n);
  d[0] = (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * dt);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (r[i + 1] - r[i - 1]) / (2.0 * dt);
  d[n - 1] = (3.0 * r[n - 1] - 4.0 * r[n - 2] + r[n - 3]) / (2.0 * dt);
  return d;
}

std::optional<std::size_t> detect_kink(const std::vector<double>& r, double factor) {
  if (r.size() < 3) return std::nullopt;
  std::vector<double> d2(r.size() - 2);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) d2[i - 1] = std::abs(r[i + 1] - 2.0 * r[i] + r[i - 1]);
  std::vector<double> sorted = d2;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double threshold = factor * *mid;
  if (!(threshold > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i < d2.size(); ++i)
    if (d2[i] > threshold) return i + 1;
  return std::nullopt;
}

RateSeries rate_series(const Overlaps& c, const EigenSystem& eig, const std::vector<double>& t) {
  if (t.size() < 3) throw std::invalid_argument("rate_series: need at least 3 times");
  RateSeries s;
  s.two_j = eig.params().two_j();
  s.n_norm = eig.params().particles();
  s.t = t;
  const ReturnAmplitudes a = return_amplitudes(c, eig, t);
  const std::size_t n = t.size();
  s.sp.resize(n);
  s.pprp.resize(n);
  s.pprp_plus.resize(n);
  s.pprp_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.pprp_plus[i] = std::norm(a.plus[i]);
    s.pprp_minus[i] = std::norm(a.minus[i]);
    s.pprp[i] = std::min(1.0, s.pprp_plus[i] + s.pprp_minus[i]);
    s.sp[i] = std::min(1.0, std::norm(a.plus[i] + a.minus[i]));
  }
  const Rate rs = rate(s.sp, s.n_norm);
  const Rate rp = rate(s.pprp, s.n_norm);
  s.rate_sp = rs.values;
  s.rate_pprp = rp.values;
  s.underflow = !rs.underflow.empty() || !rp.underflow.empty();
  s.drate_pprp = rate_derivative(s.rate_pprp, t[1] - t[0]);
  if (auto k = detect_kink(s.rate_pprp)) s.kink_time = t[*k];
  return s;
}

std::optional<double> first_separation(const RateSeries& s, double threshold) {
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (std::abs(s.rate_pprp[i] - s.rate_sp[i]) > threshold) return s.t[i];
  return std::nullopt;
}

double derivative_jump(const RateSeries& s, double lo, double hi, double half) {
  if (s.t.size() < 3) throw std::invalid_argument("derivative_jump: series too short");
  const double dt = s.t[1] - s.t[0];
  const auto shift = static_cast<std::ptrdiff_t>(std::llround(half / dt));
  const auto n = static_cast<std::ptrdiff_t>(s.t.size());
  double best = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (s.t[i] < lo - 1e-12 || s.t[i] > hi + 1e-12) continue;
    if (i - shift < 0 || i + shift >= n) continue;
    best = std::max(best, std::abs(s.drate_pprp[i + shift] - s.drate_pprp[i - shift]));
  }
  return best;
}

std::vector<SizeScanEntry> size_scan(const ProtocolSpec& spec, std::vector<int> two_j_list,
                                     std::vector<double> taus, const std::vector<double>& t,
                                     unsigned threads, Arithmetic arithmetic) {
  if (two_j_list.empty()) throw std::invalid_argument("size_scan: empty j list");
  if (taus.empty()) throw std::invalid_argument("size_scan: empty tau list");
  std::sort(two_j_list.begin(), two_j_list.end());
  std::sort(taus.begin(), taus.end());
  std::vector<SizeScanEntry> out(two_j_list.size() * taus.size());
  // Sizes run one after another; the extended path spreads its own work over threads.
  const unsigned outer = arithmetic == Arithmetic::extended ? 1u : threads;
  const unsigned inner = arithmetic == Arithmetic::extended ? threads : 1u;
  parallel_for(two_j_list.size(), outer, [&](std::size_t i) {
    for (std::size_t k = 0; k < taus.size(); ++k) out[i * taus.size() + k].two_j = two_j_list[i];
    try {
      ProtocolSpec s = spec;
      s.two_j = two_j_list[i];
      const ProtocolContext ctx(s);
      std::vector<RateSeries> series;
      if (arithmetic == Arithmetic::extended) {
        series = precise_rate_series(ctx, taus, t, {.digits = 0, .threads = inner});
      } else {
        for (double tau : taus) {
          series.push_back(rate_series(ctx.final_overlaps(tau), ctx.final_system(), t));
          series.back().tau_int = tau;
        }
      }
      for (std::size_t k = 0; k < taus.size(); ++k) out[i * taus.size() + k].series = std::move(series[k]);
    } catch (const std::exception& e) {
      for (std::size_t k = 0; k < taus.size(); ++k) out[i * taus.size() + k].error = e.what();
    }
  });
  return out;
}

}  // namespace almg
