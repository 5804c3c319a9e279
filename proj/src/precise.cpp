#include "almg/precise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/mpfr.hpp>

#include "almg/parallel.hpp"

namespace almg {

namespace {

namespace mp = boost::multiprecision;

template <unsigned D>
using Real = mp::number<mp::mpfr_float_backend<D>, mp::et_off>;

template <class T>
struct Tridiag {
  std::vector<T> d, e;
  std::size_t size() const { return d.size(); }
};

// Same entries as build_blocks, evaluated at working precision.
template <class T>
Tridiag<T> block_matrix(const ModelParams& par, Parity parity) {
  const int two_j = par.two_j();
  const T j = T(two_j) / 2;
  const T xi = par.xi();
  const T alpha = par.alpha();
  Tridiag<T> b;
  for (int k = parity == Parity::even ? 0 : 1; k <= two_j; k += 2) {
    const T jpm = k;
    const T m = jpm - j;
    const T jx2 = (j * (j + 1) - m * m) / 2;
    b.d.push_back((1 - xi) * jpm + (2 * xi / j) * (j * j - jx2) + (alpha / (2 * j)) * jpm * (jpm + 1));
    if (k + 2 <= two_j)
      b.e.push_back(-(xi / (2 * j)) * sqrt(T(two_j - k) * T(k + 1)) * sqrt(T(two_j - k - 1) * T(k + 2)));
  }
  return b;
}

// (A - lam) x = rhs, Gaussian elimination with partial pivoting; x holds rhs on entry.
template <class T>
void solve_shifted(const Tridiag<T>& a, const T& lam, std::vector<T>& x) {
  const std::size_t n = a.size();
  if (n == 1) {
    T p = a.d[0] - lam;
    if (p == 0) p = std::numeric_limits<T>::min();
    x[0] /= p;
    return;
  }
  std::vector<T> dl(a.e), dd(n), du(a.e), du2(n, T(0));
  for (std::size_t i = 0; i < n; ++i) dd[i] = a.d[i] - lam;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (abs(dd[i]) >= abs(dl[i])) {
      if (dd[i] == 0) dd[i] = std::numeric_limits<T>::min();
      const T f = dl[i] / dd[i];
      dd[i + 1] -= f * du[i];
      x[i + 1] -= f * x[i];
    } else {
      const T f = dd[i] / dl[i];
      dd[i] = dl[i];
      const T tmp = dd[i + 1];
      dd[i + 1] = du[i] - f * tmp;
      du[i] = tmp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= f * x[i];
    }
  }
  if (dd[n - 1] == 0) dd[n - 1] = std::numeric_limits<T>::min();
  x[n - 1] /= dd[n - 1];
  x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i];
}

template <class T>
T rayleigh(const Tridiag<T>& a, const std::vector<T>& v) {
  T s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += a.d[i] * v[i] * v[i];
    if (i + 1 < v.size()) s += 2 * a.e[i] * v[i] * v[i + 1];
  }
  return s;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Rayleigh quotient iteration from column `col` of the double eigenvectors.
// Keeps the sign of the starting vector.
template <unsigned D>
Real<D> refine(const Tridiag<Real<D>>& a, const ParitySector& s, int col, std::vector<Real<D>>& v) {
  using T = Real<D>;
  const std::size_t n = a.size();
  v.resize(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = s.vectors(static_cast<Eigen::Index>(k), col);
  T nrm = sqrt(dot(v, v));
  for (auto& x : v) x /= nrm;
  T lam = rayleigh(a, v);
  const T tol = pow(T(10), 3 - static_cast<int>(D)) * (abs(lam) > 1 ? abs(lam) : T(1));
  std::vector<T> y;
  for (int it = 0; it < 12; ++it) {
    y = v;
    solve_shifted(a, lam, y);
    nrm = sqrt(dot(y, y));
    if (dot(y, v) < 0) nrm = -nrm;
    for (std::size_t k = 0; k < n; ++k) v[k] = y[k] / nrm;
    const T next = rayleigh(a, v);
    const bool done = it > 0 && abs(next - lam) <= tol;
    lam = next;
    if (done) {
      const double e0 = s.energies[col];
      if (std::abs(static_cast<double>(lam) - e0) > 1e-6 * std::max(1.0, std::abs(e0)))
        throw NumericalError("precise refinement drifted to another level");
      return lam;
    }
  }
  throw NumericalError("precise refinement did not converge");
}

struct Chunk {
  std::size_t lo, hi;
};

std::vector<Chunk> chunks(std::size_t n, unsigned threads) {
  const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<Chunk> out;
  for (std::size_t p = 0; p < parts; ++p) out.push_back({n * p / parts, n * (p + 1) / parts});
  return out;
}

template <unsigned D>
class Engine {
 public:
  using T = Real<D>;

  Engine(const ProtocolContext& ctx, unsigned threads) : ctx_(ctx), threads_(std::max(1u, threads)) {}

  std::vector<RateSeries> run(const std::vector<double>& taus, const std::vector<double>& t) {
    prepare_initial_state();
    std::vector<RateSeries> out;
    std::array<std::vector<std::vector<T>>, 2> weights;  // [block][tau][level]
    std::array<std::vector<T>, 2> energies;
    for (int b = 0; b < 2; ++b) {
      const Parity p = b == 0 ? Parity::even : Parity::odd;
      const auto psi_tau = intermediate_stage(p, taus);
      final_stage(p, psi_tau, energies[b], weights[b]);
    }
    for (std::size_t i = 0; i < taus.size(); ++i)
      out.push_back(series(taus[i], t, energies, {&weights[0][i], &weights[1][i]}));
    return out;
  }

 private:
  struct Block {
    std::vector<T> re, im;
  };

  void prepare_initial_state() {
    const EigenSystem& ini = ctx_.initial_system();
    const ModelParams& par = ini.params();
    std::vector<T> plus, minus;
    refine<D>(block_matrix<T>(par, Parity::even), ini.even(), ini.even().size() - 1, plus);
    refine<D>(block_matrix<T>(par, Parity::odd), ini.odd(), ini.odd().size() - 1, minus);
    // Im <+|Jy|->: even entries of |+> sit at k = 2a, odd entries of |-> at k = 2b+1.
    const int two_j = par.two_j();
    T im = 0;
    for (int k = 0; k < two_j; ++k) {
      const T r = sqrt(T(two_j - k) * T(k + 1)) / 2;
      if (k % 2 == 0)
        im += r * plus[k / 2] * minus[k / 2];
      else
        im -= r * plus[(k + 1) / 2] * minus[k / 2];
    }
    if (im < 0)
      for (auto& x : minus) x = -x;
    const Superposition s = ctx_.spec().state;
    const T sp = sqrt(T(s.p));
    const T sm = sqrt(1 - T(s.p));
    const T c = cos(T(s.phi));
    const T sn = sin(T(s.phi));
    psi0_[0].re.resize(plus.size());
    psi0_[0].im.assign(plus.size(), T(0));
    for (std::size_t k = 0; k < plus.size(); ++k) psi0_[0].re[k] = sp * plus[k];
    psi0_[1].re.resize(minus.size());
    psi0_[1].im.resize(minus.size());
    for (std::size_t k = 0; k < minus.size(); ++k) {
      psi0_[1].re[k] = sm * c * minus[k];
      psi0_[1].im[k] = sm * sn * minus[k];
    }
  }

  // psi(tau) on one block for every tau.
  std::vector<Block> intermediate_stage(Parity p, const std::vector<double>& taus) {
    const EigenSystem& eig = ctx_.intermediate_system();
    const ParitySector& sec = eig.sector(p);
    const Tridiag<T> a = block_matrix<T>(eig.params(), p);
    const Block& psi0 = psi0_[p == Parity::even ? 0 : 1];
    const std::size_t n = a.size();
    const auto parts = chunks(n, threads_);
    std::vector<std::vector<Block>> partial(parts.size(), std::vector<Block>(taus.size()));
    parallel_for(parts.size(), threads_, [&](std::size_t c) {
      for (auto& blk : partial[c]) {
        blk.re.assign(n, T(0));
        blk.im.assign(n, T(0));
      }
      std::vector<T> v;
      for (std::size_t lvl = parts[c].lo; lvl < parts[c].hi; ++lvl) {
        const T e = refine<D>(a, sec, static_cast<int>(lvl), v);
        const T pr = dot(v, psi0.re);
        const T pi = dot(v, psi0.im);
        for (std::size_t i = 0; i < taus.size(); ++i) {
          const T ph = e * T(taus[i]);
          const T co = cos(ph), si = sin(ph);
          const T qr = pr * co + pi * si;
          const T qi = pi * co - pr * si;
          Block& dst = partial[c][i];
          for (std::size_t k = 0; k < n; ++k) {
            dst.re[k] += qr * v[k];
            dst.im[k] += qi * v[k];
          }
        }
      }
    });
    std::vector<Block> out = std::move(partial[0]);
    for (std::size_t c = 1; c < partial.size(); ++c)
      for (std::size_t i = 0; i < taus.size(); ++i)
        for (std::size_t k = 0; k < n; ++k) {
          out[i].re[k] += partial[c][i].re[k];
          out[i].im[k] += partial[c][i].im[k];
        }
    return out;
  }

  void final_stage(Parity p, const std::vector<Block>& psi_tau, std::vector<T>& energies,
                   std::vector<std::vector<T>>& weights) {
    const EigenSystem& eig = ctx_.final_system();
    const ParitySector& sec = eig.sector(p);
    const Tridiag<T> a = block_matrix<T>(eig.params(), p);
    const std::size_t n = a.size();
    energies.assign(n, T(0));
    weights.assign(psi_tau.size(), std::vector<T>(n, T(0)));
    const auto parts = chunks(n, threads_);
    parallel_for(parts.size(), threads_, [&](std::size_t c) {
      std::vector<T> v;
      for (std::size_t lvl = parts[c].lo; lvl < parts[c].hi; ++lvl) {
        energies[lvl] = refine<D>(a, sec, static_cast<int>(lvl), v);
        for (std::size_t i = 0; i < psi_tau.size(); ++i) {
          const T pr = dot(v, psi_tau[i].re);
          const T pi = dot(v, psi_tau[i].im);
          weights[i][lvl] = pr * pr + pi * pi;
        }
      }
    });
  }

  RateSeries series(double tau, const std::vector<double>& t, const std::array<std::vector<T>, 2>& energies,
                    std::array<const std::vector<T>*, 2> weights) {
    const std::size_t nt = t.size();
    const double dt = t[1] - t[0];
    std::array<std::vector<T>, 2> ar, ai;
    for (int b = 0; b < 2; ++b) {
      ar[b].assign(nt, T(0));
      ai[b].assign(nt, T(0));
      const auto parts = chunks(nt, threads_);
      parallel_for(parts.size(), threads_, [&](std::size_t c) {
        const std::size_t k0 = parts[c].lo;
        for (std::size_t lvl = 0; lvl < energies[b].size(); ++lvl) {
          const T& w = (*weights[b])[lvl];
          const T& e = energies[b][lvl];
          const T step_c = cos(e * T(dt)), step_s = -sin(e * T(dt));
          T zr = cos(e * T(t[k0])), zi = -sin(e * T(t[k0]));
          for (std::size_t k = k0; k < parts[c].hi; ++k) {
            ar[b][k] += w * zr;
            ai[b][k] += w * zi;
            const T next = zr * step_c - zi * step_s;
            zi = zr * step_s + zi * step_c;
            zr = next;
          }
        }
      });
    }

    RateSeries s;
    s.two_j = ctx_.spec().two_j;
    s.n_norm = ctx_.final_system().params().particles();
    s.tau_int = tau;
    s.t = t;
    s.digits = static_cast<int>(D);
    s.sp.resize(nt);
    s.pprp.resize(nt);
    s.pprp_plus.resize(nt);
    s.pprp_minus.resize(nt);
    s.rate_sp.resize(nt);
    s.rate_pprp.resize(nt);

    // Absolute error of an amplitude: working epsilon times the number of
    // terms and the largest accumulated phase, with three digits to spare.
    double e_max = 0.0;
    for (int b = 0; b < 2; ++b)
      for (const T& e : energies[b]) e_max = std::max(e_max, std::abs(static_cast<double>(e)));
    const T noise = pow(T(10), 3 - static_cast<int>(D)) * T(ctx_.final_system().dim()) *
                    T(1.0 + e_max * std::abs(t.back()));
    const T floor2 = noise * noise * 1e6;
    const T n_norm = s.n_norm;
    for (std::size_t k = 0; k < nt; ++k) {
      const T lp = ar[0][k] * ar[0][k] + ai[0][k] * ai[0][k];
      const T lm = ar[1][k] * ar[1][k] + ai[1][k] * ai[1][k];
      const T sr = ar[0][k] + ar[1][k], si = ai[0][k] + ai[1][k];
      const T l = lp + lm;
      const T sp = sr * sr + si * si;
      if (l < floor2 || sp < floor2) s.underflow = true;
      s.pprp_plus[k] = static_cast<double>(lp);
      s.pprp_minus[k] = static_cast<double>(lm);
      s.pprp[k] = std::min(1.0, static_cast<double>(l));
      s.sp[k] = std::min(1.0, static_cast<double>(sp));
      s.rate_pprp[k] = std::max(0.0, static_cast<double>(-log(l) / n_norm));
      s.rate_sp[k] = std::max(0.0, static_cast<double>(-log(sp) / n_norm));
    }
    s.drate_pprp = rate_derivative(s.rate_pprp, dt);
    if (auto kink = detect_kink(s.rate_pprp)) s.kink_time = t[*kink];
    return s;
  }

  const ProtocolContext& ctx_;
  unsigned threads_;
  std::array<Block, 2> psi0_;
};

std::vector<RateSeries> run_at(int digits, const ProtocolContext& ctx, const std::vector<double>& taus,
                               const std::vector<double>& t, unsigned threads) {
  switch (digits) {
    case 50: return Engine<50>(ctx, threads).run(taus, t);
    case 100: return Engine<100>(ctx, threads).run(taus, t);
    case 200: return Engine<200>(ctx, threads).run(taus, t);
    case 400: return Engine<400>(ctx, threads).run(taus, t);
    default:
      throw std::invalid_argument("precise: unsupported precision " + std::to_string(digits) +
                                  " (levels are 50, 100, 200, 400)");
  }
}

}  // namespace

int default_digits(int two_j) {
  const double need = 0.0326 * two_j + 25.0;
  for (int level : kPrecisionLevels)
    if (level >= need) return level;
  return kPrecisionLevels[std::size(kPrecisionLevels) - 1];
}

std::vector<RateSeries> precise_rate_series(const ProtocolContext& ctx, const std::vector<double>& taus,
                                            const std::vector<double>& t, const PreciseOptions& opt) {
  if (taus.empty()) throw std::invalid_argument("precise_rate_series: no tau_int given");
  if (t.size() < 3) throw std::invalid_argument("precise_rate_series: need at least 3 times");
  const double dt = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(t[i])))
      throw std::invalid_argument("precise_rate_series: time grid must be uniform");
  for (double tau : taus)
    if (!(tau >= 0.0)) throw std::invalid_argument("precise_rate_series: tau_int must be >= 0");

  int digits = opt.digits ? opt.digits : default_digits(ctx.spec().two_j);
  for (;;) {
    auto out = run_at(digits, ctx, taus, t, opt.threads);
    const bool unresolved = std::any_of(out.begin(), out.end(), [](const RateSeries& s) { return s.underflow; });
    const int* next = std::upper_bound(std::begin(kPrecisionLevels), std::end(kPrecisionLevels), digits);
    if (!unresolved || opt.digits || next == std::end(kPrecisionLevels)) return out;
    digits = *next;
  }
}

}  // namespace almg
