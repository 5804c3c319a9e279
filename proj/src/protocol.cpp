#include "almg/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "almg/parallel.hpp"

namespace almg {

void ProtocolSpec::validate() const {
  if (two_j < 1) throw std::invalid_argument("two_j must be >= 1");
  (void)theta_ini();
  (void)theta_int();
  (void)theta_fin();
  if (!(state.p >= 0.0 && state.p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
  if (!std::isfinite(state.phi)) throw std::invalid_argument("phi must be finite");
  if (!(tau_int >= 0.0)) throw std::invalid_argument("tau_int must be >= 0");
  if (!(tau_fin > 0.0)) throw std::invalid_argument("tau_fin must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}

TopDoublet top_doublet(const EigenSystem& eig) {
  if (eig.even().size() == 0 || eig.odd().size() == 0)
    throw std::invalid_argument("top_doublet: a parity sector is missing");
  TopDoublet out;
  out.plus = eig.full_vector({Parity::even, eig.even().size() - 1});
  out.minus = eig.full_vector({Parity::odd, eig.odd().size() - 1});
  const CVec jy_minus = apply_collective(eig.params().two_j(), Axis::y, out.minus.cast<cplx>());
  double im = out.plus.cast<cplx>().dot(jy_minus).imag();
  if (im < 0.0) {
    out.minus = -out.minus;
    im = -im;
  }
  out.jy_cross = im;
  return out;
}

StateVector prepare_initial(const EigenSystem& eig, Superposition s) {
  if (!(s.p >= 0.0 && s.p <= 1.0)) throw std::invalid_argument("prepare_initial: p must lie in [0,1]");
  const TopDoublet top = top_doublet(eig);
  StateVector psi = std::sqrt(s.p) * top.plus.cast<cplx>() +
                    std::polar(std::sqrt(1.0 - s.p), s.phi) * top.minus.cast<cplx>();
  psi.normalize();
  return psi;
}

StateVector prepare_initial(const ModelParams& theta_ini, Superposition s) {
  return prepare_initial(diagonalize(theta_ini), s);
}

Overlaps evolve(const Overlaps& c, const EigenSystem& eig, double t) {
  Overlaps out = c;
  for (Parity p : {Parity::even, Parity::odd}) {
    const Vec& e = eig.sector(p).energies;
    CVec& v = out.sector(p);
    if (v.size() != e.size()) throw std::invalid_argument("evolve: dimension mismatch");
    for (Eigen::Index n = 0; n < v.size(); ++n) v[n] *= std::polar(1.0, -e[n] * t);
  }
  return out;
}

StateVector evolve(const StateVector& psi, const EigenSystem& eig, double t) {
  if (psi.size() != eig.dim()) throw std::invalid_argument("evolve: dimension mismatch");
  return eig.synthesize(evolve(eig.project(psi), eig, t));
}

Expectation expval(const StateVector& psi, const CMat& op) {
  if (op.rows() != psi.size() || op.cols() != psi.size())
    throw std::invalid_argument("expval: dimension mismatch");
  if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, op.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("expval: operator is not Hermitian");
  const cplx v = psi.dot(op * psi);
  return {v.real(), std::abs(v.imag())};
}

ProtocolContext::ProtocolContext(const ProtocolSpec& spec) : spec_(spec) {
  spec_.validate();
  // Blocks already use both sublattices; one extra stage in flight is plenty.
  if (default_threads() > 1) {
    auto a = std::async(std::launch::async, [&] { return diagonalize(spec_.theta_ini()); });
    auto b = std::async(std::launch::async, [&] { return diagonalize(spec_.theta_int()); });
    fin_ = std::make_shared<const EigenSystem>(diagonalize(spec_.theta_fin()));
    ini_ = std::make_shared<const EigenSystem>(a.get());
    int_ = std::make_shared<const EigenSystem>(b.get());
  } else {
    ini_ = std::make_shared<const EigenSystem>(diagonalize(spec_.theta_ini()));
    int_ = std::make_shared<const EigenSystem>(diagonalize(spec_.theta_int()));
    fin_ = std::make_shared<const EigenSystem>(diagonalize(spec_.theta_fin()));
  }
  psi0_ = prepare_initial(*ini_, spec_.state);
  c_int_ = int_->project(psi0_);
}

StateVector ProtocolContext::state_at(double tau_int) const {
  if (!(tau_int >= 0.0)) throw std::invalid_argument("state_at: tau_int must be >= 0");
  return int_->synthesize(evolve(c_int_, *int_, tau_int));
}

Overlaps ProtocolContext::final_overlaps(double tau_int) const {
  return fin_->project(state_at(tau_int));
}

ProtocolRun::ProtocolRun(const ProtocolContext& ctx, double tau_int)
    : ctx_(&ctx), tau_int_(tau_int), at_tau_(ctx.state_at(tau_int)),
      c_fin_(ctx.final_system().project(at_tau_)) {}

std::vector<double> ProtocolRun::grid() const {
  return uniform_grid(ctx_->spec().tau_fin, ctx_->spec().dt);
}

StateVector ProtocolRun::state(double t) const {
  return ctx_->final_system().synthesize(evolve(c_fin_, ctx_->final_system(), t));
}

ProtocolRun run_protocol(const ProtocolContext& ctx) { return {ctx, ctx.spec().tau_int}; }

Ldos ldos(const Overlaps& c, const EigenSystem& eig, const classical::CriticalEnergies& crit) {
  Ldos out;
  for (Parity p : {Parity::even, Parity::odd}) {
    const CVec& v = c.sector(p);
    if (v.size() != eig.sector(p).size()) throw std::invalid_argument("ldos: dimension mismatch");
    for (int n = 0; n < v.size(); ++n) out.entries.push_back({eig.eps({p, n}), std::norm(v[n]), p, n});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const LdosEntry& a, const LdosEntry& b) { return a.eps < b.eps; });
  double total = 0.0;
  for (const auto& e : out.entries) total += e.weight;
  if (!(total > 0.0)) throw std::invalid_argument("ldos: zero state");
  for (auto& e : out.entries) e.weight /= total;

  for (const auto& e : out.entries) out.mean += e.weight * e.eps;
  double var = 0.0;
  for (const auto& e : out.entries) var += e.weight * (e.eps - out.mean) * (e.eps - out.mean);
  out.sigma = std::sqrt(std::max(0.0, var));

  if (crit.three_phases) {
    out.occupation = {0.0, 0.0, 0.0};
    for (const auto& e : out.entries)
      out.occupation[static_cast<int>(classical::classify(e.eps, crit))] += e.weight;
  } else {
    out.occupation.fill(std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

std::vector<double> uniform_grid(double T, double dt) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("uniform_grid: need T >= 0, dt > 0");
  const auto n = static_cast<long long>(std::floor(T / dt + 1e-9));
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  for (long long i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
  return g;
}

}  // namespace almg
