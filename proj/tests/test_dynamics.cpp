#include <gtest/gtest.h>

#include <cmath>

#include "almg/dpt1.hpp"
#include "oracle.hpp"

using namespace almg;

namespace {

// exp(-i H t) from a dense diagonalization of the ladder-built Hamiltonian.
CMat dense_propagator(const ModelParams& par, double t) {
  Eigen::SelfAdjointEigenSolver<CMat> es(oracle::hamiltonian(par.xi(), par.alpha(), par.two_j()));
  CVec phase(es.eigenvalues().size());
  for (int i = 0; i < phase.size(); ++i) phase[i] = std::polar(1.0, -es.eigenvalues()[i] * t);
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

ProtocolSpec small_spec(int two_j) {
  ProtocolSpec s;
  s.two_j = two_j;
  s.tau_fin = 50.0;
  s.dt = 0.5;
  return s;
}

CVec random_state(int dim, unsigned seed) {
  CVec v(dim);
  for (int k = 0; k < dim; ++k) {
    seed = seed * 1103515245u + 12345u;
    const double a = ((seed >> 9) % 1000) / 1000.0 - 0.5;
    seed = seed * 1103515245u + 12345u;
    const double b = ((seed >> 9) % 1000) / 1000.0 - 0.5;
    v[k] = cplx(a, b);
  }
  return v.normalized();
}

}  // namespace

TEST(Protocol, SpecValidation) {
  ProtocolSpec s;
  EXPECT_NO_THROW(s.validate());
  for (auto bad : {+[](ProtocolSpec& x) { x.two_j = 0; }, +[](ProtocolSpec& x) { x.state.p = 1.5; },
                   +[](ProtocolSpec& x) { x.tau_int = -0.1; }, +[](ProtocolSpec& x) { x.tau_fin = 0.0; },
                   +[](ProtocolSpec& x) { x.dt = 0.0; }, +[](ProtocolSpec& x) { x.state.phi = NAN; }}) {
    ProtocolSpec t;
    bad(t);
    EXPECT_THROW(t.validate(), std::invalid_argument);
  }
}

TEST(Protocol, TopDoubletConvention) {
  const EigenSystem eig = diagonalize(ModelParams(0.6, -2.0, 60));
  const TopDoublet top = top_doublet(eig);
  EXPECT_GT(top.jy_cross, 0.0);
  const cplx elem = top.plus.cast<cplx>().dot(oracle::jy(60) * top.minus.cast<cplx>());
  EXPECT_NEAR(elem.imag(), top.jy_cross, 1e-12);
  // Each vector is the top of its own parity block of the dense Hamiltonian.
  const CMat h = oracle::hamiltonian(0.6, -2.0, 60);
  for (int parity : {0, 1}) {
    const Vec& v = parity ? top.minus : top.plus;
    std::vector<int> idx;
    for (int k = parity; k <= 60; k += 2) idx.push_back(k);
    CMat block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = h(idx[a], idx[b]);
    EXPECT_NEAR(v.norm(), 1.0, 1e-13);
    EXPECT_NEAR((v.cast<cplx>().dot(h * v.cast<cplx>())).real(), oracle::eigenvalues(block).maxCoeff(), 1e-8);
  }
  for (int k = 0; k <= 60; k += 2) EXPECT_EQ(top.minus[k], 0.0);
  for (int k = 1; k <= 60; k += 2) EXPECT_EQ(top.plus[k], 0.0);
}

TEST(Protocol, InitialSuperposition) {
  const EigenSystem eig = diagonalize(ModelParams(0.6, -2.0, 40));
  const TopDoublet top = top_doublet(eig);
  for (Superposition s : {kS1, kS2}) {
    const StateVector psi = prepare_initial(eig, s);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-13);
    const cplx a = top.plus.cast<cplx>().dot(psi);
    const cplx b = top.minus.cast<cplx>().dot(psi);
    EXPECT_NEAR(std::norm(a), s.p, 1e-13);
    EXPECT_NEAR(std::norm(b), 1 - s.p, 1e-13);
    EXPECT_LT(std::abs(b / a - std::polar(std::sqrt((1 - s.p) / s.p), s.phi)), 1e-12);
  }
  // With Im<+|Jy|-> > 0 and phi = 3pi/2, <Jy> = jy_cross.
  const auto j = spin_expectations(40, prepare_initial(eig, kS1));
  EXPECT_NEAR(j[1], top.jy_cross, 1e-10);
  EXPECT_LT(prepare_initial(ModelParams(0.6, -2.0, 40), kS1).cwiseAbs().maxCoeff() -
                prepare_initial(eig, kS1).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Protocol, EvolutionMatchesDensePropagator) {
  const ModelParams par(0.2, -0.8, 20);
  const EigenSystem eig = diagonalize(par);
  const CVec psi = random_state(21, 3);
  for (double t : {0.0, 0.37, 5.0, 41.3}) {
    const CVec ref = dense_propagator(par, t) * psi;
    EXPECT_LT((evolve(psi, eig, t) - ref).cwiseAbs().maxCoeff(), 1e-10) << t;
    EXPECT_LT((eig.synthesize(evolve(eig.project(psi), eig, t)) - ref).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_LT((eig.synthesize(eig.project(psi)) - psi).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Protocol, Expval) {
  const CVec psi = random_state(9, 11);
  const CMat jx = oracle::jx(8);
  const Expectation e = expval(psi, jx);
  EXPECT_NEAR(e.value, spin_expectations(8, psi)[0], 1e-13);
  EXPECT_LT(e.imaginary_residue, 1e-14);
  CMat bad = jx;
  bad(0, 1) += 1.0;
  EXPECT_THROW(expval(psi, bad), std::invalid_argument);
}

TEST(Protocol, ContextAndRun) {
  ProtocolSpec spec = small_spec(30);
  spec.tau_int = 1.7;
  const ProtocolContext ctx(spec);
  const CVec psi0 = prepare_initial(spec.theta_ini(), spec.state);
  EXPECT_LT((ctx.initial_state() - psi0).cwiseAbs().maxCoeff(), 1e-13);
  const CVec at = dense_propagator(spec.theta_int(), 1.7) * psi0;
  EXPECT_LT((ctx.state_at(1.7) - at).cwiseAbs().maxCoeff(), 1e-10);

  const ProtocolRun run = run_protocol(ctx);
  EXPECT_EQ(run.tau_int(), 1.7);
  const auto grid = run.grid();
  ASSERT_EQ(grid.size(), 101u);
  EXPECT_NEAR(grid.back(), 50.0, 1e-12);
  const CVec later = dense_propagator(spec.theta_fin(), 12.5) * at;
  EXPECT_LT((run.state(12.5) - later).cwiseAbs().maxCoeff(), 1e-9);
  const Overlaps c = ctx.final_overlaps(1.7);
  EXPECT_NEAR(c.norm_squared(), 1.0, 1e-12);
}

TEST(Protocol, Ldos) {
  const ProtocolSpec spec = small_spec(40);
  const ProtocolContext ctx(spec);
  const EigenSystem& fin = ctx.final_system();
  const auto crit = classical::critical_energies(spec.theta_fin());
  const Ldos d = ldos(ctx.final_overlaps(0.5), fin, crit);
  ASSERT_EQ(d.entries.size(), 41u);
  double w = 0.0;
  for (std::size_t i = 0; i < d.entries.size(); ++i) {
    w += d.entries[i].weight;
    if (i) EXPECT_LE(d.entries[i - 1].eps, d.entries[i].eps);
  }
  EXPECT_NEAR(w, 1.0, 1e-12);
  EXPECT_NEAR(d.occupation[0] + d.occupation[1] + d.occupation[2], 1.0, 1e-12);
  // Moments from the dense Hamiltonian.
  const CVec psi = ctx.state_at(0.5);
  const CMat h = oracle::hamiltonian(0.5, -0.6, 40) / 40.0;
  const double m1 = expval(psi, h).value;
  const double m2 = expval(psi, h * h).value;
  EXPECT_NEAR(d.mean, m1, 1e-12);
  EXPECT_NEAR(d.sigma, std::sqrt(m2 - m1 * m1), 1e-9);

  const Ldos outside = ldos(ctx.final_overlaps(0.5), fin, classical::critical_energies({0.0, 0.0, 40}));
  EXPECT_TRUE(std::isnan(outside.occupation[0]));
}

TEST(Protocol, UniformGrid) {
  const auto g = uniform_grid(1.0, 0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g[3], 0.75);
  EXPECT_EQ(uniform_grid(0.0, 0.1).size(), 1u);
  EXPECT_THROW(uniform_grid(1.0, 0.0), std::invalid_argument);
}

TEST(Observables, ExpectationsAgreeWithDense) {
  const ModelParams par(0.5, -0.6, 24);
  const EigenSystem eig = diagonalize(par);
  const CVec psi = random_state(25, 5);
  const Overlaps c = eig.project(psi);
  for (Axis a : {Axis::x, Axis::y, Axis::z})
    EXPECT_NEAR(expectation(eigen_collective(a, eig), c), spin_expectations(24, psi)[static_cast<int>(a)], 1e-12);
  const EigenOperator pi = EigenOperator::from_m_diagonal(parity_diagonal(24), eig);
  EXPECT_NEAR(expectation(pi, c), expval(psi, oracle::parity(24)).value, 1e-12);
  for (double t : {0.3, 7.0}) {
    const CVec pt = dense_propagator(par, t) * psi;
    EXPECT_NEAR(expectation_at(eigen_collective(Axis::x, eig), c, eig, t), spin_expectations(24, pt)[0], 1e-10);
    EXPECT_NEAR(expectation_at(eigen_collective(Axis::z, eig), c, eig, t), spin_expectations(24, pt)[2], 1e-10);
  }
}

TEST(Observables, HorizonFactor) {
  EXPECT_EQ(horizon_factor(0.0, 3.0), cplx(1.0, 0.0));
  for (double w : {0.1, -2.0, 1e-3}) {
    const double tau = 4.0;
    const cplx ref = (std::exp(cplx(0, w * tau)) - 1.0) / cplx(0, w * tau);
    EXPECT_LT(std::abs(horizon_factor(w, tau) - ref), 1e-9);
  }
  // Small w: 1 + i w tau / 2 - (w tau)^2 / 6.
  EXPECT_LT(std::abs(horizon_factor(1e-9, 4.0) - cplx(1.0, 2e-9)), 1e-15);
  EXPECT_LT(std::abs(horizon_factor(1e-14, 1.0) - 1.0), 1e-13);
}

TEST(Observables, HorizonAverageMatchesQuadrature) {
  const ModelParams par(0.5, -0.6, 16);
  const EigenSystem eig = diagonalize(par);
  const Overlaps c = eig.project(random_state(17, 9));
  const double tau = 20.0;
  const int n = 40000;
  for (Axis a : {Axis::x, Axis::z}) {
    const EigenOperator op = eigen_collective(a, eig);
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      sum += w * expectation_at(op, c, eig, tau * i / n);
    }
    EXPECT_NEAR(HorizonAverager(op, eig, tau)(c), sum / n, 1e-5);
  }
}

TEST(Observables, InfiniteTimeAverageLimits) {
  const EigenSystem eig = diagonalize(ModelParams(0.5, -0.6, 16));
  const Overlaps c = eig.project(random_state(17, 21));
  const EigenOperator jx = eigen_collective(Axis::x, eig);
  const EigenOperator jz = eigen_collective(Axis::z, eig);
  // No pairs: odd operators average out, even ones keep the diagonal ensemble.
  EXPECT_EQ(infinite_time_average(jx, c, eig, 0.0), 0.0);
  double diag = 0.0;
  for (int n = 0; n < eig.even().size(); ++n) diag += std::norm(c.even[n]) * jz.ee(n, n).real();
  for (int n = 0; n < eig.odd().size(); ++n) diag += std::norm(c.odd[n]) * jz.oo(n, n).real();
  EXPECT_NEAR(infinite_time_average(jz, c, eig, 0.0), diag, 1e-12);
  // Every pair: the t = 0 value.
  EXPECT_NEAR(infinite_time_average(jx, c, eig, 1e9), expectation(jx, c), 1e-12);
  EXPECT_NEAR(infinite_time_average(jz, c, eig, 1e9), expectation(jz, c), 1e-12);
}

TEST(Series, MakeAndAverage) {
  EXPECT_THROW(make_series({0.0, 0.1, 0.3}, {1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(make_series({0.0, 0.1}, {1}), std::invalid_argument);
  const TimeSeries s = make_series({1.0, 1.5, 2.0, 2.5}, {0.0, 1.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(s.dt, 0.5);
  EXPECT_NEAR(time_average(s), 1.5, 1e-14);
  EXPECT_EQ(time_average(make_series({3.0}, {7.0})), 7.0);
  EXPECT_NEAR(default_gap_threshold(2000.0), kPi / 1000.0, 1e-16);
}

TEST(Scan, RowMatchesBruteForce) {
  ProtocolSpec spec = small_spec(40);
  spec.tau_fin = 30.0;
  const ScanContext ctx(spec);
  const double tau = 0.8;
  const ScanRow row = ctx.row(tau);
  EXPECT_EQ(row.tau_int, tau);

  const EigenSystem& fin = ctx.protocol().final_system();
  const Overlaps c = ctx.protocol().final_overlaps(tau);
  const int n = 60000;
  std::array<double, 3> avg{};
  for (int a = 0; a < 3; ++a) {
    const EigenOperator op = eigen_collective(static_cast<Axis>(a), fin);
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) sum += ((i == 0 || i == n) ? 0.5 : 1.0) * expectation_at(op, c, fin, 30.0 * i / n);
    avg[a] = sum / n;
  }
  EXPECT_NEAR(row.jx, avg[0], 1e-5);
  EXPECT_NEAR(row.jy, avg[1], 1e-5);
  EXPECT_NEAR(row.jz, avg[2], 1e-5);
  EXPECT_NEAR(row.occupation[0] + row.occupation[1] + row.occupation[2], 1.0, 1e-12);
  for (double q : {row.cx, row.cy, row.kx, row.ky}) EXPECT_LE(std::abs(q), 1.0 + 1e-12);
}

TEST(Scan, OrderingAndThreadIndependence) {
  const ScanContext ctx(small_spec(30));
  const std::vector<double> taus{1.0, 0.0, 0.5, 2.0};
  const ScanResult one = tau_scan(ctx, taus, 1);
  const ScanResult three = tau_scan(ctx, taus, 3);
  ASSERT_EQ(one.rows.size(), 4u);
  ASSERT_TRUE(one.failures.empty());
  for (std::size_t i = 0; i < 4; ++i) {
    if (i) EXPECT_LT(one.rows[i - 1].tau_int, one.rows[i].tau_int);
    EXPECT_EQ(one.rows[i].jx, three.rows[i].jx);
    EXPECT_EQ(one.rows[i].gme_jy, three.rows[i].gme_jy);
  }
  EXPECT_THROW(tau_scan(ctx, {}, 1), std::invalid_argument);
}

TEST(Protocol, ParityOfPreparedStates) {
  const EigenSystem eig = diagonalize(ModelParams(0.6, -2.0, 30));
  const CMat pi = oracle::parity(30);
  EXPECT_NEAR(expval(prepare_initial(eig, {1.0, 0.0}), pi).value, 1.0, 1e-13);
  EXPECT_NEAR(expval(prepare_initial(eig, {0.0, 0.0}), pi).value, -1.0, 1e-13);
  EXPECT_NEAR(expval(prepare_initial(eig, kS1), pi).value, 0.0, 1e-13);
  // Parity is conserved and evolution is reversible.
  const CVec psi = prepare_initial(eig, kS2);
  const EigenSystem fin = diagonalize(ModelParams(0.5, -0.6, 30));
  const double p0 = expval(psi, pi).value;
  for (double t : {0.7, 13.0}) {
    const CVec u = evolve(psi, fin, t);
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
    EXPECT_NEAR(expval(u, pi).value, p0, 1e-12);
    EXPECT_LT((evolve(u, fin, -t) - psi).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Protocol, InitialStateMoments) {
  // Localized in the P < 0 lobe: <Jy> > 0; the doublet carries no Jx.
  const EigenSystem eig = diagonalize(ModelParams(0.6, -2.0, 200));
  const CVec psi = prepare_initial(eig, kS1);
  const auto j = spin_expectations(200, psi);
  EXPECT_GT(j[1], 0.0);
  EXPECT_NEAR(j[0], 0.0, 1e-10);
}

TEST(Protocol, ZeroIntermediateTimeAndOwnHamiltonian) {
  ProtocolSpec spec = small_spec(40);
  const ProtocolContext ctx(spec);
  EXPECT_LT((ctx.state_at(0.0) - ctx.initial_state()).cwiseAbs().maxCoeff(), 1e-14);
  // Intermediate = final parameters: populations do not depend on tau_int.
  spec.xi_int = spec.xi_fin;
  spec.alpha_int = spec.alpha_fin;
  const ProtocolContext same(spec);
  const Overlaps a = same.final_overlaps(0.0), b = same.final_overlaps(3.3);
  EXPECT_LT((a.even.cwiseAbs2() - b.even.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.odd.cwiseAbs2() - b.odd.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Protocol, DefaultQuenchLandsAboveSecondCriticalEnergy) {
  const ProtocolContext ctx(small_spec(200));
  const auto crit = classical::critical_energies(ctx.spec().theta_fin());
  EXPECT_GT(ldos(ctx.final_overlaps(0.5), ctx.final_system(), crit).mean, 0.5);
}

TEST(Tracking, QuantumColumnsAndClassicalStart) {
  const ProtocolContext ctx(small_spec(200));
  const auto t = uniform_grid(2.0, 0.1);
  const auto rows = track_evolution(ctx, 0.5, t, true);
  ASSERT_EQ(rows.size(), t.size());
  const Overlaps c = ctx.final_overlaps(0.5);
  const EigenOperator jy = eigen_collective(Axis::y, ctx.final_system());
  for (std::size_t i = 0; i < t.size(); i += 5)
    EXPECT_NEAR(rows[i].jy, expectation_at(jy, c, ctx.final_system(), t[i]), 1e-12);
  // The orbit starts on the state's own first moments.
  EXPECT_NEAR(rows[0].jy_classical / 100, rows[0].jy / 100, 0.05);
  EXPECT_NEAR(rows[0].jx_classical / 100, rows[0].jx / 100, 0.05);
  for (const auto& r : rows) EXPECT_TRUE(std::isfinite(r.jy_classical));

  const auto bare = track_evolution(ctx, 0.5, {0.0, 1.0}, false);
  EXPECT_TRUE(std::isnan(bare[1].jx_classical));
  EXPECT_THROW(track_evolution(ctx, 0.5, {1.0, 0.5}, false), std::invalid_argument);
}
