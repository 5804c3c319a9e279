#include <gtest/gtest.h>

#include <cmath>

#include "almg/dpt2.hpp"
#include "almg/precise.hpp"
#include "oracle.hpp"

using namespace almg;

namespace {

ParitySector sector(Parity p, std::vector<int> basis, std::vector<double> e) {
  ParitySector s;
  s.parity = p;
  s.basis = std::move(basis);
  s.energies = Eigen::Map<Vec>(e.data(), static_cast<Eigen::Index>(e.size()));
  s.vectors = Mat::Identity(s.size(), s.size());
  return s;
}

std::vector<double> grid(double T, double dt) { return uniform_grid(T, dt); }

ProtocolSpec spec_for(int two_j) {
  ProtocolSpec s;
  s.two_j = two_j;
  return s;
}

}  // namespace

TEST(ReturnProbability, TwoLevel) {
  const double w = 1.3;
  const EigenSystem eig(ModelParams(0.5, -0.6, 1), sector(Parity::even, {0}, {0.0}),
                        sector(Parity::odd, {1}, {w}));
  Overlaps c;
  c.even = CVec::Constant(1, std::sqrt(0.5));
  c.odd = CVec::Constant(1, cplx(0, std::sqrt(0.5)));
  const auto t = grid(10.0, 0.1);
  const auto sp = survival(c, eig, t);
  const PprpSeries l = pprp(c, eig, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(sp[i], std::pow(std::cos(w * t[i] / 2), 2), 1e-14);
    EXPECT_NEAR(l.total[i], 0.5, 1e-15);
    EXPECT_NEAR(l.plus[i], 0.25, 1e-15);
  }
}

TEST(ReturnProbability, ExactDoubletSaturatesBound) {
  // Degenerate pairs with equal sector weights: A+ = A-, so SP = 2 L and the
  // rates differ by ln 2 / N at all times.
  const EigenSystem eig(ModelParams(0.5, -0.6, 3), sector(Parity::even, {0, 2}, {0.0, 2.0}),
                        sector(Parity::odd, {1, 3}, {0.0, 2.0}));
  Overlaps c;
  c.even = CVec(2);
  c.odd = CVec(2);
  c.even << 0.6, 0.2;
  c.odd << 0.6, 0.2;
  c.even /= std::sqrt(2 * 0.4);
  c.odd /= std::sqrt(2 * 0.4);
  const auto t = grid(3.0, 0.05);
  const RateSeries s = rate_series(c, eig, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_NEAR(s.sp[i], 2 * s.pprp[i], 1e-14);
    if (s.sp[i] > 1e-10) EXPECT_NEAR(s.rate_pprp[i] - s.rate_sp[i], std::log(2.0) / 3, 1e-12);
  }
}

TEST(ReturnProbability, DenseOracleAndBounds) {
  const ProtocolContext ctx(spec_for(20));
  const EigenSystem& fin = ctx.final_system();
  const CVec psi = ctx.state_at(0.5);
  Eigen::SelfAdjointEigenSolver<CMat> es(oracle::hamiltonian(0.5, -0.6, 20));
  const auto t = grid(20.0, 0.25);
  const auto sp = survival(psi, fin, t);
  const PprpSeries l = pprp(psi, fin, t);
  const PprpSeries lc = pprp(fin.project(psi), fin, t);
  const double l0 = l.total[0];
  EXPECT_NEAR(sp[0], 1.0, 1e-13);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CVec ph(es.eigenvalues().size());
    for (int k = 0; k < ph.size(); ++k) ph[k] = std::polar(1.0, -es.eigenvalues()[k] * t[i]);
    const CVec u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * psi;
    EXPECT_NEAR(sp[i], std::norm(psi.dot(u)), 1e-11);
    EXPECT_LE(sp[i], 2 * l.total[i] + 1e-14);
    EXPECT_LE(l.total[i], l0 + 1e-14);
    EXPECT_NEAR(l.total[i], l.plus[i] + l.minus[i], 1e-15);
    EXPECT_EQ(l.total[i], lc.total[i]);
  }
  Overlaps zero;
  zero.even = CVec::Zero(fin.even().size());
  zero.odd = CVec::Zero(fin.odd().size());
  EXPECT_THROW(return_amplitudes(zero, fin, t), std::invalid_argument);
}

TEST(Rates, Values) {
  const Rate r = rate({1.0, std::exp(-2.0), 0.0, -1e-20}, 2);
  EXPECT_EQ(r.values[0], 0.0);
  EXPECT_NEAR(r.values[1], 1.0, 1e-15);
  EXPECT_NEAR(r.values[2], -std::log(kRateFloor) / 2, 1e-12);
  ASSERT_EQ(r.underflow.size(), 2u);
  EXPECT_EQ(r.underflow[0], 2u);
  EXPECT_THROW(rate({0.5}, 0), std::invalid_argument);
}

TEST(Rates, DerivativeExactOnQuadratics) {
  std::vector<double> ramp, quad;
  for (int i = 0; i < 20; ++i) {
    const double t = 0.1 * i;
    ramp.push_back(3 * t + 1);
    quad.push_back(t * t - t);
  }
  const auto d1 = rate_derivative(ramp, 0.1);
  const auto d2 = rate_derivative(quad, 0.1);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(d1[i], 3.0, 1e-12);
    EXPECT_NEAR(d2[i], 2 * 0.1 * i - 1, 1e-12);
  }
  EXPECT_THROW(rate_derivative({1, 2}, 0.1), std::invalid_argument);
  EXPECT_THROW(rate_derivative({1, 2, 3}, 0.0), std::invalid_argument);
}

TEST(Rates, KinkDetection) {
  std::vector<double> r;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.1 * i;
    r.push_back(0.01 * t * t + std::max(0.0, t - 5.0));
  }
  const auto k = detect_kink(r);
  ASSERT_TRUE(k.has_value());
  EXPECT_EQ(*k, 50u);
  std::vector<double> line(50);
  for (int i = 0; i < 50; ++i) line[i] = 0.5 * i;
  EXPECT_FALSE(detect_kink(line).has_value());
}

TEST(Rates, SeparationAndJump) {
  RateSeries s;
  s.t = grid(10.0, 0.1);
  for (double t : s.t) {
    s.rate_sp.push_back(0.1 * t);
    s.rate_pprp.push_back(t < 6.0 ? 0.1 * t : 0.1 * t - 0.03 * (t - 6.0));
  }
  s.drate_pprp = rate_derivative(s.rate_pprp, 0.1);
  const auto sep = first_separation(s, 1e-2);
  ASSERT_TRUE(sep.has_value());
  EXPECT_NEAR(*sep, 6.4, 1e-9);
  EXPECT_FALSE(first_separation(s, 1.0).has_value());
  EXPECT_NEAR(derivative_jump(s, 5.0, 7.0, 0.2), 0.03, 1e-12);
  EXPECT_NEAR(derivative_jump(s, 1.0, 3.0, 0.2), 0.0, 1e-12);
}

TEST(Precise, DefaultDigits) {
  EXPECT_EQ(default_digits(100), 50);
  EXPECT_EQ(default_digits(800), 100);
  EXPECT_EQ(default_digits(1600), 100);
  EXPECT_EQ(default_digits(3200), 200);
  EXPECT_EQ(default_digits(100000), 400);
}

TEST(Precise, AgreesWithDoubleWhereResolved) {
  const ProtocolContext ctx(spec_for(60));
  const auto t = grid(4.0, 0.05);
  const std::vector<double> taus{0.5, 1.5};
  const auto mp = precise_rate_series(ctx, taus, t);
  ASSERT_EQ(mp.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(mp[k].tau_int, taus[k]);
    EXPECT_EQ(mp[k].digits, 50);
    EXPECT_EQ(mp[k].n_norm, 60);
    EXPECT_FALSE(mp[k].underflow);
    const RateSeries d = rate_series(ctx.final_overlaps(taus[k]), ctx.final_system(), t);
    int compared = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (d.sp[i] > 1e-6) {
        EXPECT_NEAR(mp[k].rate_sp[i], d.rate_sp[i], 1e-9);
        ++compared;
      }
      if (d.pprp[i] > 1e-6) EXPECT_NEAR(mp[k].rate_pprp[i], d.rate_pprp[i], 1e-9);
      EXPECT_NEAR(mp[k].pprp[i], mp[k].pprp_plus[i] + mp[k].pprp_minus[i], 1e-14);
    }
    EXPECT_GT(compared, 20);
  }
}

// Past the double-precision floor the extended rates keep the bound SP <= 2 L
// and keep growing, while double rates stall where round-off takes over.
TEST(Precise, ResolvesBelowDoubleFloor) {
  const ProtocolContext ctx(spec_for(800));
  const auto t = grid(8.0, 0.1);
  const auto mp = precise_rate_series(ctx, {1.5}, t);
  const RateSeries d = rate_series(ctx.final_overlaps(1.5), ctx.final_system(), t);
  ASSERT_EQ(mp.size(), 1u);
  EXPECT_FALSE(mp[0].underflow);
  const double ceiling = -std::log(1e-30) / 800;
  double mp_max = 0.0, d_max = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LE(mp[0].rate_pprp[i], mp[0].rate_sp[i] + std::log(2.0) / 800 + 1e-12);
    mp_max = std::max(mp_max, mp[0].rate_pprp[i]);
    d_max = std::max(d_max, d.rate_pprp[i]);
  }
  EXPECT_LT(d_max, ceiling);
  EXPECT_GT(mp_max, 0.11);
}

TEST(Precise, InputValidation) {
  const ProtocolContext ctx(spec_for(10));
  EXPECT_THROW(precise_rate_series(ctx, {}, grid(1, 0.1)), std::invalid_argument);
  EXPECT_THROW(precise_rate_series(ctx, {0.5}, {0.0, 0.1}), std::invalid_argument);
  EXPECT_THROW(precise_rate_series(ctx, {0.5}, {0.0, 0.1, 0.3}), std::invalid_argument);
  EXPECT_THROW(precise_rate_series(ctx, {-1.0}, grid(1, 0.1)), std::invalid_argument);
  EXPECT_THROW(precise_rate_series(ctx, {0.5}, grid(1, 0.1), {77, 1}), std::invalid_argument);
}

TEST(SizeScan, OrderingAndArithmetic) {
  const ProtocolSpec spec = spec_for(10);
  const auto t = grid(2.0, 0.1);
  const auto ext = size_scan(spec, {40, 20}, {1.5, 0.5}, t, 1);
  const auto dbl = size_scan(spec, {40, 20}, {1.5, 0.5}, t, 2, Arithmetic::double_precision);
  ASSERT_EQ(ext.size(), 4u);
  ASSERT_EQ(dbl.size(), 4u);
  const int js[] = {20, 20, 40, 40};
  const double ts[] = {0.5, 1.5, 0.5, 1.5};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(ext[i].two_j, js[i]);
    ASSERT_TRUE(ext[i].series.has_value()) << ext[i].error;
    ASSERT_TRUE(dbl[i].series.has_value()) << dbl[i].error;
    EXPECT_EQ(ext[i].series->tau_int, ts[i]);
    EXPECT_EQ(dbl[i].series->digits, 0);
    EXPECT_GT(ext[i].series->digits, 0);
    for (std::size_t k = 0; k < t.size(); ++k)
      EXPECT_NEAR(ext[i].series->rate_pprp[k], dbl[i].series->rate_pprp[k], 1e-10);
  }
  EXPECT_THROW(size_scan(spec, {}, {0.5}, t, 1), std::invalid_argument);
}
