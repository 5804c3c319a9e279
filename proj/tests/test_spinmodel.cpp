#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "almg/eigensystem.hpp"
#include "almg/model.hpp"
#include "almg/tridiagonal.hpp"
#include "oracle.hpp"

using namespace almg;

namespace {

// Dense H from the two blocks, placed back on the full m basis.
CMat assemble(const BlockPair& b, int two_j) {
  CMat h = CMat::Zero(two_j + 1, two_j + 1);
  for (const ParityBlock* blk : {&b.even, &b.odd}) {
    for (int i = 0; i < blk->dim(); ++i) {
      h(blk->basis[i], blk->basis[i]) = blk->diag[i];
      if (i + 1 < blk->dim()) {
        h(blk->basis[i], blk->basis[i + 1]) = blk->offdiag[i];
        h(blk->basis[i + 1], blk->basis[i]) = blk->offdiag[i];
      }
    }
  }
  return h;
}

std::vector<double> merged_spectrum(const EigenSystem& eig) {
  std::vector<double> all;
  for (const ParitySector* s : {&eig.even(), &eig.odd()})
    for (int i = 0; i < s->size(); ++i) all.push_back(s->energies[i]);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

TEST(ModelParams, RejectsBadInput) {
  EXPECT_THROW(ModelParams(-0.1, 0.0, 4), std::invalid_argument);
  EXPECT_THROW(ModelParams(1.1, 0.0, 4), std::invalid_argument);
  EXPECT_THROW(ModelParams(0.5, std::nan(""), 4), std::invalid_argument);
  EXPECT_THROW(ModelParams(0.5, 0.0, 0), std::invalid_argument);
  const ModelParams p(0.5, -0.6, 7);
  EXPECT_DOUBLE_EQ(p.j(), 3.5);
  EXPECT_EQ(p.particles(), 7);
  EXPECT_EQ(p.dim(), 8);
}

TEST(BuildBlocks, FreeCaseIsDiagonal) {
  const BlockPair b = build_blocks({0.0, 0.0, 6});
  for (const ParityBlock* blk : {&b.even, &b.odd}) {
    for (double e : blk->offdiag) EXPECT_EQ(e, 0.0);
    for (int i = 0; i < blk->dim(); ++i) EXPECT_NEAR(blk->diag[i], blk->basis[i], 1e-14);
  }
}

TEST(BuildBlocks, DimensionsAndStep) {
  const BlockPair b = build_blocks({0.3, 0.1, 40});
  EXPECT_EQ(b.even.dim(), 21);
  EXPECT_EQ(b.odd.dim(), 20);
  for (const ParityBlock* blk : {&b.even, &b.odd}) {
    EXPECT_EQ(static_cast<int>(blk->offdiag.size()), blk->dim() - 1);
    for (int i = 0; i + 1 < blk->dim(); ++i) EXPECT_DOUBLE_EQ(blk->m_values[i + 1] - blk->m_values[i], 2.0);
  }
  for (int k : b.even.basis) EXPECT_EQ(k % 2, 0);
  for (int k : b.odd.basis) EXPECT_EQ(k % 2, 1);
}

TEST(BuildBlocks, MatchesLadderOracleEntrywise) {
  const int two_j = 6;
  const CMat dense = oracle::hamiltonian(0.5, -0.6, two_j);
  EXPECT_LT(oracle::max_abs(assemble(build_blocks({0.5, -0.6, two_j}), two_j) - dense), 1e-12);
}

TEST(BuildBlocks, OracleEquivalenceOverGrid) {
  for (int two_j = 1; two_j <= 12; ++two_j)
    for (double xi : {0.0, 0.25, 0.5, 0.75, 1.0})
      for (double alpha : {-2.0, -0.6, 0.0, 0.7, 1.5}) {
        const CMat dense = oracle::hamiltonian(xi, alpha, two_j);
        EXPECT_LT(oracle::max_abs(dense * oracle::parity(two_j) - oracle::parity(two_j) * dense), 1e-13);
        const oracle::Vec ref = oracle::eigenvalues(dense);
        const auto got = merged_spectrum(diagonalize({xi, alpha, two_j}));
        ASSERT_EQ(static_cast<int>(got.size()), two_j + 1);
        for (int i = 0; i <= two_j; ++i)
          EXPECT_NEAR(got[i], ref[i], 1e-10) << "two_j=" << two_j << " xi=" << xi << " alpha=" << alpha;
      }
}

TEST(Diagonalize, SpinHalf) {
  const auto e = merged_spectrum(diagonalize({0.5, -0.6, 1}));
  EXPECT_NEAR(e[0], -0.7, 1e-14);
  EXPECT_NEAR(e[1], 0.0, 1e-14);
  for (double xi : {0.1, 0.9})
    for (double alpha : {-1.0, 0.3}) {
      auto f = merged_spectrum(diagonalize({xi, alpha, 1}));
      std::vector<double> want{0.0, 1 - xi + 2 * alpha};
      std::sort(want.begin(), want.end());
      EXPECT_NEAR(f[0], want[0], 1e-14);
      EXPECT_NEAR(f[1], want[1], 1e-14);
    }
}

TEST(Diagonalize, FreeSpinTwo) {
  const EigenSystem eig = diagonalize({0.0, 0.0, 4});
  ASSERT_EQ(eig.even().size(), 3);
  ASSERT_EQ(eig.odd().size(), 2);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(eig.even().energies[i], 2.0 * i, 1e-14);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(eig.odd().energies[i], 2.0 * i + 1, 1e-14);
}

TEST(Diagonalize, OrthonormalResidualAndSign) {
  const ModelParams par(0.5, -0.6, 301);
  const EigenSystem eig = diagonalize(par);
  const CMat h = oracle::hamiltonian(0.5, -0.6, 301);
  double e_max = 0.0;
  for (Parity p : {Parity::even, Parity::odd}) e_max = std::max(e_max, eig.sector(p).energies.cwiseAbs().maxCoeff());
  for (Parity p : {Parity::even, Parity::odd}) {
    const ParitySector& s = eig.sector(p);
    const Mat gram = s.vectors.transpose() * s.vectors;
    EXPECT_LT((gram - Mat::Identity(s.size(), s.size())).cwiseAbs().maxCoeff(), 1e-10);
    for (int n = 1; n < s.size(); ++n) EXPECT_LE(s.energies[n - 1], s.energies[n]);
    for (int n = 0; n < s.size(); ++n) {
      const Vec v = eig.full_vector({p, n});
      const double resid = (h * v.cast<cplx>() - s.energies[n] * v.cast<cplx>()).norm();
      EXPECT_LE(resid, 1e-9 * e_max);
      Eigen::Index at;
      v.cwiseAbs().maxCoeff(&at);
      EXPECT_GT(v[at], 0.0);
      for (int k = 0; k < v.size(); ++k)
        if (parity_of_index(k) != p) EXPECT_EQ(v[k], 0.0);
    }
  }
}

TEST(Diagonalize, SignConventionLeavesSpectrum) {
  const BlockPair b = build_blocks({0.4, -0.3, 30});
  const ParitySector s = diagonalize(b.even);
  const TridiagonalEigen raw = solve_tridiagonal(b.even.diag, b.even.offdiag, false);
  for (int i = 0; i < s.size(); ++i) EXPECT_NEAR(s.energies[i], raw.values[i], 1e-12);
}

TEST(Tridiagonal, RejectsMalformedInput) {
  std::vector<double> d{1.0, 2.0};
  std::vector<double> e{0.5, 0.5};
  EXPECT_THROW(solve_tridiagonal(d, e), std::invalid_argument);
  EXPECT_THROW(solve_tridiagonal(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
  std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(solve_tridiagonal(bad, std::vector<double>{0.1}), std::invalid_argument);
}

TEST(Tridiagonal, MatchesDenseSolverOnRandomMatrix) {
  const int n = 97;
  std::vector<double> d(n), e(n - 1);
  unsigned s = 12345;
  auto next = [&] {
    s = s * 1103515245u + 12345u;
    return ((s >> 8) & 0xffff) / 65536.0 - 0.5;
  };
  for (auto& x : d) x = next();
  for (auto& x : e) x = next();
  Mat a = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = d[i];
    if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = e[i];
  }
  const Vec ref = Eigen::SelfAdjointEigenSolver<Mat>(a).eigenvalues();
  const TridiagonalEigen got = solve_tridiagonal(d, e);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(got.values[i], ref[i], 1e-12);
  EXPECT_LT((a * got.vectors - got.vectors * got.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CollectiveOperator, SmallCases) {
  const CMat z = collective_operator(2, Axis::z);
  EXPECT_NEAR(z(0, 0).real(), -1.0, 0);
  EXPECT_NEAR(z(1, 1).real(), 0.0, 0);
  EXPECT_NEAR(z(2, 2).real(), 1.0, 0);
  const CMat x = collective_operator(2, Axis::x);
  EXPECT_NEAR(x(0, 1).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(x(1, 2).real(), 0.70711, 1e-5);
  EXPECT_EQ(x(0, 2), cplx(0.0));
  EXPECT_THROW(collective_operator(0, Axis::x), std::invalid_argument);
}

TEST(CollectiveOperator, AngularMomentumAlgebraAndOracle) {
  for (int two_j = 1; two_j <= 20; ++two_j) {
    const CMat x = collective_operator(two_j, Axis::x);
    const CMat y = collective_operator(two_j, Axis::y);
    const CMat z = collective_operator(two_j, Axis::z);
    EXPECT_LT(oracle::max_abs(x * y - y * x - cplx(0, 1) * z), 1e-12);
    EXPECT_LT(oracle::max_abs(x - oracle::jx(two_j)), 1e-14);
    EXPECT_LT(oracle::max_abs(y - oracle::jy(two_j)), 1e-14);
    EXPECT_LT(oracle::max_abs(x - x.adjoint()), 0.0 + 1e-15);
  }
}

TEST(CollectiveOperator, ApplyAndExpectationsAgreeWithDense) {
  const int two_j = 9;
  CVec v(two_j + 1);
  for (int k = 0; k <= two_j; ++k) v[k] = cplx(std::cos(1.3 * k), std::sin(0.7 * k + 0.2));
  v.normalize();
  for (Axis a : {Axis::x, Axis::y, Axis::z})
    EXPECT_LT((apply_collective(two_j, a, v) - collective_operator(two_j, a) * v).norm(), 1e-13);
  const auto e = spin_expectations(two_j, v);
  EXPECT_NEAR(e[0], v.dot(oracle::jx(two_j) * v).real(), 1e-13);
  EXPECT_NEAR(e[1], v.dot(oracle::jy(two_j) * v).real(), 1e-13);
  EXPECT_NEAR(e[2], v.dot(oracle::jz(two_j) * v).real(), 1e-13);
}

TEST(SpectrumFlow, FreeColumnAndSingleStep) {
  const auto rows = spectrum_flow(40, -0.6, linear_grid(0.0, 1.0, 1));
  ASSERT_EQ(rows.size(), 41u);
  for (const auto& r : rows) EXPECT_EQ(r.xi, 0.0);
  // alpha != 0 bends the free ladder; the ladder itself needs alpha = 0.
  const auto flat = spectrum_flow(40, 0.0, {0.0});
  std::vector<double> f;
  for (const auto& r : flat) f.push_back(r.eps);
  std::sort(f.begin(), f.end());
  for (int i = 0; i <= 40; ++i) EXPECT_NEAR(f[i], i / 40.0, 1e-14);
}

TEST(SpectrumFlow, GroundStateCurvaturePeak) {
  const auto grid = linear_grid(0.0, 1.0, 201);
  const auto rows = spectrum_flow(40, -0.6, grid, 2);
  std::vector<double> ground(grid.size(), 1e300);
  for (const auto& r : rows) {
    const auto i = static_cast<std::size_t>(std::lround(r.xi * 200));
    ground[i] = std::min(ground[i], r.eps);
  }
  std::size_t best = 1;
  double peak = -1.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double c = std::abs(ground[i + 1] - 2 * ground[i] + ground[i - 1]);
    if (c > peak) {
      peak = c;
      best = i;
    }
  }
  EXPECT_NEAR(grid[best], 0.20, 0.02);
}

TEST(SpectrumFlow, RejectsOutOfRangeXi) {
  EXPECT_THROW(spectrum_flow(10, 0.0, {1.5}), std::invalid_argument);
  EXPECT_THROW(linear_grid(0.0, 1.0, 0), std::invalid_argument);
}

TEST(Xyz, IdentificationValuesAndRoundtrip) {
  const XyzParams free = xyz_identification({0.0, 0.0, 20});
  EXPECT_DOUBLE_EQ(free.h, 0.5);
  EXPECT_DOUBLE_EQ(free.h_x, 0.0);
  EXPECT_DOUBLE_EQ(free.h_z, 0.0);
  const XyzParams x = xyz_identification({0.5, -0.6, 20});
  EXPECT_NEAR(x.h_x, -0.05, 1e-15);
  EXPECT_NEAR(x.h_z, -0.015, 1e-15);
  EXPECT_EQ(x.n_sites, 20);
  for (double xi : {0.1, 0.5, 0.95})
    for (double alpha : {-1.7, 0.4}) {
      const ModelParams back = from_xyz(xyz_identification({xi, alpha, 13}));
      EXPECT_NEAR(back.xi(), xi, 1e-14);
      EXPECT_NEAR(back.alpha(), alpha, 1e-14);
    }
}

// Pauli sites on the symmetric sector: sum sz_i = 2Jz, sum_{i<k} sa_i sa_k = 2Ja^2 - N/2.
TEST(Xyz, ReproducesHamiltonianUpToConstant) {
  const int two_j = 8;
  const ModelParams par(0.35, -0.45, two_j);
  const XyzParams c = xyz_identification(par);
  const CMat one = oracle::identity(two_j);
  const CMat x = oracle::jx(two_j), z = oracle::jz(two_j);
  const double n = two_j;
  const CMat h_xyz = c.h * 2.0 * z + c.h_x * 2.0 * (x * x - n / 4 * one) + c.h_z * 2.0 * (z * z - n / 4 * one);
  const CMat diff = h_xyz - oracle::hamiltonian(par.xi(), par.alpha(), two_j);
  const double shift = diff(0, 0).real();
  EXPECT_LT(oracle::max_abs(diff - shift * one), 1e-12);
}
