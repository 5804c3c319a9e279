#include "almg/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "almg/parallel.hpp"
#include "almg/tridiagonal.hpp"

namespace almg {

ParitySector diagonalize(const ParityBlock& block) {
  if (block.dim() == 0) throw std::invalid_argument("diagonalize: empty parity block");
  TridiagonalEigen eig = solve_tridiagonal(block.diag, block.offdiag, true);

  ParitySector out;
  out.parity = block.parity;
  out.basis = block.basis;
  out.energies = std::move(eig.values);
  out.vectors = std::move(eig.vectors);
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    auto col = out.vectors.col(c);
    col.normalize();
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col[imax] < 0.0) col = -col;
  }
  return out;
}

EigenSystem::EigenSystem(ModelParams params, ParitySector even, ParitySector odd)
    : params_(params), even_(std::move(even)), odd_(std::move(odd)) {
  if (even_.size() + odd_.size() != params_.dim())
    throw std::invalid_argument("EigenSystem: sector sizes do not add up to 2j+1");
}

Vec EigenSystem::full_vector(Level l) const {
  const ParitySector& s = sector(l.parity);
  Vec v = Vec::Zero(dim());
  for (int r = 0; r < s.size(); ++r) v[s.basis[r]] = s.vectors(r, l.index);
  return v;
}

Overlaps EigenSystem::project(const CVec& psi) const {
  if (psi.size() != dim()) throw std::invalid_argument("EigenSystem::project: dimension mismatch");
  Overlaps c;
  for (Parity p : {Parity::even, Parity::odd}) {
    const ParitySector& s = sector(p);
    CVec block(s.size());
    for (int r = 0; r < s.size(); ++r) block[r] = psi[s.basis[r]];
    c.sector(p) = s.vectors.transpose().cast<cplx>() * block;
  }
  return c;
}

CVec EigenSystem::synthesize(const Overlaps& c) const {
  CVec psi = CVec::Zero(dim());
  for (Parity p : {Parity::even, Parity::odd}) {
    const ParitySector& s = sector(p);
    if (c.sector(p).size() != s.size())
      throw std::invalid_argument("EigenSystem::synthesize: dimension mismatch");
    const CVec block = s.vectors.cast<cplx>() * c.sector(p);
    for (int r = 0; r < s.size(); ++r) psi[s.basis[r]] = block[r];
  }
  return psi;
}

std::vector<Level> EigenSystem::levels_by_energy() const {
  std::vector<Level> out;
  out.reserve(dim());
  for (int n = 0; n < even_.size(); ++n) out.push_back({Parity::even, n});
  for (int n = 0; n < odd_.size(); ++n) out.push_back({Parity::odd, n});
  std::stable_sort(out.begin(), out.end(),
                   [this](const Level& a, const Level& b) { return energy(a) < energy(b); });
  return out;
}

EigenSystem diagonalize(const ModelParams& params) {
  BlockPair blocks = build_blocks(params);
  if (blocks.odd.dim() == 0) {
    // two_j >= 1 always leaves both sublattices populated.
    throw std::logic_error("diagonalize: odd block unexpectedly empty");
  }
  if (default_threads() == 1)
    return EigenSystem(params, diagonalize(blocks.even), diagonalize(blocks.odd));
  auto odd = std::async(std::launch::async, [&] { return diagonalize(blocks.odd); });
  ParitySector even = diagonalize(blocks.even);
  return EigenSystem(params, std::move(even), odd.get());
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1) throw std::invalid_argument("linear_grid: steps must be >= 1");
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i)
    g[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
  return g;
}

std::vector<SpectrumRow> spectrum_flow(int two_j, double alpha, const std::vector<double>& xi_grid,
                                       unsigned threads) {
  std::vector<std::vector<SpectrumRow>> columns(xi_grid.size());
  parallel_for(xi_grid.size(), threads, [&](std::size_t i) {
    const double xi = xi_grid[i];
    try {
      const EigenSystem eig = diagonalize(ModelParams(xi, alpha, two_j));
      auto& col = columns[i];
      for (Parity p : {Parity::even, Parity::odd}) {
        const ParitySector& s = eig.sector(p);
        for (int n = 0; n < s.size(); ++n)
          col.push_back({xi, n, p, s.energies[n], eig.scaled(s.energies[n])});
      }
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "spectrum_flow: xi=" << xi << ": " << e.what();
      throw NumericalError(msg.str());
    }
  });
  std::vector<SpectrumRow> rows;
  for (auto& c : columns) rows.insert(rows.end(), c.begin(), c.end());
  return rows;
}

}  // namespace almg
