#pragma once

#include <vector>

#include "almg/model.hpp"

namespace almg {

/// Eigenpairs of one parity block. Vectors are stored block-locally (one
/// column per level over the block's m values); `EigenSystem::full_vector`
/// expands them onto the full m basis with zeros on the other sublattice.
struct ParitySector {
  Parity parity = Parity::even;
  std::vector<int> basis;
  Vec energies;  ///< ascending, extensive
  Mat vectors;

  int size() const noexcept { return static_cast<int>(basis.size()); }
};

/// Diagonalizes one block. Each eigenvector is normalized with its entry of
/// largest magnitude made positive.
ParitySector diagonalize(const ParityBlock& block);

/// Amplitudes of a state in an eigenbasis, split by parity sector.
struct Overlaps {
  CVec even;
  CVec odd;

  const CVec& sector(Parity p) const { return p == Parity::even ? even : odd; }
  CVec& sector(Parity p) { return p == Parity::even ? even : odd; }
  double norm_squared() const { return even.squaredNorm() + odd.squaredNorm(); }
};

/// Reference to one level: (parity sector, index within the sector).
struct Level {
  Parity parity;
  int index;
};

class EigenSystem {
 public:
  EigenSystem(ModelParams params, ParitySector even, ParitySector odd);

  const ModelParams& params() const noexcept { return params_; }
  int dim() const noexcept { return params_.dim(); }
  const ParitySector& even() const noexcept { return even_; }
  const ParitySector& odd() const noexcept { return odd_; }
  const ParitySector& sector(Parity p) const noexcept { return p == Parity::even ? even_ : odd_; }

  double energy(Level l) const { return sector(l.parity).energies[l.index]; }
  /// Scaled energy E/N with N = 2j.
  double scaled(double energy) const noexcept { return energy / params_.particles(); }
  double eps(Level l) const { return scaled(energy(l)); }

  Vec full_vector(Level l) const;

  /// c = <E_n|psi> for every level.
  Overlaps project(const CVec& psi) const;
  /// Inverse of project.
  CVec synthesize(const Overlaps& c) const;

  /// Every level, ordered by energy (ties broken by parity, even first).
  std::vector<Level> levels_by_energy() const;

 private:
  ModelParams params_;
  ParitySector even_;
  ParitySector odd_;
};

EigenSystem diagonalize(const ModelParams& params);

struct SpectrumRow {
  double xi;
  int n;
  Parity parity;
  double energy;
  double eps;
};

/// Full spectrum at each grid point, rows grouped by xi in grid order.
std::vector<SpectrumRow> spectrum_flow(int two_j, double alpha, const std::vector<double>& xi_grid,
                                       unsigned threads = 1);

/// xi grid of `steps` points from lo to hi inclusive (a single point at lo when steps == 1).
std::vector<double> linear_grid(double lo, double hi, int steps);

}  // namespace almg
