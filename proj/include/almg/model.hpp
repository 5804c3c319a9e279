#pragma once

#include <array>
#include <vector>

#include "almg/types.hpp"

namespace almg {

/// Control parameters of the anharmonic LMG Hamiltonian
///
///   H = (1-xi)(j + Jz) + (2 xi / j)(j^2 - Jx^2) + (alpha / 2j)(j + Jz)(j + Jz + 1)
///
/// restricted to the maximal collective sector j = N/2. The coupling prefactor
/// is read as 2 xi / j, which is what makes H/N converge to the classical
/// energy functional. Spin length is stored as the integer 2j so half-integer
/// spins are exact.
class ModelParams {
 public:
  ModelParams(double xi, double alpha, int two_j);

  double xi() const noexcept { return xi_; }
  double alpha() const noexcept { return alpha_; }
  int two_j() const noexcept { return two_j_; }
  double j() const noexcept { return 0.5 * two_j_; }
  /// Number of spin-1/2 particles, N = 2j.
  int particles() const noexcept { return two_j_; }
  int dim() const noexcept { return two_j_ + 1; }

  ModelParams with_two_j(int two_j) const { return {xi_, alpha_, two_j}; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  double xi_;
  double alpha_;
  int two_j_;
};

/// Couplings of the infinite-range XYZ form
///   H = h sum sz_i + h_x sum_{i<k} sx_i sx_k + h_z sum_{i<k} sz_i sz_k.
struct XyzParams {
  double h = 0.0;
  double h_x = 0.0;
  double h_z = 0.0;
  int n_sites = 0;
};

/// Maps (xi, alpha, j) onto the XYZ couplings that reproduce the aLMG
/// Hamiltonian up to an additive constant.
XyzParams xyz_identification(const ModelParams& params);

/// Inverse of xyz_identification.
ModelParams from_xyz(const XyzParams& xyz);

/// Magnetic quantum number of basis index k (k = j + m, 0 <= k <= 2j).
inline double m_of(int two_j, int k) { return k - 0.5 * two_j; }

/// Parity of basis index k: (-1)^(j+m) = (-1)^k.
inline Parity parity_of_index(int k) { return (k % 2 == 0) ? Parity::even : Parity::odd; }

/// One parity block of the Hamiltonian: a symmetric tridiagonal matrix over the
/// magnetic sublevels m with (-1)^(j+m) equal to the block parity.
struct ParityBlock {
  Parity parity = Parity::even;
  std::vector<int> basis;        ///< full-basis indices k, ascending, step 2
  std::vector<double> m_values;  ///< m for each entry of `basis`
  std::vector<double> diag;
  std::vector<double> offdiag;   ///< couples m and m+2; size dim-1

  int dim() const noexcept { return static_cast<int>(basis.size()); }
};

struct BlockPair {
  ParityBlock even;
  ParityBlock odd;
};

BlockPair build_blocks(const ModelParams& params);

/// Dense matrix of a collective spin component in the |j,m> basis, m ascending.
CMat collective_operator(int two_j, Axis which);

/// J_which * v without materializing the matrix.
CVec apply_collective(int two_j, Axis which, const CVec& v);

/// (<Jx>, <Jy>, <Jz>) of a (not necessarily normalized) state.
std::array<double, 3> spin_expectations(int two_j, const CVec& psi);

}  // namespace almg
