#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "almg/classical.hpp"
#include "almg/eigensystem.hpp"

namespace almg {

/// Diagonal of the parity operator exp(i pi (j + Jz)) over the m basis.
Vec parity_diagonal(int two_j);
CMat parity_matrix(int two_j);

/// An operator that anticommutes with parity. Only its odd-even block is
/// stored: cross(r, c) = <k_odd[r]|O|k_even[c]>, the even-odd block is the
/// adjoint. Jx, Jy and all four charges are of this form.
class OddOperator {
 public:
  OddOperator(int two_j, CMat cross);

  int two_j() const noexcept { return two_j_; }
  int dim() const noexcept { return two_j_ + 1; }
  const CMat& cross() const noexcept { return cross_; }

  CMat dense() const;
  CVec apply(const CVec& v) const;
  /// M(a, b) = <E_{a,-}|O|E_{b,+}> over the levels of eig.
  CMat in_eigenbasis(const EigenSystem& eig) const;

 private:
  int two_j_;
  CMat cross_;
};

OddOperator collective_odd(int two_j, Axis which);

enum class Charge { cx, cy, kx, ky };
const char* to_string(Charge c);
inline constexpr Charge kAllCharges[] = {Charge::cx, Charge::cy, Charge::kx, Charge::ky};

/// Cx = sign(Jx), Cy = sign(Jy), Kx = i Cx Pi, Ky = i Cy Pi. For integer j the
/// null vector of Jx (Jy) is mapped to 0, so C^2 is a projector rather than
/// the identity.
class ChargeSet {
 public:
  explicit ChargeSet(int two_j);

  int two_j() const noexcept { return two_j_; }
  int dim() const noexcept { return two_j_ + 1; }
  const OddOperator& get(Charge c) const;

 private:
  int two_j_;
  std::vector<OddOperator> ops_;  // cx, cy, kx, ky
};

/// Dense spectral sign function of Jx or Jy (Jy via R Cx R^dagger with
/// R = exp(-i pi Jz / 2)).
CMat sign_operator(Axis which, int two_j);

/// (i/2)(C Pi - Pi C). Throws if the dimensions differ or the result is not Hermitian.
CMat k_operator(const CMat& c, const CMat& pi);

/// Cross elements <E_{a,-}|Q|E_{b,+}> of the four charges in one eigenbasis.
/// The K elements follow exactly from <-|K|+> = i <-|C|+>.
struct EigenCharges {
  CMat cx, cy, kx, ky;

  const CMat& get(Charge c) const;
};

EigenCharges charges_in_eigenbasis(const ChargeSet& charges, const EigenSystem& eig);

struct LevelPairing {
  std::vector<std::pair<int, int>> pairs;  ///< (plus index, minus index), sorted by plus index
  std::vector<int> unpaired_plus;
  std::vector<int> unpaired_minus;
};

/// Matches opposite-parity levels one to one, smallest energy gap first.
/// Ties go to the lower plus index, then the lower minus index.
LevelPairing pair_levels(const Vec& e_plus, const Vec& e_minus);

struct DoubletRow {
  int index_plus = 0;
  int index_minus = 0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double gap = 0.0;
  double eps_mean = 0.0;
  std::optional<Phase> phase;  ///< empty outside the three-phase regime
  /// Mean energy within 5 local level spacings of a critical energy.
  bool near_critical = false;
  double abs_cx = 0.0;
  double abs_cy = 0.0;
  double abs_kx = 0.0;
  double abs_ky = 0.0;
};

struct DoubletTable {
  std::vector<DoubletRow> rows;  ///< ascending in e_plus
  std::vector<Level> unpaired;
};

DoubletTable doublet_pairing(const EigenSystem& eig, const classical::CriticalEnergies& crit);

/// Fills the abs_* columns.
void doublet_matrix_elements(DoubletTable& table, const EigenCharges& elements);
void doublet_matrix_elements(DoubletTable& table, const ChargeSet& charges, const EigenSystem& eig);

enum class Side { below_c1, above_c2 };

/// Whether a scaled energy lies inside the tilde window.
bool in_window(double eps, const classical::CriticalEnergies& crit, Side side);

struct TildeOperator {
  CMat op;
  bool empty_window = false;
};

/// P O P with P the sum of eigenprojectors inside the window.
TildeOperator project_tilde(const CMat& op, const EigenSystem& eig,
                            const classical::CriticalEnergies& crit, Side side);

}  // namespace almg
