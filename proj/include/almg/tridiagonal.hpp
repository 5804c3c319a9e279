#pragma once

#include <span>

#include "almg/types.hpp"

namespace almg {

/// Eigenpairs of a real symmetric tridiagonal matrix, eigenvalues ascending.
/// `vectors` holds one eigenvector per column (empty when not requested).
struct TridiagonalEigen {
  Vec values;
  Mat vectors;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, int index)
      : NumericalError(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// Implicit-shift QL on the tridiagonal matrix with main diagonal `diag` and
/// superdiagonal `offdiag` (size n-1). Rotations are accumulated into the
/// eigenvector matrix when `want_vectors` is set. The iteration budget is
/// 50*n sweeps in total; exceeding it throws ConvergenceError carrying the
/// index of the eigenvalue that was being isolated.
TridiagonalEigen solve_tridiagonal(std::span<const double> diag,
                                   std::span<const double> offdiag,
                                   bool want_vectors = true);

}  // namespace almg
