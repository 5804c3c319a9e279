#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace almg {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Eigenvalue of the parity operator exp(i*pi*(j + Jz)).
enum class Parity : int { even = 1, odd = -1 };

inline int sign_of(Parity p) { return static_cast<int>(p); }

enum class Axis { x, y, z };

/// Spectral phases delimited by the two excited-state critical energies.
enum class Phase { I, II, III };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::I: return "I";
    case Phase::II: return "II";
    case Phase::III: return "III";
  }
  return "?";
}

/// Raised when a numerical routine cannot deliver a result (non-convergence,
/// invariant breakdown). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace almg
