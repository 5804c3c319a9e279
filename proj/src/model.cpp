#include "almg/model.hpp"

#include <cmath>
#include <string>

namespace almg {

namespace {

// <m+1|J+|m> for basis index k, written as sqrt((j-m)(j+m+1)) with integer factors.
inline double raise(int two_j, int k) {
  return std::sqrt(static_cast<double>(two_j - k) * static_cast<double>(k + 1));
}

}  // namespace

ModelParams::ModelParams(double xi, double alpha, int two_j)
    : xi_(xi), alpha_(alpha), two_j_(two_j) {
  if (!std::isfinite(xi) || xi < 0.0 || xi > 1.0)
    throw std::invalid_argument("ModelParams: xi must lie in [0,1], got " + std::to_string(xi));
  if (!std::isfinite(alpha))
    throw std::invalid_argument("ModelParams: alpha must be finite");
  if (two_j < 1)
    throw std::invalid_argument("ModelParams: two_j must be >= 1, got " + std::to_string(two_j));
}

XyzParams xyz_identification(const ModelParams& params) {
  const double j = params.j();
  const double xi = params.xi();
  const double alpha = params.alpha();
  XyzParams out;
  out.h_x = -xi / j;
  out.h = 0.5 * (1.0 - xi + alpha / (2.0 * j) * (2.0 * j + 1.0));
  out.h_z = alpha / (4.0 * j);
  out.n_sites = params.two_j();
  return out;
}

ModelParams from_xyz(const XyzParams& xyz) {
  if (xyz.n_sites < 1) throw std::invalid_argument("from_xyz: n_sites must be >= 1");
  const double j = 0.5 * xyz.n_sites;
  return {-xyz.h_x * j, 4.0 * j * xyz.h_z, xyz.n_sites};
}

BlockPair build_blocks(const ModelParams& params) {
  const int two_j = params.two_j();
  const double j = params.j();
  const double xi = params.xi();
  const double alpha = params.alpha();
  const double jj1 = j * (j + 1.0);

  BlockPair out;
  out.even.parity = Parity::even;
  out.odd.parity = Parity::odd;
  for (int k = 0; k <= two_j; ++k) {
    ParityBlock& blk = (k % 2 == 0) ? out.even : out.odd;
    const double m = m_of(two_j, k);
    const double jpm = j + m;
    const double jx2_diag = 0.5 * (jj1 - m * m);
    blk.basis.push_back(k);
    blk.m_values.push_back(m);
    blk.diag.push_back((1.0 - xi) * jpm + (2.0 * xi / j) * (j * j - jx2_diag) +
                       (alpha / (2.0 * j)) * jpm * (jpm + 1.0));
    if (k + 2 <= two_j)
      blk.offdiag.push_back(-(xi / (2.0 * j)) * raise(two_j, k) * raise(two_j, k + 1));
  }
  return out;
}

CMat collective_operator(int two_j, Axis which) {
  if (two_j < 1) throw std::invalid_argument("collective_operator: two_j must be >= 1");
  const int dim = two_j + 1;
  CMat op = CMat::Zero(dim, dim);
  switch (which) {
    case Axis::z:
      for (int k = 0; k < dim; ++k) op(k, k) = m_of(two_j, k);
      break;
    case Axis::x:
      for (int k = 0; k + 1 < dim; ++k) {
        const double v = 0.5 * raise(two_j, k);
        op(k + 1, k) = v;
        op(k, k + 1) = v;
      }
      break;
    case Axis::y:
      for (int k = 0; k + 1 < dim; ++k) {
        const double v = 0.5 * raise(two_j, k);
        op(k + 1, k) = cplx(0.0, -v);
        op(k, k + 1) = cplx(0.0, v);
      }
      break;
  }
  return op;
}

CVec apply_collective(int two_j, Axis which, const CVec& v) {
  const int dim = two_j + 1;
  if (v.size() != dim) throw std::invalid_argument("apply_collective: dimension mismatch");
  CVec out = CVec::Zero(dim);
  switch (which) {
    case Axis::z:
      for (int k = 0; k < dim; ++k) out[k] = m_of(two_j, k) * v[k];
      break;
    case Axis::x:
      for (int k = 0; k + 1 < dim; ++k) {
        const double a = 0.5 * raise(two_j, k);
        out[k + 1] += a * v[k];
        out[k] += a * v[k + 1];
      }
      break;
    case Axis::y:
      for (int k = 0; k + 1 < dim; ++k) {
        const double a = 0.5 * raise(two_j, k);
        out[k + 1] += cplx(0.0, -a) * v[k];
        out[k] += cplx(0.0, a) * v[k + 1];
      }
      break;
  }
  return out;
}

std::array<double, 3> spin_expectations(int two_j, const CVec& psi) {
  const int dim = two_j + 1;
  if (psi.size() != dim) throw std::invalid_argument("spin_expectations: dimension mismatch");
  cplx raise_sum = 0.0;
  double jz = 0.0;
  for (int k = 0; k < dim; ++k) {
    jz += m_of(two_j, k) * std::norm(psi[k]);
    if (k + 1 < dim) raise_sum += std::conj(psi[k + 1]) * raise(two_j, k) * psi[k];
  }
  return {raise_sum.real(), raise_sum.imag(), jz};
}

}  // namespace almg
