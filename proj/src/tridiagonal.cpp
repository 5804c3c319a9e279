#include "almg/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace almg {

namespace {

// Rotations generated by the QL sweeps, in application order. Sweep s applies
// rotations i = hi-1 down to lo, each mixing columns i and i+1 of the
// eigenvector matrix; their (c, s) pairs are stored contiguously from `offset`.
struct RotationLog {
  struct Sweep {
    Eigen::Index lo, hi;
    std::size_t offset;
  };
  std::vector<Sweep> sweeps;
  std::vector<double> cs, sn;
};

// Right-multiplying by the rotations acts on every row of the eigenvector
// matrix independently, so rows are processed in panels that stay cache
// resident while the whole log is replayed. Within a panel the layout is
// [column][row] and the column shared by consecutive rotations of a sweep is
// carried in registers.
void replay_rotations(const RotationLog& log, Mat& z) {
  const Eigen::Index n = z.rows();
  constexpr Eigen::Index R = 64;
  std::vector<double> panel(static_cast<std::size_t>(n) * R);

  for (Eigen::Index k0 = 0; k0 < n; k0 += R) {
    const Eigen::Index rows = std::min(R, n - k0);
    std::fill(panel.begin(), panel.end(), 0.0);
    for (Eigen::Index r = 0; r < rows; ++r) panel[(k0 + r) * R + r] = 1.0;

    for (const auto& sw : log.sweeps) {
      const double* cs = log.cs.data() + sw.offset;
      const double* sn = log.sn.data() + sw.offset;
      double carry[R];
      double* top = panel.data() + sw.hi * R;
      for (Eigen::Index r = 0; r < R; ++r) carry[r] = top[r];
      std::size_t t = 0;
      for (Eigen::Index i = sw.hi - 1; i >= sw.lo; --i, ++t) {
        const double c = cs[t];
        const double s = sn[t];
        double* __restrict zi = panel.data() + i * R;
        double* __restrict zi1 = zi + R;
        for (Eigen::Index r = 0; r < R; ++r) {
          const double a = zi[r];
          zi1[r] = s * a + c * carry[r];
          carry[r] = c * a - s * carry[r];
        }
      }
      double* bottom = panel.data() + sw.lo * R;
      for (Eigen::Index r = 0; r < R; ++r) bottom[r] = carry[r];
    }

    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index r = 0; r < rows; ++r) z(k0 + r, i) = panel[i * R + r];
  }
}

}  // namespace

TridiagonalEigen solve_tridiagonal(std::span<const double> diag,
                                   std::span<const double> offdiag,
                                   bool want_vectors) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  if (n == 0) throw std::invalid_argument("solve_tridiagonal: empty matrix");
  if (static_cast<Eigen::Index>(offdiag.size()) != n - 1)
    throw std::invalid_argument("solve_tridiagonal: offdiag must have size n-1");

  TridiagonalEigen out;
  Vec& d = out.values;
  d = Eigen::Map<const Vec>(diag.data(), n);
  // e[i] couples rows i and i+1; e[n-1] is scratch.
  Vec e = Vec::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) e[i] = offdiag[i];

  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(d[i]) || !std::isfinite(e[i]))
      throw std::invalid_argument("solve_tridiagonal: non-finite matrix entry");

  RotationLog log;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const long long budget = 50LL * n;
  long long sweeps = 0;

  for (Eigen::Index l = 0; l < n; ++l) {
    Eigen::Index m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > budget)
        throw ConvergenceError("tridiagonal QL failed to converge at eigenvalue index " +
                                   std::to_string(l),
                               static_cast<int>(l));

      // Shift from the leading 2x2 block, taking the root closer to d[l].
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      const std::size_t offset = log.cs.size();
      Eigen::Index i;
      bool underflow = false;
      for (i = m - 1; i >= l; --i) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (want_vectors) {
          log.cs.push_back(c);
          log.sn.push_back(s);
        }
      }
      if (want_vectors && log.cs.size() > offset)
        log.sweeps.push_back({underflow ? i + 1 : l, m, offset});
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }

  if (want_vectors) {
    out.vectors.resize(n, n);
    replay_rotations(log, out.vectors);
  }

  // Selection sort keeps column swaps at O(n) each.
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    Eigen::Index k = i;
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (d[j] < d[k]) k = j;
    if (k != i) {
      std::swap(d[i], d[k]);
      if (want_vectors) out.vectors.col(i).swap(out.vectors.col(k));
    }
  }
  return out;
}

}  // namespace almg
