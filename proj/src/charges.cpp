#include "almg/charges.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "almg/tridiagonal.hpp"

namespace almg {

namespace {

inline double raise(int two_j, int k) {
  return std::sqrt(static_cast<double>(two_j - k) * static_cast<double>(k + 1));
}

// Row index of full-basis index k inside its sublattice.
inline int sub(int k) { return k / 2; }

int odd_count(int two_j) { return (two_j + 1) / 2; }
int even_count(int two_j) { return two_j / 2 + 1; }

// (-i)^n for integer n.
cplx minus_i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

Mat sublattice_rows(const ParitySector& s, int two_j) {
  // Block-local eigenvectors already are the rows of the sublattice; the
  // check only guards against a foreign EigenSystem.
  if (s.size() != (s.parity == Parity::even ? even_count(two_j) : odd_count(two_j)))
    throw std::invalid_argument("sublattice size mismatch");
  return s.vectors;
}

}  // namespace

Vec parity_diagonal(int two_j) {
  if (two_j < 1) throw std::invalid_argument("parity_diagonal: two_j must be >= 1");
  Vec d(two_j + 1);
  for (int k = 0; k <= two_j; ++k) d[k] = sign_of(parity_of_index(k));
  return d;
}

CMat parity_matrix(int two_j) { return parity_diagonal(two_j).cast<cplx>().asDiagonal(); }

OddOperator::OddOperator(int two_j, CMat cross) : two_j_(two_j), cross_(std::move(cross)) {
  if (two_j < 1) throw std::invalid_argument("OddOperator: two_j must be >= 1");
  if (cross_.rows() != odd_count(two_j) || cross_.cols() != even_count(two_j))
    throw std::invalid_argument("OddOperator: cross block has the wrong shape");
}

CMat OddOperator::dense() const {
  CMat out = CMat::Zero(dim(), dim());
  for (int r = 0; r < cross_.rows(); ++r)
    for (int c = 0; c < cross_.cols(); ++c) {
      out(2 * r + 1, 2 * c) = cross_(r, c);
      out(2 * c, 2 * r + 1) = std::conj(cross_(r, c));
    }
  return out;
}

CVec OddOperator::apply(const CVec& v) const {
  if (v.size() != dim()) throw std::invalid_argument("OddOperator::apply: dimension mismatch");
  const int ne = even_count(two_j_);
  const int no = odd_count(two_j_);
  CVec ve(ne), vo(no);
  for (int c = 0; c < ne; ++c) ve[c] = v[2 * c];
  for (int r = 0; r < no; ++r) vo[r] = v[2 * r + 1];
  const CVec to_odd = cross_ * ve;
  const CVec to_even = cross_.adjoint() * vo;
  CVec out(dim());
  for (int c = 0; c < ne; ++c) out[2 * c] = to_even[c];
  for (int r = 0; r < no; ++r) out[2 * r + 1] = to_odd[r];
  return out;
}

CMat OddOperator::in_eigenbasis(const EigenSystem& eig) const {
  if (eig.params().two_j() != two_j_)
    throw std::invalid_argument("OddOperator::in_eigenbasis: dimension mismatch");
  const Mat ue = sublattice_rows(eig.even(), two_j_);
  const Mat uo = sublattice_rows(eig.odd(), two_j_);
  const Mat re = cross_.real();
  const Mat im = cross_.imag();
  CMat out(uo.cols(), ue.cols());
  const bool has_re = !re.isZero(0.0);
  const bool has_im = !im.isZero(0.0);
  Mat part;
  if (has_re) {
    part.noalias() = uo.transpose() * (re * ue);
    out.real() = part;
  } else {
    out.real().setZero();
  }
  if (has_im) {
    part.noalias() = uo.transpose() * (im * ue);
    out.imag() = part;
  } else {
    out.imag().setZero();
  }
  return out;
}

OddOperator collective_odd(int two_j, Axis which) {
  if (which == Axis::z) throw std::invalid_argument("collective_odd: Jz is parity even");
  CMat cross = CMat::Zero(odd_count(two_j), even_count(two_j));
  for (int k = 0; k + 1 <= two_j; ++k) {
    const double a = 0.5 * raise(two_j, k);
    // Element <k+1|J|k>; whichever of k, k+1 is odd names the row.
    const cplx lower = which == Axis::x ? cplx(a, 0.0) : cplx(0.0, -a);
    if (k % 2 == 0)
      cross(sub(k + 1), sub(k)) = lower;
    else
      cross(sub(k), sub(k + 1)) = std::conj(lower);
  }
  return OddOperator(two_j, std::move(cross));
}

const char* to_string(Charge c) {
  switch (c) {
    case Charge::cx: return "cx";
    case Charge::cy: return "cy";
    case Charge::kx: return "kx";
    case Charge::ky: return "ky";
  }
  return "?";
}

ChargeSet::ChargeSet(int two_j) : two_j_(two_j) {
  if (two_j < 1) throw std::invalid_argument("ChargeSet: two_j must be >= 1");
  const int n = two_j + 1;
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int k = 0; k + 1 < n; ++k) off[k] = 0.5 * raise(two_j, k);
  const TridiagonalEigen jx = solve_tridiagonal(diag, off, true);

  // Spec(Jx) = {-j..j}; anything below a quarter is the integer-j null vector.
  Vec s(n);
  for (int i = 0; i < n; ++i)
    s[i] = std::abs(jx.values[i]) < 0.25 ? 0.0 : (jx.values[i] > 0.0 ? 1.0 : -1.0);

  const int ne = even_count(two_j);
  const int no = odd_count(two_j);
  Mat ve(ne, n), vo(no, n);
  for (int c = 0; c < ne; ++c) ve.row(c) = jx.vectors.row(2 * c);
  for (int r = 0; r < no; ++r) vo.row(r) = jx.vectors.row(2 * r + 1);
  const Mat cx = (vo * s.asDiagonal()) * ve.transpose();

  CMat cx_c = cx.cast<cplx>();
  CMat cy_c(no, ne);
  for (int r = 0; r < no; ++r)
    for (int c = 0; c < ne; ++c) cy_c(r, c) = minus_i_pow((2 * r + 1) - 2 * c) * cx(r, c);
  // K = i C Pi; on the odd-even block Pi acts on the even column as +1.
  const cplx i1(0.0, 1.0);
  CMat kx_c = i1 * cx_c;
  CMat ky_c = i1 * cy_c;
  ops_.emplace_back(two_j, std::move(cx_c));
  ops_.emplace_back(two_j, std::move(cy_c));
  ops_.emplace_back(two_j, std::move(kx_c));
  ops_.emplace_back(two_j, std::move(ky_c));
}

const OddOperator& ChargeSet::get(Charge c) const { return ops_[static_cast<int>(c)]; }

CMat sign_operator(Axis which, int two_j) {
  if (which == Axis::z) throw std::invalid_argument("sign_operator: only x and y are supported");
  const ChargeSet set(two_j);
  return set.get(which == Axis::x ? Charge::cx : Charge::cy).dense();
}

CMat k_operator(const CMat& c, const CMat& pi) {
  if (c.rows() != c.cols() || pi.rows() != pi.cols() || c.rows() != pi.rows())
    throw std::invalid_argument("k_operator: dimension mismatch");
  CMat k = cplx(0.0, 0.5) * (c * pi - pi * c);
  if ((k - k.adjoint()).norm() > 1e-12 * std::max(1.0, k.norm()))
    throw std::invalid_argument("k_operator: result is not Hermitian");
  return k;
}

const CMat& EigenCharges::get(Charge c) const {
  switch (c) {
    case Charge::cx: return cx;
    case Charge::cy: return cy;
    case Charge::kx: return kx;
    case Charge::ky: return ky;
  }
  throw std::logic_error("EigenCharges::get: bad charge");
}

EigenCharges charges_in_eigenbasis(const ChargeSet& charges, const EigenSystem& eig) {
  EigenCharges out;
  out.cx = charges.get(Charge::cx).in_eigenbasis(eig);
  out.cy = charges.get(Charge::cy).in_eigenbasis(eig);
  const cplx i1(0.0, 1.0);
  out.kx = i1 * out.cx;
  out.ky = i1 * out.cy;
  return out;
}

LevelPairing pair_levels(const Vec& e_plus, const Vec& e_minus) {
  const int np = static_cast<int>(e_plus.size());
  const int nm = static_cast<int>(e_minus.size());
  LevelPairing out;

  // Unused minus levels ordered by energy.
  std::set<std::pair<double, int>> free_minus;
  for (int b = 0; b < nm; ++b) free_minus.insert({e_minus[b], b});

  auto nearest = [&](int a) -> std::optional<std::pair<double, int>> {
    if (free_minus.empty()) return std::nullopt;
    const double e = e_plus[a];
    auto it = free_minus.lower_bound({e, -1});
    std::optional<std::pair<double, int>> best;
    auto consider = [&](std::set<std::pair<double, int>>::iterator p) {
      const double g = std::abs(p->first - e);
      if (!best || g < best->first || (g == best->first && p->second < best->second))
        best = std::make_pair(g, p->second);
    };
    if (it != free_minus.end()) {
      consider(it);
      // Equal-energy ties can sit on either side of the probe.
      for (auto q = std::next(it); q != free_minus.end() && q->first == it->first; ++q) consider(q);
    }
    if (it != free_minus.begin()) {
      auto q = std::prev(it);
      consider(q);
      while (q != free_minus.begin() && std::prev(q)->first == q->first) consider(--q);
    }
    return best;
  };

  using Edge = std::tuple<double, int, int>;  // gap, plus, minus
  std::priority_queue<Edge, std::vector<Edge>, std::greater<>> heap;
  for (int a = 0; a < np; ++a)
    if (auto c = nearest(a)) heap.emplace(c->first, a, c->second);

  std::vector<char> used_plus(np, 0), used_minus(nm, 0);
  while (!heap.empty()) {
    const auto [g, a, b] = heap.top();
    heap.pop();
    if (used_plus[a]) continue;
    if (used_minus[b]) {
      if (auto c = nearest(a)) heap.emplace(c->first, a, c->second);
      continue;
    }
    used_plus[a] = used_minus[b] = 1;
    free_minus.erase({e_minus[b], b});
    out.pairs.emplace_back(a, b);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (int a = 0; a < np; ++a)
    if (!used_plus[a]) out.unpaired_plus.push_back(a);
  for (int b = 0; b < nm; ++b)
    if (!used_minus[b]) out.unpaired_minus.push_back(b);
  return out;
}

DoubletTable doublet_pairing(const EigenSystem& eig, const classical::CriticalEnergies& crit) {
  const Vec& ep = eig.even().energies;
  const Vec& em = eig.odd().energies;
  if (ep.size() == 0 || em.size() == 0)
    throw std::invalid_argument("doublet_pairing: both parity sectors are required");
  const LevelPairing pairing = pair_levels(ep, em);

  // Local spacing of the merged spectrum, in scaled units.
  std::vector<double> all;
  all.reserve(eig.dim());
  for (int i = 0; i < ep.size(); ++i) all.push_back(eig.scaled(ep[i]));
  for (int i = 0; i < em.size(); ++i) all.push_back(eig.scaled(em[i]));
  std::sort(all.begin(), all.end());
  auto local_spacing = [&](double eps) {
    const auto it = std::lower_bound(all.begin(), all.end(), eps);
    const auto idx = static_cast<std::ptrdiff_t>(it - all.begin());
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, idx - 2);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(all.size()) - 1, idx + 2);
    return hi > lo ? (all[hi] - all[lo]) / static_cast<double>(hi - lo) : 0.0;
  };

  DoubletTable table;
  for (const auto& [a, b] : pairing.pairs) {
    DoubletRow row;
    row.index_plus = a;
    row.index_minus = b;
    row.e_plus = ep[a];
    row.e_minus = em[b];
    row.gap = std::abs(ep[a] - em[b]);
    row.eps_mean = eig.scaled(0.5 * (ep[a] + em[b]));
    if (crit.three_phases) row.phase = classical::classify(row.eps_mean, crit);
    const double band = 5.0 * local_spacing(row.eps_mean);
    row.near_critical = std::abs(row.eps_mean - crit.eps_c1) < band ||
                        std::abs(row.eps_mean - crit.eps_c2) < band;
    table.rows.push_back(row);
  }
  for (int a : pairing.unpaired_plus) table.unpaired.push_back({Parity::even, a});
  for (int b : pairing.unpaired_minus) table.unpaired.push_back({Parity::odd, b});
  return table;
}

void doublet_matrix_elements(DoubletTable& table, const EigenCharges& elements) {
  for (DoubletRow& row : table.rows) {
    row.abs_cx = std::abs(elements.cx(row.index_minus, row.index_plus));
    row.abs_cy = std::abs(elements.cy(row.index_minus, row.index_plus));
    row.abs_kx = std::abs(elements.kx(row.index_minus, row.index_plus));
    row.abs_ky = std::abs(elements.ky(row.index_minus, row.index_plus));
  }
}

void doublet_matrix_elements(DoubletTable& table, const ChargeSet& charges, const EigenSystem& eig) {
  doublet_matrix_elements(table, charges_in_eigenbasis(charges, eig));
}

bool in_window(double eps, const classical::CriticalEnergies& crit, Side side) {
  return side == Side::below_c1 ? eps < crit.eps_c1 : eps > crit.eps_c2;
}

TildeOperator project_tilde(const CMat& op, const EigenSystem& eig,
                            const classical::CriticalEnergies& crit, Side side) {
  if (op.rows() != eig.dim() || op.cols() != eig.dim())
    throw std::invalid_argument("project_tilde: dimension mismatch");
  std::vector<Level> inside;
  for (Parity p : {Parity::even, Parity::odd})
    for (int n = 0; n < eig.sector(p).size(); ++n)
      if (in_window(eig.eps({p, n}), crit, side)) inside.push_back({p, n});

  TildeOperator out;
  if (inside.empty()) {
    out.op = CMat::Zero(eig.dim(), eig.dim());
    out.empty_window = true;
    return out;
  }
  Mat u(eig.dim(), static_cast<Eigen::Index>(inside.size()));
  for (std::size_t i = 0; i < inside.size(); ++i) u.col(static_cast<Eigen::Index>(i)) = eig.full_vector(inside[i]);
  const CMat uc = u.cast<cplx>();
  const CMat proj = uc * uc.transpose();
  out.op = proj * op * proj;
  return out;
}

}  // namespace almg
