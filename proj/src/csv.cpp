#include "almg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace almg::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

Writer::Writer(const std::filesystem::path& path, const std::string& config_echo,
               std::vector<std::string> columns)
    : width_(columns.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out_ << "# config: " << config_echo << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != width_) throw std::logic_error("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>)
            out_ << format_double(v);
          else
            out_ << v;
        },
        cells[i]);
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("csv write failed");
}

void spectrum_flow(const std::filesystem::path& path, const std::string& echo,
                   const std::vector<SpectrumRow>& rows) {
  Writer w(path, echo, {"xi", "n", "parity", "energy", "eps"});
  for (const auto& r : rows) w.row({r.xi, r.n, sign_of(r.parity), r.energy, r.eps});
}

void doublets(const std::filesystem::path& path, const std::string& echo, const DoubletTable& table) {
  Writer w(path, echo, {"eps_mean", "gap", "phase", "abs_cx", "abs_cy", "abs_kx", "abs_ky"});
  for (const auto& r : table.rows)
    w.row({r.eps_mean, r.gap, std::string(r.phase ? to_string(*r.phase) : "NA"), r.abs_cx, r.abs_cy,
           r.abs_kx, r.abs_ky});
}

void orbit(const std::filesystem::path& path, const std::string& echo,
           const std::vector<classical::OrbitPoint>& points) {
  Writer w(path, echo, {"t", "Q", "P", "eps"});
  for (const auto& p : points) w.row({p.t, p.q, p.p, p.eps});
}

void contour(const std::filesystem::path& path, const std::string& echo, const ModelParams& params, int n) {
  if (n < 2) throw std::invalid_argument("contour: grid needs at least 2 points per axis");
  Writer w(path, echo, {"Q", "P", "eps"});
  const double r = std::sqrt(classical::kDiskRadiusSquared);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const classical::State s{-r + 2.0 * r * a / (n - 1), -r + 2.0 * r * b / (n - 1)};
      if (!classical::in_disk(s)) continue;
      w.row({s.q, s.p, classical::energy(s, params)});
    }
}

void evolution(const std::filesystem::path& path, const std::string& echo,
               const std::vector<EvolutionRow>& rows, bool with_classical) {
  std::vector<std::string> cols{"t", "jx", "jy", "jz"};
  if (with_classical) {
    cols.emplace_back("jx_classical");
    cols.emplace_back("jy_classical");
  }
  Writer w(path, echo, cols);
  for (const auto& r : rows) {
    if (with_classical)
      w.row({r.t, r.jx, r.jy, r.jz, r.jx_classical, r.jy_classical});
    else
      w.row({r.t, r.jx, r.jy, r.jz});
  }
}

void ldos(const std::filesystem::path& path, const std::string& echo, const Ldos& dist,
          const classical::CriticalEnergies& crit) {
  Writer w(path, echo, {"eps", "weight", "parity", "phase"});
  for (const auto& e : dist.entries)
    w.row({e.eps, e.weight, sign_of(e.parity),
           std::string(crit.three_phases ? to_string(classical::classify(e.eps, crit)) : "NA")});
}

void scan(const std::filesystem::path& path, const std::string& echo, const ScanResult& result) {
  Writer w(path, echo,
           {"tau_int", "eps_mean", "sigma_eps", "jx", "jy", "jz", "cx", "cy", "kx", "ky", "gme_jx",
            "gme_jy", "gme_jz", "occ_I", "occ_II", "occ_III"});
  for (const auto& r : result.rows)
    w.row({r.tau_int, r.eps_mean, r.sigma_eps, r.jx, r.jy, r.jz, r.cx, r.cy, r.kx, r.ky, r.gme_jx,
           r.gme_jy, r.gme_jz, r.occupation[0], r.occupation[1], r.occupation[2]});
}

void rates(const std::filesystem::path& path, const std::string& echo, const RateSeries& s) {
  Writer w(path, echo,
           {"t", "sp", "pprp", "pprp_plus", "pprp_minus", "rate_sp", "rate_pprp", "drate_pprp"});
  for (std::size_t i = 0; i < s.t.size(); ++i)
    w.row({s.t[i], s.sp[i], s.pprp[i], s.pprp_plus[i], s.pprp_minus[i], s.rate_sp[i], s.rate_pprp[i],
           s.drate_pprp[i]});
}

}  // namespace almg::csv
