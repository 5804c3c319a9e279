#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "almg/charges.hpp"
#include "almg/classical.hpp"
#include "almg/dpt1.hpp"
#include "almg/dpt2.hpp"
#include "almg/eigensystem.hpp"
#include "almg/protocol.hpp"

namespace almg::csv {

using Cell = std::variant<double, int, std::string>;

/// Writes `# config: <echo>`, the header, then rows. Doubles use %.15g.
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::string& config_echo,
         std::vector<std::string> columns);

  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;
};

std::string format_double(double v);

void spectrum_flow(const std::filesystem::path& path, const std::string& echo,
                   const std::vector<SpectrumRow>& rows);

void doublets(const std::filesystem::path& path, const std::string& echo, const DoubletTable& table);

void orbit(const std::filesystem::path& path, const std::string& echo,
           const std::vector<classical::OrbitPoint>& points);

/// Q,P,eps on an n x n grid over [-sqrt2, sqrt2]^2, disk points only.
void contour(const std::filesystem::path& path, const std::string& echo, const ModelParams& params, int n);

void evolution(const std::filesystem::path& path, const std::string& echo,
               const std::vector<EvolutionRow>& rows, bool with_classical);

void ldos(const std::filesystem::path& path, const std::string& echo, const Ldos& dist,
          const classical::CriticalEnergies& crit);

void scan(const std::filesystem::path& path, const std::string& echo, const ScanResult& result);

void rates(const std::filesystem::path& path, const std::string& echo, const RateSeries& s);

}  // namespace almg::csv
