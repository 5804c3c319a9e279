#include "almg/config.hpp"

#include <cmath>
#include <fstream>

namespace almg {

using json = nlohmann::json;

RunConfig::RunConfig(json values) : values_(std::move(values)) {
  if (!values_.is_object()) throw UsageError("config must be a JSON object");
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot read " + path.string());
  try {
    return RunConfig(json::parse(in));
  } catch (const json::exception& e) {
    throw UsageError("--config: " + path.string() + ": " + e.what());
  }
}

RunConfig RunConfig::preset(int fig) {
  switch (fig) {
    case 1:
      return RunConfig(json{{"fig", 1}, {"two_j", 40}, {"alpha", -0.6}, {"xi_min", 0.0},
                            {"xi_max", 1.0}, {"xi_steps", 200}});
    case 2:
      return RunConfig(json{{"fig", 2}, {"two_j", 1600}, {"tau_list", {0.5, 1.5, 2.5}},
                            {"orbit_T", 20.0}, {"orbit_h", 1e-3}});
    case 3:
      return RunConfig(json{{"fig", 3}, {"two_j", 6400}, {"xi", 0.5}, {"alpha", -0.6}});
    case 4:
      return RunConfig(json{{"fig", 4}, {"two_j", 6400}, {"p", 0.5}, {"phi", 1.5 * kPi},
                            {"tau_list", {0.5, 1.5, 2.5}}, {"t_max", 50.0}, {"t_dt", 0.05}});
    case 5:
      return RunConfig(json{{"fig", 5}, {"two_j", 6400}, {"p", 0.5}, {"phi", 1.5 * kPi},
                            {"tau_min", 0.0}, {"tau_max", 10.0}, {"tau_step", 0.05},
                            {"tau_fin", 2000.0}, {"gme_width_factor", 2.0}});
    case 6:
      return RunConfig(json{{"fig", 6}, {"two_j", 6400}, {"p", 1.0 / 3.0}, {"phi", 0.6 * kPi},
                            {"tau_min", 0.0}, {"tau_max", 100.0}, {"tau_step", 0.5},
                            {"tau_fin", 5000.0}, {"gme_width_factor", 2.0}});
    case 7:
      return RunConfig(json{{"fig", 7}, {"two_j_list", {3200}}, {"p", 0.5}, {"phi", 1.5 * kPi},
                            {"tau_list", {0.5, 1.5, 2.5}}, {"t_max", 50.0}, {"t_dt", 0.01}});
    case 8:
      return RunConfig(json{{"fig", 8}, {"two_j_list", {400, 800, 1600, 3200}}, {"p", 0.5},
                            {"phi", 1.5 * kPi}, {"tau_list", {3.5, 6.5, 8.5}}, {"t_max", 50.0},
                            {"t_dt", 0.01}});
    default:
      throw UsageError("--fig: unknown preset " + std::to_string(fig) + " (expected 1-8)");
  }
}

void RunConfig::merge(const RunConfig& other) {
  for (const auto& [k, v] : other.values_.items()) values_[k] = v;
}

double RunConfig::number(const std::string& key) const {
  if (!has(key)) throw UsageError("missing required field '" + key + "'");
  const json& v = values_.at(key);
  if (!v.is_number()) throw UsageError("field '" + key + "' must be a number");
  return v.get<double>();
}

double RunConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int RunConfig::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v)) throw UsageError("field '" + key + "' must be an integer");
  return static_cast<int>(v);
}

int RunConfig::integer(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  if (!has(key)) throw UsageError("missing required field '" + key + "'");
  const json& v = values_.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw UsageError("field '" + key + "' must be a nonempty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw UsageError("field '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> RunConfig::integers(const std::string& key) const {
  std::vector<int> out;
  for (double d : numbers(key)) {
    if (d != std::floor(d)) throw UsageError("field '" + key + "' must hold integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

std::string RunConfig::string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const json& v = values_.at(key);
  if (!v.is_string()) throw UsageError("field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> RunConfig::missing(const std::vector<std::string>& required) const {
  std::vector<std::string> out;
  for (const auto& r : required) {
    bool found = false;
    std::size_t start = 0;
    while (start <= r.size()) {
      const std::size_t bar = r.find('|', start);
      const std::string key = r.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
      if (has(key)) found = true;
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    if (!found) out.push_back(r);
  }
  return out;
}

ProtocolSpec RunConfig::protocol_spec() const {
  ProtocolSpec s;
  s.two_j = integer("two_j", s.two_j);
  s.xi_ini = number("xi_ini", s.xi_ini);
  s.alpha_ini = number("alpha_ini", s.alpha_ini);
  s.xi_int = number("xi_int", s.xi_int);
  s.alpha_int = number("alpha_int", s.alpha_int);
  s.xi_fin = number("xi_fin", s.xi_fin);
  s.alpha_fin = number("alpha_fin", s.alpha_fin);
  s.state.p = number("p", s.state.p);
  s.state.phi = number("phi", s.state.phi);
  s.tau_int = number("tau_int", s.tau_int);
  s.tau_fin = number("tau_fin", s.tau_fin);
  s.dt = number("dt", s.dt);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return s;
}

std::vector<double> RunConfig::tau_grid() const {
  if (has("tau_list")) return numbers("tau_list");
  const double lo = number("tau_min");
  const double hi = number("tau_max");
  const double step = number("tau_step");
  if (!(step > 0.0) || hi < lo) throw UsageError("tau grid: need tau_step > 0 and tau_max >= tau_min");
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> g;
  for (long long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

}  // namespace almg
