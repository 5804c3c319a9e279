#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "almg/protocol.hpp"

namespace almg {

/// Bad user input; the CLI maps it to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat JSON object of run parameters. Keys:
///   two_j, xi_ini, alpha_ini, xi_int, alpha_int, xi_fin, alpha_fin, p, phi,
///   tau_int, tau_list, tau_min, tau_max, tau_step, tau_fin, dt,
///   two_j_list, t_max, t_dt, gme_width_factor,
///   xi, alpha, xi_min, xi_max, xi_steps,
///   orbit_q, orbit_p, orbit_T, orbit_h, out_dir, fig
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(nlohmann::json values);

  static RunConfig from_file(const std::filesystem::path& path);
  /// Parameter sets of figures 1-8. Throws UsageError for anything else.
  static RunConfig preset(int fig);

  /// Keys of `other` override ours.
  void merge(const RunConfig& other);

  bool has(const std::string& key) const { return values_.contains(key); }
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;

  template <class T>
  void set(const std::string& key, const T& v) {
    values_[key] = v;
  }

  /// Required keys not present. An entry "a|b" is satisfied by either key.
  std::vector<std::string> missing(const std::vector<std::string>& required) const;

  /// Protocol fields, with the standard parameter sets filling gaps.
  ProtocolSpec protocol_spec() const;
  /// tau_list if present, else tau_min..tau_max in steps of tau_step (inclusive).
  std::vector<double> tau_grid() const;

  /// Compact JSON with sorted keys.
  std::string echo() const { return values_.dump(); }
  const nlohmann::json& values() const noexcept { return values_; }

 private:
  nlohmann::json values_ = nlohmann::json::object();
};

}  // namespace almg
