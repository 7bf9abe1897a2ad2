#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitsim/cost.hpp"
#include "splitsim/solver.hpp"

namespace splitsim {

// Radio parameters as they appear in the config file: every key carries its
// unit, conversion to SI happens in to_link().
struct LinkConfig {
  double bandwidth_mhz = 0.0;
  double tx_power_w = 0.0;
  double antenna_gain = 0.0;
  double carrier_mhz = 0.0;
  double pathloss_exp = 0.0;
  double noise_psd_dbm_hz = 0.0;
  double interference_psd_dbm_hz = 0.0;

  RadioLink to_link(double distance_m) const;
};

struct PinnedDeviceConfig {
  double freq_ghz = 0.0;
  int cores = 0;
  double distance_m = 0.0;
};

struct SamplingRanges {
  double freq_ghz_lo = 0.0, freq_ghz_hi = 0.0;
  int cores_lo = 0, cores_hi = 0;
  double distance_m_lo = 0.0, distance_m_hi = 0.0;
};

// Full description of one experiment run. Mirrors the config file section
// for section; defaults() reproduces the bundled experiment setup.
struct RunConfig {
  // run
  int episodes = 100;
  std::uint64_t seed = 1729;
  SchedulerKind scheduler = SchedulerKind::open;
  std::string out_dir = "out";
  bool gain_is_power = true;   // false: drawn gain is an amplitude, square it
  double local_updates = 1.0;  // optional workload multiplier

  // penalty
  double v = 0.0;  // <= 0 selects the calibrated default
  double e_th_j = 3000.0;

  // profile
  std::string profile_path;

  // server
  double server_freq_ghz = 3.0;
  double server_flops_per_cycle = 16.0;
  int server_cores = 32;
  double server_kappa = 1e-26;
  double downlink_ref_distance_m = 200.0;  // placeholder; per-device in effect
  LinkConfig downlink;

  // devices
  int device_count = 30;
  double device_flops_per_cycle = 8.0;
  double device_kappa = 3e-28;
  LinkConfig uplink;
  std::vector<PinnedDeviceConfig> pinned;
  SamplingRanges sampling;

  BaselineConfig baseline;

  static RunConfig defaults();
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  ServerSpec server_spec() const;
  void validate() const;
};

// Reads a config file, or returns defaults() for an empty path.
RunConfig load_config(const std::filesystem::path& path);

// Applies one dotted-path override ("devices.kappa=1e-26") onto a config
// JSON tree. Numeric path segments index arrays. The value is parsed as
// JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& tree, const std::string& assignment);

}  // namespace splitsim
