#include "splitsim/config.hpp"

#include <fstream>
#include <sstream>

#include "splitsim/errors.hpp"

namespace splitsim {

RadioLink LinkConfig::to_link(double distance_m) const {
  RadioLink link;
  link.bandwidth_hz = bandwidth_mhz * 1e6;
  link.tx_power_w = tx_power_w;
  link.antenna_gain = antenna_gain;
  link.carrier_hz = carrier_mhz * 1e6;
  link.pathloss_exp = pathloss_exp;
  link.distance_m = distance_m;
  link.noise_psd_w_hz = dbm_per_hz_to_w_per_hz(noise_psd_dbm_hz);
  link.interference_psd_w_hz = dbm_per_hz_to_w_per_hz(interference_psd_dbm_hz);
  return link;
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.profile_path = "data/lenet5_mnist_profile.json";
  c.downlink = LinkConfig{40.0, 3.0, 8.0, 2000.0, 1.0, -174.0, -164.0};
  c.uplink = LinkConfig{20.0, 0.4, 4.11, 2000.0, 1.0, -174.0, -164.0};
  c.pinned = {
      {0.5, 1, 200.0},
      {1.0, 4, 200.0},
      {2.0, 8, 200.0},
      {4.0, 16, 200.0},
  };
  c.sampling = SamplingRanges{0.5, 3.0, 1, 8, 100.0, 1000.0};
  return c;
}

namespace {

LinkConfig link_from_json(const nlohmann::json& j) {
  LinkConfig l;
  l.bandwidth_mhz = j.at("bandwidth_mhz").get<double>();
  l.tx_power_w = j.at("tx_power_w").get<double>();
  l.antenna_gain = j.at("antenna_gain").get<double>();
  l.carrier_mhz = j.at("carrier_mhz").get<double>();
  l.pathloss_exp = j.at("pathloss_exp").get<double>();
  l.noise_psd_dbm_hz = j.at("noise_psd_dbm_hz").get<double>();
  l.interference_psd_dbm_hz = j.at("interference_psd_dbm_hz").get<double>();
  return l;
}

nlohmann::json link_to_json(const LinkConfig& l) {
  return {
      {"bandwidth_mhz", l.bandwidth_mhz},
      {"tx_power_w", l.tx_power_w},
      {"antenna_gain", l.antenna_gain},
      {"carrier_mhz", l.carrier_mhz},
      {"pathloss_exp", l.pathloss_exp},
      {"noise_psd_dbm_hz", l.noise_psd_dbm_hz},
      {"interference_psd_dbm_hz", l.interference_psd_dbm_hz},
  };
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    if (j.value("config_version", 1) != 1) throw ConfigError("unsupported config_version");
    RunConfig c = defaults();
    if (j.contains("run")) {
      const auto& r = j.at("run");
      c.episodes = r.value("episodes", c.episodes);
      c.seed = r.value("seed", c.seed);
      if (r.contains("scheduler")) c.scheduler = scheduler_from_string(r.at("scheduler"));
      c.out_dir = r.value("out_dir", c.out_dir);
      c.gain_is_power = r.value("gain_is_power", c.gain_is_power);
      c.local_updates = r.value("local_updates", c.local_updates);
    }
    if (j.contains("penalty")) {
      const auto& p = j.at("penalty");
      c.v = p.value("v", c.v);
      c.e_th_j = p.value("e_th_j", c.e_th_j);
    }
    if (j.contains("profile")) c.profile_path = j.at("profile").value("path", c.profile_path);
    if (j.contains("server")) {
      const auto& s = j.at("server");
      c.server_freq_ghz = s.value("freq_ghz", c.server_freq_ghz);
      c.server_flops_per_cycle = s.value("flops_per_cycle", c.server_flops_per_cycle);
      c.server_cores = s.value("cores", c.server_cores);
      c.server_kappa = s.value("kappa", c.server_kappa);
      c.downlink_ref_distance_m = s.value("ref_distance_m", c.downlink_ref_distance_m);
      if (s.contains("downlink")) c.downlink = link_from_json(s.at("downlink"));
    }
    if (j.contains("devices")) {
      const auto& d = j.at("devices");
      c.device_count = d.value("count", c.device_count);
      c.device_flops_per_cycle = d.value("flops_per_cycle", c.device_flops_per_cycle);
      c.device_kappa = d.value("kappa", c.device_kappa);
      if (d.contains("uplink")) c.uplink = link_from_json(d.at("uplink"));
      if (d.contains("pinned")) {
        c.pinned.clear();
        for (const auto& p : d.at("pinned")) {
          c.pinned.push_back(PinnedDeviceConfig{p.at("freq_ghz").get<double>(),
                                                p.at("cores").get<int>(),
                                                p.at("distance_m").get<double>()});
        }
      }
      if (d.contains("sampling")) {
        const auto& s = d.at("sampling");
        const auto f = s.at("freq_ghz");
        const auto co = s.at("cores");
        const auto di = s.at("distance_m");
        c.sampling = SamplingRanges{f.at(0).get<double>(),  f.at(1).get<double>(),
                                    co.at(0).get<int>(),    co.at(1).get<int>(),
                                    di.at(0).get<double>(), di.at(1).get<double>()};
      }
    }
    if (j.contains("baseline")) {
      const auto& b = j.at("baseline");
      c.baseline.fixed_split = b.value("fixed_split", c.baseline.fixed_split);
      c.baseline.energy_share_floor =
          b.value("energy_share_floor", c.baseline.energy_share_floor);
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config schema violation: ") + e.what());
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json pinned_json = nlohmann::json::array();
  for (const auto& p : pinned) {
    pinned_json.push_back({{"freq_ghz", p.freq_ghz},
                           {"cores", p.cores},
                           {"distance_m", p.distance_m}});
  }
  return {
      {"config_version", 1},
      {"run",
       {{"episodes", episodes},
        {"seed", seed},
        {"scheduler", to_string(scheduler)},
        {"out_dir", out_dir},
        {"gain_is_power", gain_is_power},
        {"local_updates", local_updates}}},
      {"penalty", {{"v", v}, {"e_th_j", e_th_j}}},
      {"profile", {{"path", profile_path}}},
      {"server",
       {{"freq_ghz", server_freq_ghz},
        {"flops_per_cycle", server_flops_per_cycle},
        {"cores", server_cores},
        {"kappa", server_kappa},
        {"ref_distance_m", downlink_ref_distance_m},
        {"downlink", link_to_json(downlink)}}},
      {"devices",
       {{"count", device_count},
        {"flops_per_cycle", device_flops_per_cycle},
        {"kappa", device_kappa},
        {"uplink", link_to_json(uplink)},
        {"pinned", pinned_json},
        {"sampling",
         {{"freq_ghz", {sampling.freq_ghz_lo, sampling.freq_ghz_hi}},
          {"cores", {sampling.cores_lo, sampling.cores_hi}},
          {"distance_m", {sampling.distance_m_lo, sampling.distance_m_hi}}}}}},
      {"baseline",
       {{"fixed_split", baseline.fixed_split},
        {"energy_share_floor", baseline.energy_share_floor}}},
  };
}

ServerSpec RunConfig::server_spec() const {
  ServerSpec s;
  s.freq_hz = server_freq_ghz * 1e9;
  s.flops_per_cycle = server_flops_per_cycle;
  s.cores = server_cores;
  s.kappa = server_kappa;
  s.downlink = downlink.to_link(downlink_ref_distance_m);
  return s;
}

void RunConfig::validate() const {
  if (episodes < 1) throw ConfigError("run.episodes must be >= 1");
  if (device_count < 1) throw ConfigError("devices.count must be >= 1");
  if (!(e_th_j > 0.0)) throw ConfigError("penalty.e_th_j must be positive");
  if (!(local_updates > 0.0)) throw ConfigError("run.local_updates must be positive");
  if (sampling.freq_ghz_lo > sampling.freq_ghz_hi || sampling.cores_lo > sampling.cores_hi ||
      sampling.distance_m_lo > sampling.distance_m_hi) {
    throw ConfigError("devices.sampling ranges must be non-empty");
  }
  if (sampling.freq_ghz_lo <= 0.0 || sampling.cores_lo < 1 || sampling.distance_m_lo <= 0.0) {
    throw ConfigError("devices.sampling ranges must be positive");
  }
  for (const auto& p : pinned) {
    if (p.freq_ghz <= 0.0 || p.cores < 1 || p.distance_m <= 0.0) {
      throw ConfigError("devices.pinned entries must be positive");
    }
  }
  if (static_cast<int>(pinned.size()) > device_count) {
    throw ConfigError("more pinned devices than devices.count");
  }
  if (!(baseline.energy_share_floor > 0.0) || baseline.energy_share_floor > 1.0) {
    throw ConfigError("baseline.energy_share_floor must lie in (0, 1]");
  }
  server_spec().validate();
}

RunConfig load_config(const std::filesystem::path& path) {
  if (path.empty()) return RunConfig::defaults();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse failure in " + path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j);
}

void apply_override(nlohmann::json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like section.key=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  nlohmann::json* node = &tree;
  std::istringstream segs(path);
  std::string seg;
  std::vector<std::string> parts;
  while (std::getline(segs, seg, '.')) parts.push_back(seg);
  if (parts.empty()) throw ConfigError("empty override path");

  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (node->is_array()) {
      const std::size_t idx = std::stoul(p);
      if (idx >= node->size()) throw ConfigError("override index out of range: " + path);
      node = &(*node)[idx];
    } else {
      node = &(*node)[p];
    }
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;  // plain string
  }
  const std::string& last = parts.back();
  if (node->is_array()) {
    const std::size_t idx = std::stoul(last);
    if (idx >= node->size()) throw ConfigError("override index out of range: " + path);
    (*node)[idx] = parsed;
  } else {
    (*node)[last] = parsed;
  }
}

}  // namespace splitsim
