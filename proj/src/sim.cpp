#include "splitsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "splitsim/errors.hpp"
#include "splitsim/lyapunov.hpp"
#include "splitsim/version.hpp"

namespace splitsim {

namespace {

// Shortest decimal form that parses back to the same double.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

DeviceSpec make_device(const RunConfig& cfg, double freq_ghz, int cores, double distance_m) {
  DeviceSpec d;
  d.freq_hz = freq_ghz * 1e9;
  d.flops_per_cycle = cfg.device_flops_per_cycle;
  d.cores = cores;
  d.kappa = cfg.device_kappa;
  d.uplink = cfg.uplink.to_link(distance_m);
  return d;
}

}  // namespace

Population build_population(const RunConfig& cfg, Rng& rng) {
  cfg.validate();
  Population pop;
  pop.server = cfg.server_spec();
  pop.devices.reserve(static_cast<std::size_t>(cfg.device_count));
  for (const PinnedDeviceConfig& p : cfg.pinned) {
    if (static_cast<int>(pop.devices.size()) >= cfg.device_count) break;
    pop.devices.push_back(make_device(cfg, p.freq_ghz, p.cores, p.distance_m));
  }
  while (static_cast<int>(pop.devices.size()) < cfg.device_count) {
    const double freq = rng.uniform(cfg.sampling.freq_ghz_lo, cfg.sampling.freq_ghz_hi);
    const int cores =
        static_cast<int>(rng.uniform_int(cfg.sampling.cores_lo, cfg.sampling.cores_hi));
    const double dist = rng.uniform(cfg.sampling.distance_m_lo, cfg.sampling.distance_m_hi);
    pop.devices.push_back(make_device(cfg, freq, cores, dist));
  }
  for (const DeviceSpec& d : pop.devices) d.validate();
  return pop;
}

double calibrate_default_v(const RunConfig& cfg, const ModelProfile& profile,
                           const Population& pop) {
  double delay_sum = 0.0;
  double energy_sum = 0.0;
  for (const DeviceSpec& dev : pop.devices) {
    RadioLink down = pop.server.downlink;
    down.distance_m = dev.uplink.distance_m;
    ChannelDraw mean_draw{mean_gain(dev.uplink), mean_gain(down)};
    SlotContext ctx{&profile, &dev, &pop.server, mean_draw,
                    PenaltyConfig{1.0, cfg.e_th_j}, 0.0};
    const SolverResult r = solve_baseline(ctx, SchedulerKind::delay_opt, cfg.baseline);
    delay_sum += r.cost.delay_total;
    energy_sum += r.cost.energy_total;
  }
  const double n = static_cast<double>(pop.devices.size());
  const double typical_delay = std::max(delay_sum / n, 1e-12);
  const double typical_excess = std::max(energy_sum / n - cfg.e_th_j, 0.01 * cfg.e_th_j);
  return cfg.e_th_j * typical_excess / typical_delay;
}

RunResult run(const RunConfig& cfg, const ModelProfile& profile_in, const RecordSink& sink) {
  cfg.validate();
  const ModelProfile profile = cfg.local_updates == 1.0
                                   ? profile_in
                                   : profile_in.with_flops_scaled(cfg.local_updates);

  Rng pop_rng = Rng::derive(cfg.seed, "population");
  const Population pop = build_population(cfg, pop_rng);
  Rng fading = Rng::derive(cfg.seed, "fading");

  PenaltyConfig penalty{cfg.v > 0.0 ? cfg.v : calibrate_default_v(cfg, profile, pop),
                        cfg.e_th_j};
  penalty.validate();

  const int devices = static_cast<int>(pop.devices.size());
  RunResult result;
  result.records.reserve(static_cast<std::size_t>(cfg.episodes) * devices);

  QueueState queue;  // starts at zero backlog
  double delay_sum = 0.0;
  double energy_sum = 0.0;
  std::vector<MdAggregate> agg(static_cast<std::size_t>(devices));

  for (int n = 1; n <= cfg.episodes; ++n) {
    for (int m = 1; m <= devices; ++m) {
      const DeviceSpec& dev = pop.devices[static_cast<std::size_t>(m) - 1];
      RadioLink down = pop.server.downlink;
      down.distance_m = dev.uplink.distance_m;
      ChannelDraw d = draw(dev.uplink, down, fading);
      if (!cfg.gain_is_power) {
        d.uplink_gain *= d.uplink_gain;
        d.downlink_gain *= d.downlink_gain;
      }

      SlotContext ctx{&profile, &dev, &pop.server, d, penalty, queue.backlog};
      const SolverResult r = solve(ctx, cfg.scheduler, cfg.baseline);

      SlotRecord rec;
      rec.t = static_cast<std::int64_t>(n - 1) * devices + m;
      rec.n = n;
      rec.m = m;
      rec.split = r.decision.split;
      rec.share = r.decision.share;
      rec.uplink_gain = d.uplink_gain;
      rec.downlink_gain = d.downlink_gain;
      rec.cost = r.cost;
      rec.backlog_before = queue.backlog;
      queue = update(penalty, queue, r.cost.energy_total);
      rec.backlog_after = queue.backlog;
      rec.objective = r.objective;
      rec.iterations = r.iterations;
      if (sink) sink(rec);
      result.records.push_back(rec);

      delay_sum += r.cost.delay_total;
      energy_sum += r.cost.energy_total;
      MdAggregate& a = agg[static_cast<std::size_t>(m) - 1];
      a.md = m;
      a.mean_split += r.decision.split;
      a.mean_share += r.decision.share;
      a.mean_delay_s += r.cost.delay_total;
      a.mean_energy_j += r.cost.energy_total;
    }
  }

  const double slots = static_cast<double>(result.records.size());
  for (MdAggregate& a : agg) {
    const double per_md_slots = static_cast<double>(cfg.episodes);
    a.mean_split /= per_md_slots;
    a.mean_share /= per_md_slots;
    a.mean_delay_s /= per_md_slots;
    a.mean_energy_j /= per_md_slots;
  }

  RunSummary& s = result.summary;
  s.scheduler = to_string(cfg.scheduler);
  s.seed = cfg.seed;
  s.slots = result.records.size();
  s.mean_delay_s = delay_sum / slots;
  s.mean_energy_j = energy_sum / slots;
  s.stability_ratio = queue.backlog / slots;
  s.v_used = penalty.v;
  s.e_th_j = cfg.e_th_j;
  s.profile_name = profile.name();
  s.profile_checksum = profile.checksum();
  s.per_md = std::move(agg);
  return result;
}

RunResult run(const RunConfig& cfg) {
  return run(cfg, load_profile(cfg.profile_path));
}

nlohmann::json RunSummary::to_json(const RunConfig& cfg) const {
  nlohmann::json per_md_json = nlohmann::json::array();
  for (const MdAggregate& a : per_md) {
    per_md_json.push_back({{"md", a.md},
                           {"mean_split", a.mean_split},
                           {"mean_share", a.mean_share},
                           {"mean_delay_s", a.mean_delay_s},
                           {"mean_energy_j", a.mean_energy_j}});
  }
  char checksum_hex[20];
  std::snprintf(checksum_hex, sizeof(checksum_hex), "%016llx",
                static_cast<unsigned long long>(profile_checksum));
  return {
      {"tool_version", kVersion},
      {"csv_schema_version", 1},
      {"scheduler", scheduler},
      {"seed", seed},
      {"slots", slots},
      {"mean_delay_s", mean_delay_s},
      {"mean_energy_j", mean_energy_j},
      {"stability_ratio", stability_ratio},
      {"v_used", v_used},
      {"e_th_j", e_th_j},
      {"profile", {{"name", profile_name}, {"checksum_fnv1a64", checksum_hex}}},
      {"per_md", per_md_json},
      {"config", cfg.to_json()},
  };
}

std::vector<ComparisonRow> sweep(std::span<const RunConfig> cfgs,
                                 std::span<const double> v_scales) {
  if (cfgs.empty()) throw ConfigError("sweep: no configurations");
  const std::vector<double> scales =
      v_scales.empty() ? std::vector<double>{1.0}
                       : std::vector<double>(v_scales.begin(), v_scales.end());

  // All rows must describe the same population and workload.
  const RunConfig& head = cfgs.front();
  for (const RunConfig& c : cfgs) {
    const bool same = c.seed == head.seed && c.profile_path == head.profile_path &&
                      c.to_json().at("devices") == head.to_json().at("devices") &&
                      c.to_json().at("server") == head.to_json().at("server");
    if (!same) throw ConfigError("sweep: configurations differ in population or profile");
  }

  const ModelProfile profile = load_profile(head.profile_path);

  // The calibrated weight must be shared across rows, otherwise v-scales
  // would silently recalibrate per scheduler.
  Rng pop_rng = Rng::derive(head.seed, "population");
  const Population pop = build_population(head, pop_rng);
  const ModelProfile effective = head.local_updates == 1.0
                                     ? profile
                                     : profile.with_flops_scaled(head.local_updates);
  const double v_base =
      head.v > 0.0 ? head.v : calibrate_default_v(head, effective, pop);

  std::vector<ComparisonRow> rows;
  for (const RunConfig& c : cfgs) {
    for (double scale : scales) {
      RunConfig rc = c;
      rc.v = v_base * scale;
      ComparisonRow row;
      row.summary = run(rc, profile).summary;
      row.v_scale = scale;
      rows.push_back(std::move(row));
    }
  }

  // Reductions relative to the fixed-sl row at scale 1 (any scale: the
  // baseline ignores the penalty weight, so take the first fixed-sl row).
  const ComparisonRow* baseline = nullptr;
  for (const ComparisonRow& row : rows) {
    if (row.summary.scheduler == "fixed-sl") {
      baseline = &row;
      break;
    }
  }
  if (baseline != nullptr) {
    for (ComparisonRow& row : rows) {
      row.delay_reduction_vs_fixed_sl =
          1.0 - row.summary.mean_delay_s / baseline->summary.mean_delay_s;
      row.energy_reduction_vs_fixed_sl =
          1.0 - row.summary.mean_energy_j / baseline->summary.mean_energy_j;
    }
  }
  return rows;
}

const char* const kSlotsCsvHeader =
    "t,n,m,split,share,uplink_gain,downlink_gain,"
    "d_dev_comp,d_srv_comp,d_model_down,d_smashed_up,d_grad_down,d_model_up,delay_total,"
    "e_dev_tx,e_srv_tx,e_dev_comp,e_srv_comp,energy_total,"
    "backlog_before,backlog_after,objective,iterations";

void write_slots_csv_header(std::ostream& out) { out << kSlotsCsvHeader << '\n'; }

void write_slot_csv_row(std::ostream& out, const SlotRecord& r) {
  out << r.t << ',' << r.n << ',' << r.m << ',' << r.split << ',' << fmt(r.share) << ','
      << fmt(r.uplink_gain) << ',' << fmt(r.downlink_gain) << ',' << fmt(r.cost.d_dev_comp)
      << ',' << fmt(r.cost.d_srv_comp) << ',' << fmt(r.cost.d_model_down) << ','
      << fmt(r.cost.d_smashed_up) << ',' << fmt(r.cost.d_grad_down) << ','
      << fmt(r.cost.d_model_up) << ',' << fmt(r.cost.delay_total) << ','
      << fmt(r.cost.e_dev_tx) << ',' << fmt(r.cost.e_srv_tx) << ',' << fmt(r.cost.e_dev_comp)
      << ',' << fmt(r.cost.e_srv_comp) << ',' << fmt(r.cost.energy_total) << ','
      << fmt(r.backlog_before) << ',' << fmt(r.backlog_after) << ',' << fmt(r.objective)
      << ',' << r.iterations << '\n';
}

void write_slots_csv(std::ostream& out, std::span<const SlotRecord> records) {
  write_slots_csv_header(out);
  for (const SlotRecord& r : records) write_slot_csv_row(out, r);
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "scheduler,v_scale,v_used,slots,mean_delay_s,mean_energy_j,stability_ratio,"
         "delay_reduction_vs_fixed_sl,energy_reduction_vs_fixed_sl\n";
  for (const ComparisonRow& row : rows) {
    const RunSummary& s = row.summary;
    out << s.scheduler << ',' << fmt(row.v_scale) << ',' << fmt(s.v_used) << ',' << s.slots
        << ',' << fmt(s.mean_delay_s) << ',' << fmt(s.mean_energy_j) << ','
        << fmt(s.stability_ratio) << ',';
    if (row.delay_reduction_vs_fixed_sl) out << fmt(*row.delay_reduction_vs_fixed_sl);
    out << ',';
    if (row.energy_reduction_vs_fixed_sl) out << fmt(*row.energy_reduction_vs_fixed_sl);
    out << '\n';
  }
}

}  // namespace splitsim
