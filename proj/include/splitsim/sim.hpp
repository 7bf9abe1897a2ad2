#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitsim/config.hpp"
#include "splitsim/cost.hpp"
#include "splitsim/profile.hpp"
#include "splitsim/rng.hpp"
#include "splitsim/solver.hpp"

namespace splitsim {

// The device population of one run; device order is fixed for the whole run
// (devices are served one after another within each episode).
struct Population {
  std::vector<DeviceSpec> devices;
  ServerSpec server;
};

// One row of the per-slot trace.
struct SlotRecord {
  std::int64_t t = 0;  // global slot index, t = (n-1)*M + m
  int n = 0;           // episode, 1-based
  int m = 0;           // device, 1-based
  int split = 0;
  double share = 0.0;
  double uplink_gain = 0.0;
  double downlink_gain = 0.0;
  CostBreakdown cost;
  double backlog_before = 0.0;
  double backlog_after = 0.0;
  double objective = 0.0;
  int iterations = 0;
};

struct MdAggregate {
  int md = 0;
  double mean_split = 0.0;
  double mean_share = 0.0;
  double mean_delay_s = 0.0;
  double mean_energy_j = 0.0;
};

struct RunSummary {
  std::string scheduler;
  std::uint64_t seed = 0;
  std::int64_t slots = 0;
  double mean_delay_s = 0.0;
  double mean_energy_j = 0.0;
  double stability_ratio = 0.0;  // final backlog / slots
  double v_used = 0.0;
  double e_th_j = 0.0;
  std::string profile_name;
  std::uint64_t profile_checksum = 0;
  std::vector<MdAggregate> per_md;

  nlohmann::json to_json(const RunConfig& cfg) const;
};

struct RunResult {
  std::vector<SlotRecord> records;
  RunSummary summary;
};

// Builds the device population: pinned devices first, the remainder sampled
// uniformly from the configured ranges using the given stream.
Population build_population(const RunConfig& cfg, Rng& rng);

// Calibrated default penalty weight: matches v * (typical delay) to
// e_th * (typical energy excess) for the share-1 delay-minimizing decision
// evaluated at mean channel gains over the population.
double calibrate_default_v(const RunConfig& cfg, const ModelProfile& profile,
                           const Population& pop);

// Streaming consumer of slot records; invoked once per slot as soon as the
// record exists, so a sink that writes to disk preserves the partial trace
// when a later slot fails.
using RecordSink = std::function<void(const SlotRecord&)>;

// Full experiment: episodes x devices slots in line order. Channel draws
// come from a stream that depends only on the seed, never on the scheduler,
// so runs with different schedulers see identical fading.
RunResult run(const RunConfig& cfg, const ModelProfile& profile,
              const RecordSink& sink = {});

// Convenience: loads the profile from cfg.profile_path and runs.
RunResult run(const RunConfig& cfg);

struct ComparisonRow {
  RunSummary summary;
  double v_scale = 1.0;
  // Reductions are relative to the fixed-sl row of the same sweep; absent
  // when the sweep has no fixed-sl run.
  std::optional<double> delay_reduction_vs_fixed_sl;
  std::optional<double> energy_reduction_vs_fixed_sl;
};

// Runs each config against the shared profile and tabulates reductions
// against the fixed-sl row. All configs must share seed, profile, and
// population parameters.
std::vector<ComparisonRow> sweep(std::span<const RunConfig> cfgs,
                                 std::span<const double> v_scales);

// Trace/summary serialization. Numbers are written with enough digits to
// round-trip exactly, so identical runs produce byte-identical files.
extern const char* const kSlotsCsvHeader;
void write_slots_csv_header(std::ostream& out);
void write_slot_csv_row(std::ostream& out, const SlotRecord& record);
void write_slots_csv(std::ostream& out, std::span<const SlotRecord> records);
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace splitsim
