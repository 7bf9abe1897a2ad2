#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "splitsim/errors.hpp"
#include "splitsim/sim.hpp"
#include "test_helpers.hpp"

using namespace splitsim;

namespace {

RunConfig small_config(int episodes = 3) {
  RunConfig cfg = testutil::default_config();
  cfg.episodes = episodes;
  return cfg;
}

std::string csv_of(const RunResult& result) {
  std::ostringstream os;
  write_slots_csv(os, result.records);
  return os.str();
}

}  // namespace

TEST_CASE("sim: population pins the first four devices") {
  const RunConfig cfg = testutil::default_config();
  Rng rng = Rng::derive(cfg.seed, "population");
  const Population pop = build_population(cfg, rng);

  REQUIRE(pop.devices.size() == 30);
  const double freqs[] = {0.5e9, 1e9, 2e9, 4e9};
  const int cores[] = {1, 4, 8, 16};
  for (int i = 0; i < 4; ++i) {
    CHECK(pop.devices[i].freq_hz == freqs[i]);
    CHECK(pop.devices[i].cores == cores[i]);
    CHECK(pop.devices[i].uplink.distance_m == 200.0);
    CHECK(pop.devices[i].kappa == cfg.device_kappa);
    CHECK(pop.devices[i].uplink.bandwidth_hz == 20e6);
    CHECK(pop.devices[i].uplink.tx_power_w == 0.4);
  }
  CHECK(pop.server.freq_hz == 3e9);
  CHECK(pop.server.cores == 32);
  CHECK(pop.server.downlink.bandwidth_hz == 40e6);
}

TEST_CASE("sim: sampled devices stay inside the configured ranges") {
  const RunConfig cfg = testutil::default_config();
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RunConfig c = cfg;
    c.seed = seed;
    Rng rng = Rng::derive(seed, "population");
    const Population pop = build_population(c, rng);
    for (std::size_t i = 4; i < pop.devices.size(); ++i) {
      const DeviceSpec& d = pop.devices[i];
      CHECK(d.freq_hz >= 0.5e9);
      CHECK(d.freq_hz <= 3e9);
      CHECK(d.cores >= 1);
      CHECK(d.cores <= 8);
      CHECK(d.uplink.distance_m >= 100.0);
      CHECK(d.uplink.distance_m <= 1000.0);
    }
  }
}

TEST_CASE("sim: invalid population ranges are rejected") {
  RunConfig cfg = testutil::default_config();
  cfg.sampling.freq_ghz_lo = 3.0;
  cfg.sampling.freq_ghz_hi = 0.5;
  Rng rng(1);
  CHECK_THROWS_AS((void)build_population(cfg, rng), ConfigError);
}

TEST_CASE("sim: single-slot run under the fixed scheduler") {
  RunConfig cfg = small_config(1);
  cfg.device_count = 1;
  cfg.pinned = {cfg.pinned[0]};
  cfg.scheduler = SchedulerKind::fixed_sl;
  const RunResult r = run(cfg);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].t == 1);
  CHECK(r.records[0].n == 1);
  CHECK(r.records[0].m == 1);
  CHECK(r.records[0].split == 9);
  CHECK(r.records[0].share == 1.0);
  CHECK(r.records[0].backlog_before == 0.0);
  CHECK(r.summary.slots == 1);
}

TEST_CASE("sim: slot indexing and queue dynamics are auditable from records") {
  RunConfig cfg = small_config(4);
  const RunResult r = run(cfg);
  REQUIRE(r.records.size() == static_cast<std::size_t>(4 * cfg.device_count));

  double backlog = 0.0;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const SlotRecord& rec = r.records[i];
    CHECK(rec.t == static_cast<std::int64_t>(i) + 1);
    CHECK(rec.t == static_cast<std::int64_t>(rec.n - 1) * cfg.device_count + rec.m);
    CHECK(rec.backlog_before == backlog);
    const double expected =
        std::max(rec.backlog_before + rec.cost.energy_total - cfg.e_th_j, 0.0);
    CHECK(rec.backlog_after == doctest::Approx(expected).epsilon(1e-15));
    backlog = rec.backlog_after;
    CHECK(rec.iterations >= 1);
    CHECK(rec.cost.delay_total > 0.0);
  }
  CHECK(r.summary.stability_ratio ==
        doctest::Approx(backlog / static_cast<double>(r.records.size())));

  // summary means match the trace
  std::vector<CostBreakdown> costs;
  for (const auto& rec : r.records) costs.push_back(rec.cost);
  const auto [d, e] = average_metrics(costs);
  CHECK(r.summary.mean_delay_s == doctest::Approx(d).epsilon(1e-12));
  CHECK(r.summary.mean_energy_j == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("sim: identical seeds give byte-identical traces") {
  const RunConfig cfg = small_config(2);
  const std::string a = csv_of(run(cfg));
  const std::string b = csv_of(run(cfg));
  CHECK(a == b);

  RunConfig other = cfg;
  other.seed += 1;
  CHECK(csv_of(run(other)) != a);
}

TEST_CASE("sim: channel draws do not depend on the scheduler") {
  RunConfig cfg = small_config(2);
  cfg.scheduler = SchedulerKind::open;
  const RunResult open = run(cfg);
  cfg.scheduler = SchedulerKind::fixed_sl;
  const RunResult fixed = run(cfg);
  REQUIRE(open.records.size() == fixed.records.size());
  for (std::size_t i = 0; i < open.records.size(); ++i) {
    CHECK(open.records[i].uplink_gain == fixed.records[i].uplink_gain);
    CHECK(open.records[i].downlink_gain == fixed.records[i].downlink_gain);
  }
}

TEST_CASE("sim: population does not depend on the episode count") {
  RunConfig a = small_config(1);
  RunConfig b = small_config(5);
  Rng ra = Rng::derive(a.seed, "population");
  Rng rb = Rng::derive(b.seed, "population");
  const Population pa = build_population(a, ra);
  const Population pb = build_population(b, rb);
  REQUIRE(pa.devices.size() == pb.devices.size());
  for (std::size_t i = 0; i < pa.devices.size(); ++i) {
    CHECK(pa.devices[i].freq_hz == pb.devices[i].freq_hz);
    CHECK(pa.devices[i].cores == pb.devices[i].cores);
    CHECK(pa.devices[i].uplink.distance_m == pb.devices[i].uplink.distance_m);
  }
}

TEST_CASE("sim: calibrated default weight is recorded and positive") {
  const RunConfig cfg = small_config(1);
  const RunResult r = run(cfg);
  CHECK(r.summary.v_used > 0.0);

  RunConfig manual = cfg;
  manual.v = 123.0;
  CHECK(run(manual).summary.v_used == 123.0);
}

TEST_CASE("sim: local-updates multiplier scales the compute terms") {
  RunConfig cfg = small_config(1);
  cfg.scheduler = SchedulerKind::fixed_sl;
  cfg.v = 1.0;  // skip calibration so both runs share it
  const RunResult base = run(cfg);
  cfg.local_updates = 2.0;
  const RunResult doubled = run(cfg);
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    CHECK(doubled.records[i].cost.d_dev_comp ==
          doctest::Approx(2.0 * base.records[i].cost.d_dev_comp).epsilon(1e-12));
    // transfers are workload-independent
    CHECK(doubled.records[i].cost.d_smashed_up ==
          doctest::Approx(base.records[i].cost.d_smashed_up).epsilon(1e-12));
  }
}

TEST_CASE("sim: amplitude-gain mode squares the drawn gains") {
  RunConfig cfg = small_config(1);
  cfg.scheduler = SchedulerKind::fixed_sl;
  cfg.v = 1.0;
  const RunResult power = run(cfg);
  cfg.gain_is_power = false;
  const RunResult amplitude = run(cfg);
  for (std::size_t i = 0; i < power.records.size(); ++i) {
    CHECK(amplitude.records[i].uplink_gain ==
          doctest::Approx(power.records[i].uplink_gain * power.records[i].uplink_gain)
              .epsilon(1e-12));
  }
}

TEST_CASE("sim: sweep tabulates reductions against the fixed baseline") {
  RunConfig base = small_config(2);
  std::vector<RunConfig> cfgs;
  for (SchedulerKind kind : {SchedulerKind::open, SchedulerKind::fixed_sl}) {
    RunConfig c = base;
    c.scheduler = kind;
    cfgs.push_back(c);
  }
  const std::vector<double> scales{1.0};
  const auto rows = sweep(cfgs, scales);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].summary.scheduler == "open");
  REQUIRE(rows[1].summary.scheduler == "fixed-sl");
  REQUIRE(rows[0].delay_reduction_vs_fixed_sl.has_value());
  CHECK(*rows[0].delay_reduction_vs_fixed_sl ==
        doctest::Approx(1.0 - rows[0].summary.mean_delay_s / rows[1].summary.mean_delay_s));
  CHECK(*rows[1].delay_reduction_vs_fixed_sl == doctest::Approx(0.0));

  // the two rows saw the same channels, so the baseline's energy stream is shared
  CHECK(rows[0].summary.seed == rows[1].summary.seed);

  SUBCASE("mismatched populations are rejected") {
    cfgs[1].seed += 1;
    CHECK_THROWS_AS((void)sweep(cfgs, scales), ConfigError);
  }
}

TEST_CASE("sim: oracle and alternating schedulers coincide on full runs") {
  RunConfig cfg = small_config(2);
  cfg.scheduler = SchedulerKind::open;
  const RunResult open = run(cfg);
  cfg.scheduler = SchedulerKind::oracle;
  const RunResult oracle = run(cfg);
  REQUIRE(open.records.size() == oracle.records.size());
  for (std::size_t i = 0; i < open.records.size(); ++i) {
    CHECK(testutil::close_rel(open.records[i].objective, oracle.records[i].objective, 1e-9));
  }
  CHECK(testutil::close_rel(open.summary.mean_delay_s, oracle.summary.mean_delay_s, 1e-9));
  CHECK(testutil::close_rel(open.summary.mean_energy_j, oracle.summary.mean_energy_j, 1e-9));
}

TEST_CASE("sim: summary json embeds provenance") {
  const RunConfig cfg = small_config(1);
  const RunResult r = run(cfg);
  const nlohmann::json j = r.summary.to_json(cfg);
  CHECK(j.at("tool_version").is_string());
  CHECK(j.at("seed").get<std::uint64_t>() == cfg.seed);
  CHECK(j.at("profile").at("checksum_fnv1a64").is_string());
  CHECK(j.at("config").at("run").at("episodes").get<int>() == 1);
  CHECK(j.at("per_md").size() == 30);
}
