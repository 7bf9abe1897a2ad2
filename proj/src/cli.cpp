#include "splitsim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitsim/errors.hpp"
#include "splitsim/sim.hpp"
#include "splitsim/version.hpp"

namespace splitsim {

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string scheduler;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<std::string> overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (JSON); defaults used when absent");
  cmd->add_option("--out", f.out_dir, "Output directory (overrides config and SPLITSIM_OUT)");
  cmd->add_option("--scheduler", f.scheduler,
                  "Scheduler: open | fixed-sl | delay-opt | energy-opt | oracle");
  cmd->add_option("--seed", f.seed, "Master seed")->each([&f](const std::string&) {
    f.seed_set = true;
  });
  cmd->add_option("--set", f.overrides,
                  "Dotted config override, e.g. --set run.episodes=200 (repeatable)");
}

RunConfig assemble_config(const CommonFlags& f) {
  nlohmann::json tree;
  if (f.config_path.empty()) {
    tree = RunConfig::defaults().to_json();
  } else {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError("cannot open config file: " + f.config_path);
    try {
      in >> tree;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config parse failure in " + f.config_path + ": " + e.what());
    }
  }
  for (const std::string& o : f.overrides) apply_override(tree, o);
  RunConfig cfg = RunConfig::from_json(tree);
  if (f.seed_set) cfg.seed = f.seed;
  if (!f.scheduler.empty()) cfg.scheduler = scheduler_from_string(f.scheduler);
  if (!f.out_dir.empty()) {
    cfg.out_dir = f.out_dir;
  } else if (const char* env = std::getenv("SPLITSIM_OUT"); env != nullptr && *env != '\0') {
    cfg.out_dir = env;
  }
  return cfg;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("cannot write output file: " + path.string());
  return out;
}

void print_summary(const RunSummary& s) {
  std::printf("scheduler=%s slots=%lld mean_delay=%.6g s mean_energy=%.6g J "
              "stability=%.6g v=%.6g\n",
              s.scheduler.c_str(), static_cast<long long>(s.slots), s.mean_delay_s,
              s.mean_energy_j, s.stability_ratio, s.v_used);
}

int cmd_run(const CommonFlags& f) {
  const RunConfig cfg = assemble_config(f);
  const ModelProfile profile = load_profile(cfg.profile_path);

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);

  // Stream rows as they are produced so a failing run leaves the partial
  // trace behind.
  auto slots = open_out(dir / "slots.csv");
  write_slots_csv_header(slots);
  RunResult result;
  try {
    result = run(cfg, profile,
                 [&slots](const SlotRecord& rec) { write_slot_csv_row(slots, rec); });
  } catch (...) {
    slots.flush();
    std::fprintf(stderr, "run aborted; partial trace kept in %s\n",
                 (dir / "slots.csv").c_str());
    throw;
  }
  slots.close();

  {
    auto out = open_out(dir / "summary.json");
    out << result.summary.to_json(cfg).dump(2) << '\n';
  }
  print_summary(result.summary);
  std::printf("wrote %s and %s\n", (dir / "slots.csv").c_str(), (dir / "summary.json").c_str());
  return kExitOk;
}

int cmd_sweep(const CommonFlags& f, const std::string& schedulers_csv,
              const std::string& v_scales_csv) {
  const RunConfig base = assemble_config(f);

  std::vector<RunConfig> cfgs;
  std::istringstream schedulers(schedulers_csv);
  std::string token;
  while (std::getline(schedulers, token, ',')) {
    if (token.empty()) continue;
    RunConfig c = base;
    c.scheduler = scheduler_from_string(token);
    cfgs.push_back(std::move(c));
  }
  if (cfgs.empty()) throw ConfigError("sweep: --schedulers selected nothing");

  std::vector<double> scales;
  std::istringstream scale_stream(v_scales_csv);
  while (std::getline(scale_stream, token, ',')) {
    if (token.empty()) continue;
    try {
      scales.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("sweep: bad --v-scales entry: " + token);
    }
  }

  const std::vector<ComparisonRow> rows = sweep(cfgs, scales);

  std::filesystem::create_directories(base.out_dir);
  const std::filesystem::path csv_path = std::filesystem::path(base.out_dir) / "comparison.csv";
  {
    auto out = open_out(csv_path);
    write_comparison_csv(out, rows);
  }
  for (const ComparisonRow& row : rows) print_summary(row.summary);
  std::printf("wrote %s\n", csv_path.c_str());
  return kExitOk;
}

int cmd_validate_profile(const std::string& path) {
  const ModelProfile p = load_profile(path);
  std::printf("profile %s: %d split points, total_flops=%.10g, bytes_per_param=%g\n",
              p.name().c_str(), p.split_count(), p.total_flops(), p.bytes_per_param());
  std::printf("%4s %-10s %16s %12s %12s %12s\n", "s", "layer", "device_flops",
              "device_params", "smashed", "gradient");
  for (int s = 1; s <= p.split_count(); ++s) {
    std::printf("%4d %-10s %16.8g %12lld %12lld %12lld\n", s,
                p.layers()[static_cast<std::size_t>(s) - 1].name.c_str(), p.device_flops(s),
                static_cast<long long>(p.device_params(s)),
                static_cast<long long>(p.smashed_size(s)),
                static_cast<long long>(p.gradient_size(s)));
  }
  return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
  auto load = [](const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open summary: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("summary parse failure in " + path + ": " + e.what());
    }
    return j;
  };
  const nlohmann::json a = load(a_path);
  const nlohmann::json b = load(b_path);
  const double da = a.at("mean_delay_s").get<double>();
  const double db = b.at("mean_delay_s").get<double>();
  const double ea = a.at("mean_energy_j").get<double>();
  const double eb = b.at("mean_energy_j").get<double>();
  std::printf("delay:  %s=%.6g s  %s=%.6g s  reduction=%.2f%%\n",
              a.at("scheduler").get<std::string>().c_str(), da,
              b.at("scheduler").get<std::string>().c_str(), db, 100.0 * (1.0 - da / db));
  std::printf("energy: %s=%.6g J  %s=%.6g J  reduction=%.2f%%\n",
              a.at("scheduler").get<std::string>().c_str(), ea,
              b.at("scheduler").get<std::string>().c_str(), eb, 100.0 * (1.0 - ea / eb));
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Discrete-slot simulator and online optimizer for adaptive split "
               "training over a wireless edge network"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute one experiment, write trace + summary");
  add_common_flags(run_cmd, run_flags);

  CommonFlags sweep_flags;
  std::string schedulers = "open,fixed-sl,delay-opt,energy-opt";
  std::string v_scales = "1";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run a scheduler/penalty-weight matrix, write comparison");
  add_common_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--schedulers", schedulers, "Comma-separated scheduler list");
  sweep_cmd->add_option("--v-scales", v_scales, "Comma-separated multipliers of the base V");

  std::string profile_path = RunConfig::defaults().profile_path;
  CLI::App* validate_cmd =
      app.add_subcommand("validate-profile", "Check a profile file and print its tables");
  validate_cmd->add_option("--profile", profile_path, "Profile file (JSON)");

  std::string cmp_a, cmp_b;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Reduction percentages between two summary files");
  compare_cmd->add_option("summary_a", cmp_a, "Summary to evaluate")->required();
  compare_cmd->add_option("summary_b", cmp_b, "Baseline summary")->required();

  // CLI11 wants mutable argv-style input; it parses right-to-left.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, schedulers, v_scales);
    if (validate_cmd->parsed()) return cmd_validate_profile(profile_path);
    if (compare_cmd->parsed()) return cmd_compare(cmp_a, cmp_b);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ProfileError& e) {
    std::fprintf(stderr, "profile error: %s\n", e.what());
    return kExitProfile;
  } catch (const SimError& e) {
    std::fprintf(stderr, "simulation error: %s\n", e.what());
    return kExitSim;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc) - 1);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace splitsim
