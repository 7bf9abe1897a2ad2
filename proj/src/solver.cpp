#include "splitsim/solver.hpp"

#include <cmath>
#include <limits>

#include "splitsim/errors.hpp"

namespace splitsim {

namespace {

constexpr double kShareTolerance = 0.01;
constexpr int kMaxIterations = 100;

struct Candidate {
  Decision decision;
  CostBreakdown cost;
  double objective = std::numeric_limits<double>::infinity();
};

Candidate evaluate_candidate(const SlotContext& ctx, int split, double share) {
  Candidate c;
  c.decision = Decision{split, share};
  c.cost = evaluate(*ctx.profile, *ctx.dev, *ctx.srv, ctx.draw, c.decision);
  c.objective = objective(ctx.penalty, QueueState{ctx.backlog, 0}, c.cost);
  return c;
}

// Share actually applied at a given split: splits that leave no server work
// take share 0 so no server energy is spent.
double effective_share(const SlotContext& ctx, int split, double share) {
  const bool no_server_work =
      ctx.profile->total_flops() - ctx.profile->device_flops(split) <= 0.0;
  return no_server_work ? 0.0 : share;
}

// Smallest split that leaves server-side work, or the last split if none
// does. Used to seed the alternating solver before a split is known.
int first_offloading_split(const SlotContext& ctx) {
  const int s_max = ctx.profile->split_count();
  for (int s = 1; s <= s_max; ++s) {
    if (ctx.profile->total_flops() - ctx.profile->device_flops(s) > 0.0) return s;
  }
  return s_max;
}

Candidate best_split_candidate(const SlotContext& ctx, double share) {
  Candidate best;
  const int s_max = ctx.profile->split_count();
  for (int split = 1; split <= s_max; ++split) {
    const double applied = effective_share(ctx, split, share);
    if (applied == 0.0 &&
        ctx.profile->total_flops() - ctx.profile->device_flops(split) > 0.0) {
      continue;  // zero share cannot carry server work
    }
    Candidate c = evaluate_candidate(ctx, split, applied);
    if (c.objective < best.objective) best = c;
  }
  if (!std::isfinite(best.objective)) {
    throw SimError("no feasible split for the given share");
  }
  return best;
}

}  // namespace

SchedulerKind scheduler_from_string(const std::string& name) {
  if (name == "open") return SchedulerKind::open;
  if (name == "fixed-sl") return SchedulerKind::fixed_sl;
  if (name == "delay-opt") return SchedulerKind::delay_opt;
  if (name == "energy-opt") return SchedulerKind::energy_opt;
  if (name == "oracle") return SchedulerKind::oracle;
  throw ConfigError("unknown scheduler: " + name);
}

std::string to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::open: return "open";
    case SchedulerKind::fixed_sl: return "fixed-sl";
    case SchedulerKind::delay_opt: return "delay-opt";
    case SchedulerKind::energy_opt: return "energy-opt";
    case SchedulerKind::oracle: return "oracle";
  }
  throw ConfigError("unknown scheduler kind");
}

void SlotContext::validate() const {
  if (profile == nullptr || dev == nullptr || srv == nullptr) {
    throw SimError("slot context is missing profile, device, or server");
  }
  dev->validate();
  srv->validate();
  penalty.validate();
  if (!(backlog >= 0.0) || !std::isfinite(backlog)) {
    throw SimError("slot context backlog must be >= 0");
  }
}

double optimal_share(const SlotContext& ctx, int split) {
  const double residual = ctx.profile->total_flops() - ctx.profile->device_flops(split);
  if (residual <= 0.0) return 0.0;
  if (ctx.backlog <= 0.0) return 1.0;
  const ServerSpec& srv = *ctx.srv;
  // server delay scales with delay_coeff / share, server energy with
  // energy_coeff * share; the interior stationary point balances the two
  const double capacity = srv.freq_hz * srv.flops_per_cycle * srv.cores;
  const double delay_coeff = residual / capacity;
  const double energy_coeff =
      srv.kappa * srv.flops_per_cycle * srv.cores * srv.freq_hz * srv.freq_hz * residual;
  const double interior =
      std::sqrt(ctx.penalty.v * delay_coeff / (energy_coeff * ctx.backlog));
  return std::min(1.0, interior);
}

std::pair<int, double> best_split_given_share(const SlotContext& ctx, double share) {
  Candidate best = best_split_candidate(ctx, share);
  return {best.decision.split, best.objective};
}

SolverResult solve_open(const SlotContext& ctx) {
  ctx.validate();
  double share = 1.0;
  int split = 0;  // unset until the first exhaustive pass
  Candidate best;
  int iterations = 0;
  while (true) {
    const double last_share = share;
    const int last_split = split;
    share = optimal_share(ctx, split < 1 ? first_offloading_split(ctx) : split);
    Candidate c = best_split_candidate(ctx, share);
    split = c.decision.split;
    if (c.objective < best.objective) best = c;
    ++iterations;
    const bool keep_going =
        std::abs(share - last_share) > kShareTolerance && split != last_split;
    if (!keep_going || iterations >= kMaxIterations) break;
  }
  return SolverResult{best.decision, best.cost, best.objective, iterations};
}

SolverResult solve_joint_oracle(const SlotContext& ctx) {
  ctx.validate();
  Candidate best;
  const int s_max = ctx.profile->split_count();
  for (int split = 1; split <= s_max; ++split) {
    const double closed_form = optimal_share(ctx, split);
    Candidate c = evaluate_candidate(ctx, split, closed_form);
    if (c.objective < best.objective) best = c;
    const double full = effective_share(ctx, split, 1.0);
    if (full != closed_form) {
      Candidate e = evaluate_candidate(ctx, split, full);
      if (e.objective < best.objective) best = e;
    }
  }
  return SolverResult{best.decision, best.cost, best.objective, 1};
}

SolverResult solve_baseline(const SlotContext& ctx, SchedulerKind kind,
                            const BaselineConfig& cfg) {
  ctx.validate();
  const int s_max = ctx.profile->split_count();
  if (kind == SchedulerKind::fixed_sl) {
    if (cfg.fixed_split < 1 || cfg.fixed_split > s_max) {
      throw ConfigError("fixed split " + std::to_string(cfg.fixed_split) + " out of range");
    }
    Candidate c = evaluate_candidate(ctx, cfg.fixed_split, 1.0);
    return SolverResult{c.decision, c.cost, c.objective, 1};
  }

  Candidate best;
  double best_key = std::numeric_limits<double>::infinity();
  for (int split = 1; split <= s_max; ++split) {
    double share = 0.0;
    if (kind == SchedulerKind::delay_opt) {
      share = 1.0;  // delay falls with share, so the full allocation is optimal
    } else if (kind == SchedulerKind::energy_opt) {
      share = effective_share(ctx, split, cfg.energy_share_floor);
    } else {
      throw ConfigError("solve_baseline: not a baseline scheduler");
    }
    Candidate c = evaluate_candidate(ctx, split, share);
    const double key =
        kind == SchedulerKind::delay_opt ? c.cost.delay_total : c.cost.energy_total;
    if (key < best_key) {
      best_key = key;
      best = c;
    }
  }
  return SolverResult{best.decision, best.cost, best.objective, 1};
}

SolverResult solve(const SlotContext& ctx, SchedulerKind kind, const BaselineConfig& cfg) {
  switch (kind) {
    case SchedulerKind::open: return solve_open(ctx);
    case SchedulerKind::oracle: return solve_joint_oracle(ctx);
    default: return solve_baseline(ctx, kind, cfg);
  }
}

}  // namespace splitsim
