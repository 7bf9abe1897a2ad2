#pragma once

#include <string>
#include <utility>

#include "splitsim/cost.hpp"
#include "splitsim/lyapunov.hpp"

namespace splitsim {

enum class SchedulerKind { open, fixed_sl, delay_opt, energy_opt, oracle };

SchedulerKind scheduler_from_string(const std::string& name);
std::string to_string(SchedulerKind kind);

// Everything a per-slot solver needs: current channel state, the penalty
// configuration, and the backlog at the start of the slot. Pointers are
// non-owning and must outlive the context.
struct SlotContext {
  const ModelProfile* profile = nullptr;
  const DeviceSpec* dev = nullptr;
  const ServerSpec* srv = nullptr;
  ChannelDraw draw;
  PenaltyConfig penalty;
  double backlog = 0.0;

  void validate() const;
};

struct SolverResult {
  Decision decision;
  CostBreakdown cost;
  double objective = 0.0;  // penalty.v * delay + backlog * energy at the decision
  int iterations = 1;      // outer passes of the alternating solver
};

// Knobs of the reference schedulers.
struct BaselineConfig {
  int fixed_split = 9;              // static split of the fixed scheduler
  double energy_share_floor = 1e-3; // smallest admissible share when server work exists
};

// Closed-form server-share minimizer for a fixed split.
// Returns 0 when the split leaves no server work, 1 when the backlog is
// empty, otherwise min(1, sqrt(v * delay_coeff / (energy_coeff * backlog)))
// where delay_coeff = residual / (F * delta * sigma) and
// energy_coeff = kappa * delta * sigma * F^2 * residual on the server
// parameters. The interior value does not depend on the split because the
// residual workload cancels between the two coefficients.
double optimal_share(const SlotContext& ctx, int split);

// Exhaustive search over all split points at a fixed share; returns the
// minimizing split and its objective value. Ties break toward the smallest
// split. share == 0 admits only the full-device split.
std::pair<int, double> best_split_given_share(const SlotContext& ctx, double share);

// Alternating per-slot solver: repeat { share from the closed form, split
// from exhaustive search } while both decisions keep changing (share by more
// than 0.01), capped at 100 passes. Converges in at most a few passes since
// the interior share is split-independent.
SolverResult solve_open(const SlotContext& ctx);

// Verification oracle: enumerates every split with its closed-form share
// (plus the share=1 endpoint) and returns the global minimizer.
SolverResult solve_joint_oracle(const SlotContext& ctx);

// fixed_sl: constant (fixed_split, share 1).
// delay_opt: split minimizing delay at share 1.
// energy_opt: split minimizing energy at the share floor.
SolverResult solve_baseline(const SlotContext& ctx, SchedulerKind kind,
                            const BaselineConfig& cfg = {});

// Dispatch on the scheduler kind.
SolverResult solve(const SlotContext& ctx, SchedulerKind kind, const BaselineConfig& cfg = {});

}  // namespace splitsim
