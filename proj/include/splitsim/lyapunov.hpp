#pragma once

#include <cstdint>
#include <span>

#include "splitsim/cost.hpp"

namespace splitsim {

// Scalar energy-deficit backlog. Starts at zero and accumulates per-slot
// energy overshoot above the threshold, clamped at zero.
struct QueueState {
  double backlog = 0.0;  // joules
  std::int64_t slot = 0;
};

// Trade-off weight and long-term energy budget of the per-slot objective.
struct PenaltyConfig {
  double v = 0.0;     // weight on delay; > 0
  double e_th = 0.0;  // per-slot energy threshold, joules; > 0

  void validate() const;
};

// Per-slot objective: v * delay + backlog * energy.
double objective(const PenaltyConfig& cfg, const QueueState& q, const CostBreakdown& cost);

// Backlog transition: max(backlog + energy - e_th, 0), slot advanced by one.
QueueState update(const PenaltyConfig& cfg, const QueueState& q, double energy_j);

// Final backlog divided by the number of slots: the empirical stability
// ratio of a completed run. The trace must be non-empty.
double stability_metric(std::span<const double> backlog_trace);

}  // namespace splitsim
