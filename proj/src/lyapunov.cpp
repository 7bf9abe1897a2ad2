#include "splitsim/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "splitsim/errors.hpp"

namespace splitsim {

void PenaltyConfig::validate() const {
  if (!(v > 0.0) || !std::isfinite(v)) throw SimError("penalty weight v must be positive");
  if (!(e_th > 0.0) || !std::isfinite(e_th)) throw SimError("energy threshold must be positive");
}

double objective(const PenaltyConfig& cfg, const QueueState& q, const CostBreakdown& cost) {
  return cfg.v * cost.delay_total + q.backlog * cost.energy_total;
}

QueueState update(const PenaltyConfig& cfg, const QueueState& q, double energy_j) {
  if (!(energy_j >= 0.0)) throw SimError("queue update requires non-negative energy");
  QueueState next;
  next.backlog = std::max(q.backlog + energy_j - cfg.e_th, 0.0);
  next.slot = q.slot + 1;
  return next;
}

double stability_metric(std::span<const double> backlog_trace) {
  if (backlog_trace.empty()) throw SimError("stability_metric: empty trace");
  return backlog_trace.back() / static_cast<double>(backlog_trace.size());
}

}  // namespace splitsim
