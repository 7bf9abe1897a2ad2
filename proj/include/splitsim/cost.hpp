#pragma once

#include <span>
#include <utility>

#include "splitsim/channel.hpp"
#include "splitsim/profile.hpp"

namespace splitsim {

// Compute and radio parameters of one mobile device.
struct DeviceSpec {
  double freq_hz = 0.0;         // processing unit frequency
  double flops_per_cycle = 0.0; // FLOPs retired per cycle per core
  int cores = 0;
  double kappa = 0.0;           // effective switched capacitance, J/(cycle*Hz^2)
  RadioLink uplink;             // carries the device's tx power and bandwidth

  void validate() const;
};

// Compute and radio parameters of the base station + edge server. The
// downlink acts as a template: path loss is always evaluated at the current
// device's distance.
struct ServerSpec {
  double freq_hz = 0.0;
  double flops_per_cycle = 0.0;
  int cores = 0;
  double kappa = 0.0;
  RadioLink downlink;

  void validate() const;
};

// A per-slot scheduling decision: where to cut the model and which fraction
// of the server's capacity to allocate. share == 0 is only meaningful when
// the split leaves no server-side workload.
struct Decision {
  int split = 0;
  double share = 0.0;
};

// Delay (s) and energy (J) components of a single training round.
struct CostBreakdown {
  double d_dev_comp = 0.0;    // device-side model computation
  double d_srv_comp = 0.0;    // server-side model computation
  double d_model_down = 0.0;  // device-side model download
  double d_smashed_up = 0.0;  // smashed-data upload
  double d_grad_down = 0.0;   // activation-gradient download
  double d_model_up = 0.0;    // device-side model upload
  double delay_total = 0.0;   // sum of the six components

  double e_dev_tx = 0.0;    // device transmit energy
  double e_srv_tx = 0.0;    // server transmit energy
  double e_dev_comp = 0.0;  // device computation energy
  double e_srv_comp = 0.0;  // server computation energy
  double energy_total = 0.0;  // sum of the four components
};

// Link throughputs for one slot, bits/s.
struct LinkRates {
  double uplink_bps = 0.0;
  double downlink_bps = 0.0;
};

// Full cost of one training round for the given decision and channel state.
// The downlink rate is evaluated at the device's distance.
//
// Throws SimError when the decision is out of range, when share is zero while
// server-side workload remains, and UnreachableLinkError when a zero-rate
// link must carry data.
CostBreakdown evaluate(const ModelProfile& profile, const DeviceSpec& dev,
                       const ServerSpec& srv, const ChannelDraw& draw,
                       const Decision& dec);

// Same cost model with the link rates supplied directly.
CostBreakdown evaluate_with_rates(const ModelProfile& profile, const DeviceSpec& dev,
                                  const ServerSpec& srv, const LinkRates& rates,
                                  const Decision& dec);

// Arithmetic means of delay_total and energy_total. Throws SimError on an
// empty trace.
std::pair<double, double> average_metrics(std::span<const CostBreakdown> trace);

}  // namespace splitsim
