#include "splitsim/cost.hpp"

#include <cmath>
#include <string>

#include "splitsim/errors.hpp"

namespace splitsim {

void DeviceSpec::validate() const {
  if (!(freq_hz > 0.0) || !(flops_per_cycle > 0.0) || cores < 1 || !(kappa > 0.0)) {
    throw SimError("device spec has a non-positive parameter");
  }
  uplink.validate();
}

void ServerSpec::validate() const {
  if (!(freq_hz > 0.0) || !(flops_per_cycle > 0.0) || cores < 1 || !(kappa > 0.0)) {
    throw SimError("server spec has a non-positive parameter");
  }
  downlink.validate();
}

CostBreakdown evaluate(const ModelProfile& profile, const DeviceSpec& dev,
                       const ServerSpec& srv, const ChannelDraw& draw,
                       const Decision& dec) {
  // Downlink path loss is determined by where the device actually is.
  RadioLink downlink = srv.downlink;
  downlink.distance_m = dev.uplink.distance_m;
  const LinkRates rates{rate(dev.uplink, draw.uplink_gain),
                        rate(downlink, draw.downlink_gain)};
  return evaluate_with_rates(profile, dev, srv, rates, dec);
}

CostBreakdown evaluate_with_rates(const ModelProfile& profile, const DeviceSpec& dev,
                                  const ServerSpec& srv, const LinkRates& rates,
                                  const Decision& dec) {
  if (dec.split < 1 || dec.split > profile.split_count()) {
    throw SimError("decision split " + std::to_string(dec.split) + " out of range");
  }
  if (!(dec.share >= 0.0) || dec.share > 1.0) {
    throw SimError("decision share must lie in [0, 1]");
  }

  const double device_work = profile.device_flops(dec.split);
  const double server_work = profile.total_flops() - device_work;
  if (dec.share == 0.0 && server_work > 0.0) {
    throw SimError("share 0 is only valid when the full model runs on the device");
  }

  const double uplink_rate = rates.uplink_bps;
  const double downlink_rate = rates.downlink_bps;

  const double bits_per_param = profile.bytes_per_param() * 8.0;
  const double model_bits = static_cast<double>(profile.device_params(dec.split)) * bits_per_param;
  const double smashed_bits = static_cast<double>(profile.smashed_size(dec.split)) * bits_per_param;
  const double gradient_bits = static_cast<double>(profile.gradient_size(dec.split)) * bits_per_param;

  auto transfer = [](double bits, double link_rate, const char* what) {
    if (bits == 0.0) return 0.0;
    if (!(link_rate > 0.0)) {
      throw UnreachableLinkError(std::string("unreachable link: zero rate while sending ") + what);
    }
    return bits / link_rate;
  };

  CostBreakdown c;
  c.d_dev_comp = device_work / (dev.freq_hz * dev.flops_per_cycle * dev.cores);
  c.d_srv_comp = server_work == 0.0
                     ? 0.0
                     : server_work / (dec.share * srv.freq_hz * srv.flops_per_cycle * srv.cores);
  c.d_model_down = transfer(model_bits, downlink_rate, "device-side model (down)");
  c.d_smashed_up = transfer(smashed_bits, uplink_rate, "smashed data (up)");
  c.d_grad_down = transfer(gradient_bits, downlink_rate, "activation gradient (down)");
  c.d_model_up = transfer(model_bits, uplink_rate, "device-side model (up)");
  c.delay_total = c.d_dev_comp + c.d_srv_comp + c.d_model_down + c.d_smashed_up +
                  c.d_grad_down + c.d_model_up;

  c.e_dev_tx = dev.uplink.tx_power_w * (c.d_smashed_up + c.d_model_up);
  c.e_srv_tx = srv.downlink.tx_power_w * (c.d_model_down + c.d_grad_down);
  c.e_dev_comp = dev.kappa * dev.flops_per_cycle * dev.cores * dev.freq_hz * dev.freq_hz * device_work;
  c.e_srv_comp = srv.kappa * dec.share * srv.flops_per_cycle * srv.cores * srv.freq_hz *
                 srv.freq_hz * server_work;
  c.energy_total = c.e_dev_tx + c.e_srv_tx + c.e_dev_comp + c.e_srv_comp;
  return c;
}

std::pair<double, double> average_metrics(std::span<const CostBreakdown> trace) {
  if (trace.empty()) throw SimError("average_metrics: empty trace");
  double delay_sum = 0.0;
  double energy_sum = 0.0;
  for (const CostBreakdown& c : trace) {
    delay_sum += c.delay_total;
    energy_sum += c.energy_total;
  }
  const double n = static_cast<double>(trace.size());
  return {delay_sum / n, energy_sum / n};
}

}  // namespace splitsim
