#include "splitsim/channel.hpp"

#include <cmath>

#include "splitsim/errors.hpp"

namespace splitsim {

namespace {
constexpr double kLightSpeed = 3e8;  // m/s
constexpr double kPi = 3.14159265358979323846;
}  // namespace

void RadioLink::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(bandwidth_hz) || !positive(tx_power_w) || !positive(antenna_gain) ||
      !positive(carrier_hz) || !positive(pathloss_exp) || !positive(distance_m) ||
      !positive(noise_psd_w_hz)) {
    throw SimError("radio link has a non-positive parameter");
  }
  if (!(interference_psd_w_hz >= 0.0) || !std::isfinite(interference_psd_w_hz)) {
    throw SimError("radio link interference PSD must be >= 0");
  }
}

double dbm_per_hz_to_w_per_hz(double dbm_per_hz) {
  return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0);
}

double mean_gain(const RadioLink& link) {
  return link.antenna_gain *
         std::pow(kLightSpeed / (4.0 * kPi * link.carrier_hz * link.distance_m),
                  link.pathloss_exp);
}

double draw_gain(const RadioLink& link, Rng& rng) {
  return rng.exponential() * mean_gain(link);
}

ChannelDraw draw(const RadioLink& uplink, const RadioLink& downlink, Rng& rng) {
  ChannelDraw d;
  d.uplink_gain = draw_gain(uplink, rng);
  d.downlink_gain = draw_gain(downlink, rng);
  return d;
}

double rate(const RadioLink& link, double gain) {
  const double snr = link.tx_power_w * gain /
                     ((link.noise_psd_w_hz + link.interference_psd_w_hz) * link.bandwidth_hz);
  return link.bandwidth_hz * std::log2(1.0 + snr);
}

}  // namespace splitsim
