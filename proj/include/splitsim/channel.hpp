#pragma once

#include "splitsim/rng.hpp"

namespace splitsim {

// Static parameters of one direction of a radio link. All values are SI
// (Hz, W, m, W/Hz); dBm/Hz figures are converted once at config load.
struct RadioLink {
  double bandwidth_hz = 0.0;
  double tx_power_w = 0.0;
  double antenna_gain = 0.0;
  double carrier_hz = 0.0;
  double pathloss_exp = 0.0;
  double distance_m = 0.0;
  double noise_psd_w_hz = 0.0;
  double interference_psd_w_hz = 0.0;  // the one field allowed to be zero

  // Throws SimError unless every field is positive (interference >= 0).
  void validate() const;
};

// Per-slot channel power gains for the two directions of a device<->server
// exchange.
struct ChannelDraw {
  double uplink_gain = 0.0;
  double downlink_gain = 0.0;
};

// x dBm/Hz -> W/Hz.
double dbm_per_hz_to_w_per_hz(double dbm_per_hz);

// Average channel power gain from free-space path loss:
// antenna_gain * (c / (4*pi*carrier*distance))^pathloss_exp.
double mean_gain(const RadioLink& link);

// One fading realization: mean gain times a unit-mean exponential factor.
// The drawn value is the channel POWER gain and feeds the SNR directly.
double draw_gain(const RadioLink& link, Rng& rng);

// Draws both directions with independent fading factors; uplink first, so
// the consumed stream positions are fixed.
ChannelDraw draw(const RadioLink& uplink, const RadioLink& downlink, Rng& rng);

// Shannon rate in bits/s for a given channel power gain:
// W * log2(1 + P * gain / ((N0 + I) * W)).
double rate(const RadioLink& link, double gain);

}  // namespace splitsim
