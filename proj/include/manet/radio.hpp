#pragma once

#include "manet/types.hpp"

namespace manet::radio {

/// Link-budget parameters. Powers in watts, lengths in meters, gains and
/// loss as linear ratios. Antenna heights only matter for the two-ray channel.
struct RadioParams {
  double tx_power{0.28183815};
  double tx_gain{1.0};
  double rx_gain{1.0};
  double wavelength{0.328227};  // 914 MHz with c = 3e8
  double system_loss{1.0};
  double tx_antenna_height{1.5};
  double rx_antenna_height{1.5};

  /// Throws InvalidRadioParams naming the first bad field.
  void validate() const;
};

enum class ChannelMode { Friis, TwoRayCrossover };

struct PowerSample {
  double rx_power{0.0};  // watts
};

double crossover_distance(const RadioParams& params);

PowerSample received_power(const RadioParams& params, ChannelMode mode, double distance);

// Inverts the free-space formula whatever channel produced the sample, so a
// two-ray reading beyond the crossover comes back as d^2 / d_c.
double estimate_distance_friis(const RadioParams& params, PowerSample sample);

const char* to_string(ChannelMode mode);
ChannelMode parse_channel(const std::string& text);

}  // namespace manet::radio
