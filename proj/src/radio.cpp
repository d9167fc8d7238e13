#include "manet/radio.hpp"

#include <numbers>

namespace manet::radio {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double friis_numerator(const RadioParams& p) {
  return p.tx_power * p.tx_gain * p.rx_gain * p.wavelength * p.wavelength;
}

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidRadioParams(std::string(field) + " must be finite and > 0");
  }
}

}  // namespace

void RadioParams::validate() const {
  require_positive(tx_power, "tx_power");
  require_positive(tx_gain, "tx_gain");
  require_positive(rx_gain, "rx_gain");
  require_positive(wavelength, "wavelength");
  require_positive(system_loss, "system_loss");
  require_positive(tx_antenna_height, "tx_antenna_height");
  require_positive(rx_antenna_height, "rx_antenna_height");
  if (system_loss < 1.0) {
    throw InvalidRadioParams("system_loss must be >= 1");
  }
}

double crossover_distance(const RadioParams& params) {
  return kFourPi * params.tx_antenna_height * params.rx_antenna_height / params.wavelength;
}

PowerSample received_power(const RadioParams& params, ChannelMode mode, double distance) {
  if (!(distance > 0.0)) {
    throw NonPositiveDistance("received_power: distance must be > 0");
  }
  if (mode == ChannelMode::TwoRayCrossover && distance > crossover_distance(params)) {
    const double ht = params.tx_antenna_height;
    const double hr = params.rx_antenna_height;
    const double d2 = distance * distance;
    return {params.tx_power * params.tx_gain * params.rx_gain * ht * ht * hr * hr /
            (d2 * d2 * params.system_loss)};
  }
  return {friis_numerator(params) / (kFourPi * kFourPi * distance * distance * params.system_loss)};
}

double estimate_distance_friis(const RadioParams& params, PowerSample sample) {
  if (!(sample.rx_power > 0.0) || !std::isfinite(sample.rx_power)) {
    throw NonPositivePower("estimate_distance_friis: rx_power must be finite and > 0");
  }
  return std::sqrt(friis_numerator(params) /
                   (kFourPi * kFourPi * params.system_loss * sample.rx_power));
}

const char* to_string(ChannelMode mode) {
  return mode == ChannelMode::Friis ? "friis" : "tworay";
}

ChannelMode parse_channel(const std::string& text) {
  if (text == "friis") return ChannelMode::Friis;
  if (text == "tworay") return ChannelMode::TwoRayCrossover;
  throw ConfigError("channel", "expected friis|tworay, got '" + text + "'");
}

}  // namespace manet::radio
