#include "manet/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace manet::sim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(trim(part));
  return parts;
}

// List values may be separated by commas or whitespace.
std::vector<std::string> list_items(const std::string& s) {
  std::string normalized = s;
  for (char& c : normalized) {
    if (c == ',') c = ' ';
  }
  std::vector<std::string> items;
  std::istringstream in(normalized);
  std::string item;
  while (in >> item) items.push_back(item);
  return items;
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return value;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

unsigned to_unsigned(const std::string& key, const std::string& text) {
  const std::uint64_t v = to_u64(key, text);
  if (v > 0xFFFFFFFFu) throw ConfigError(key, "value out of range");
  return static_cast<unsigned>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected true|false, got '" + text + "'");
}

Vec2 to_point(const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError(key, "expected x:y, got '" + text + "'");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

TrafficFlow parse_traffic(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4) {
    throw ConfigError("traffic", "expected src:dst:start:interval, got '" + text + "'");
  }
  return {to_unsigned("traffic", parts[0]), to_unsigned("traffic", parts[1]),
          to_double("traffic", parts[2]), to_double("traffic", parts[3])};
}

Area parse_area(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ConfigError("area", "expected WxH, got '" + text + "'");
  return {to_double("area", trim(text.substr(0, x))), to_double("area", trim(text.substr(x + 1)))};
}

void apply_setting(Scenario& s, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "area") {
    s.area = parse_area(value);
  } else if (key == "node_count") {
    s.node_count = to_unsigned(key, value);
  } else if (key == "duration") {
    s.duration = to_double(key, value);
  } else if (key == "speed_min") {
    s.speed_min = to_double(key, value);
  } else if (key == "speed_max") {
    s.speed_max = to_double(key, value);
  } else if (key == "radio_range") {
    s.radio_range = to_double(key, value);
  } else if (key == "channel") {
    s.channel = radio::parse_channel(value);
  } else if (key == "mode") {
    s.mode = distance::parse_mode(value);
  } else if (key == "seed") {
    s.seed = to_u64(key, value);
  } else if (key == "traffic") {
    for (const auto& item : list_items(value)) s.traffic.push_back(parse_traffic(item));
  } else if (key == "tx_power") {
    s.radio.tx_power = to_double(key, value);
  } else if (key == "tx_gain") {
    s.radio.tx_gain = to_double(key, value);
  } else if (key == "rx_gain") {
    s.radio.rx_gain = to_double(key, value);
  } else if (key == "wavelength") {
    s.radio.wavelength = to_double(key, value);
  } else if (key == "system_loss") {
    s.radio.system_loss = to_double(key, value);
  } else if (key == "tx_antenna_height") {
    s.radio.tx_antenna_height = to_double(key, value);
  } else if (key == "rx_antenna_height") {
    s.radio.rx_antenna_height = to_double(key, value);
  } else if (key == "hello_interval") {
    s.aodv.hello_interval = to_double(key, value);
  } else if (key == "active_route_timeout") {
    s.aodv.active_route_timeout = to_double(key, value);
  } else if (key == "rreq_retries") {
    s.aodv.rreq_retries = to_unsigned(key, value);
  } else if (key == "net_traversal_time") {
    s.aodv.net_traversal_time = to_double(key, value);
  } else if (key == "path_discovery_time") {
    s.aodv.path_discovery_time = to_double(key, value);
  } else if (key == "intermediate_replies") {
    s.aodv.intermediate_replies = to_bool(key, value);
  } else if (key == "hop_latency") {
    s.hop_latency = to_double(key, value);
  } else if (key == "jitter") {
    s.jitter = to_double(key, value);
  } else if (key == "rssi_noise_sigma_db") {
    s.rssi_noise_sigma_db = to_double(key, value);
  } else if (key == "noise_seed") {
    s.noise_seed = to_u64(key, value);
  } else if (key == "sample_interval") {
    s.sample_interval = to_double(key, value);
  } else if (key == "avg_in_range") {
    s.avg_in_range = to_bool(key, value);
  } else if (key == "agitation_threshold") {
    s.agitation_threshold = to_double(key, value);
  } else if (key == "positions") {
    for (const auto& item : list_items(value)) s.positions.push_back(to_point(key, item));
  } else if (key == "waypoints") {
    for (const auto& item : list_items(value)) s.waypoints.push_back(to_point(key, item));
  } else if (key == "speeds") {
    for (const auto& item : list_items(value)) s.speeds.push_back(to_double(key, item));
  } else if (key == "failures") {
    for (const auto& item : list_items(value)) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ConfigError(key, "expected node:time, got '" + item + "'");
      s.failures.push_back({to_unsigned(key, parts[0]), to_double(key, parts[1])});
    }
  } else {
    throw ConfigError(key, "unknown scenario key");
  }
}

Scenario parse_scenario(std::istream& in, Scenario base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

Scenario load_scenario_file(const std::string& path, Scenario base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path + "'");
  return parse_scenario(in, std::move(base));
}

void Scenario::validate() const {
  require(area.width > 0.0 && area.height > 0.0, "area", "width and height must be > 0");
  require(node_count >= 2, "node_count", "must be >= 2");
  require(duration > 0.0, "duration", "must be > 0");
  require(speed_min >= 0.0, "speed_min", "must be >= 0");
  require(speed_min <= speed_max, "speed_max", "must be >= speed_min");
  require(radio_range > 0.0, "radio_range", "must be > 0");
  try {
    radio.validate();
  } catch (const InvalidRadioParams& e) {
    throw ConfigError("radio", e.what());
  }
  require(aodv.hello_interval > 0.0, "hello_interval", "must be > 0");
  require(aodv.active_route_timeout > 0.0, "active_route_timeout", "must be > 0");
  require(aodv.net_traversal_time > 0.0, "net_traversal_time", "must be > 0");
  require(aodv.path_discovery_time > 0.0, "path_discovery_time", "must be > 0");
  require(hop_latency > 0.0, "hop_latency", "must be > 0");
  require(jitter >= 0.0, "jitter", "must be >= 0");
  require(rssi_noise_sigma_db >= 0.0, "rssi_noise_sigma_db", "must be >= 0");
  require(sample_interval > 0.0, "sample_interval", "must be > 0");
  for (const auto& f : traffic) {
    require(f.source < node_count && f.dest < node_count, "traffic", "node id out of range");
    require(f.source != f.dest, "traffic", "source and destination must differ");
    require(f.start >= 0.0, "traffic", "start must be >= 0");
    require(f.interval > 0.0, "traffic", "interval must be > 0");
  }
  require(positions.empty() || positions.size() == node_count, "positions",
          "need exactly node_count entries");
  require(waypoints.empty() || waypoints.size() == node_count, "waypoints",
          "need exactly node_count entries");
  require(speeds.empty() || speeds.size() == node_count, "speeds",
          "need exactly node_count entries");
  for (const auto& p : positions) require(area.contains(p), "positions", "outside the area");
  for (const auto& p : waypoints) require(area.contains(p), "waypoints", "outside the area");
  for (double v : speeds) require(v >= 0.0, "speeds", "must be >= 0");
  for (const auto& f : failures) {
    require(f.node < node_count, "failures", "node id out of range");
    require(f.time >= 0.0, "failures", "time must be >= 0");
  }
}

}  // namespace manet::sim
