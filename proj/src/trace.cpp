#include "manet/trace.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace manet::trace {

std::string format_time(double seconds) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), seconds,
                                 std::chars_format::fixed, 9);
  return std::string(buf.data(), ptr);
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_quantification_csv(std::ostream& out, std::span<const distance::DistanceRecord> records) {
  out << kQuantificationHeader << '\n';
  for (const auto& r : records) {
    out << r.rreq_source << ',' << r.rreq_dest << ',' << format_time(r.time) << ','
        << format_number(r.distance) << ',' << format_number(r.rssi_distance) << '\n';
  }
}

void write_mobility_csv(std::ostream& out, std::span<const mobility::MobilitySample> samples,
                        std::optional<double> agitation_threshold) {
  out << kMobilityHeader << (agitation_threshold ? ",state" : "") << '\n';
  std::vector<mobility::Agitation> labels;
  if (agitation_threshold) labels = mobility::label_agitation(samples, *agitation_threshold);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << format_time(samples[i].time) << ',' << format_number(samples[i].avg_distance);
    if (agitation_threshold) {
      out << ',' << (labels[i] == mobility::Agitation::Agitated ? "agitated" : "stable");
    }
    out << '\n';
  }
}

void write_series_csv(std::ostream& out, std::span<const mobility::NeighborSeries> series) {
  out << kSeriesHeader << '\n';
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      out << s.observer << ',' << s.neighbor << ',' << format_time(p.time) << ','
          << format_number(p.distance) << ',' << format_number(p.rssi_distance) << '\n';
    }
  }
}

void write_summary(std::ostream& out, const sim::Summary& s) {
  out << "events = " << s.events << '\n'
      << "rreq_originated = " << s.rreq_originated << '\n'
      << "rreq_accepted = " << s.rreq_accepted << '\n'
      << "rreq_rebroadcast = " << s.rreq_rebroadcast << '\n'
      << "rreq_duplicates = " << s.rreq_duplicates << '\n'
      << "rrep_sent = " << s.rrep_sent << '\n'
      << "rrep_delivered = " << s.rrep_delivered << '\n'
      << "rerr_sent = " << s.rerr_sent << '\n'
      << "hello_sent = " << s.hello_sent << '\n'
      << "table_broadcasts = " << s.table_broadcasts << '\n'
      << "gpsfree_refreshes = " << s.gpsfree_refreshes << '\n'
      << "gpsfree_no_reference = " << s.gpsfree_no_reference << '\n'
      << "data_sent = " << s.data_sent << '\n'
      << "data_delivered = " << s.data_delivered << '\n'
      << "data_dropped = " << s.data_dropped << '\n'
      << "link_failures = " << s.link_failures << '\n'
      << "unreachable = " << s.unreachable << '\n'
      << "frames_lost = " << s.frames_lost << '\n';
}

namespace {

template <typename T>
T parse_field(const std::string& text, int line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error("quantification CSV line " + std::to_string(line_no) + ": bad field '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<distance::DistanceRecord> read_quantification_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kQuantificationHeader) {
    throw Error("quantification CSV: unexpected header");
  }
  std::vector<distance::DistanceRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw Error("quantification CSV line " + std::to_string(line_no) + ": expected 5 fields");
    }
    records.push_back({parse_field<NodeId>(fields[0], line_no), parse_field<NodeId>(fields[1], line_no),
                       parse_field<double>(fields[2], line_no), parse_field<double>(fields[3], line_no),
                       parse_field<double>(fields[4], line_no)});
  }
  return records;
}

void write_bundle(const std::string& directory, const sim::TraceBundle& bundle,
                  const sim::Scenario& scenario) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };

  {
    auto f = open("quantification.csv");
    write_quantification_csv(f, bundle.records);
  }
  {
    auto f = open("mobility.csv");
    write_mobility_csv(f, bundle.mobility, scenario.agitation_threshold);
  }
  {
    std::vector<mobility::NeighborSeries> all;
    for (NodeId n = 0; n < scenario.node_count; ++n) {
      for (auto& s : mobility::node_series(bundle.records, n, 0.0, scenario.duration)) {
        all.push_back(std::move(s));
      }
    }
    auto f = open("series.csv");
    write_series_csv(f, all);
  }
  {
    auto f = open("protocol.log");
    for (const auto& l : bundle.protocol_log) f << l << '\n';
  }
  {
    auto f = open("summary.txt");
    write_summary(f, bundle.summary);
  }
}

}  // namespace manet::trace
