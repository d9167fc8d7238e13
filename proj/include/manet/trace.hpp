#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manet/engine.hpp"

namespace manet::trace {

/// Seconds with nine decimals.
std::string format_time(double seconds);
/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

inline constexpr const char* kQuantificationHeader =
    "rreq_source,rreq_dest,time_s,distance_m,rssi_distance_m";
inline constexpr const char* kMobilityHeader = "time_s,avg_distance_m";
inline constexpr const char* kSeriesHeader = "observer,neighbor,time_s,distance_m,rssi_distance_m";

void write_quantification_csv(std::ostream& out, std::span<const distance::DistanceRecord> records);
/// Adds a `state` column (stable|agitated) when a threshold is given.
void write_mobility_csv(std::ostream& out, std::span<const mobility::MobilitySample> samples,
                        std::optional<double> agitation_threshold = std::nullopt);
void write_series_csv(std::ostream& out, std::span<const mobility::NeighborSeries> series);
void write_summary(std::ostream& out, const sim::Summary& summary);

/// Parses a quantification CSV. Throws Error on a bad header or row.
std::vector<distance::DistanceRecord> read_quantification_csv(std::istream& in);

/// Writes quantification.csv, mobility.csv, series.csv, protocol.log and
/// summary.txt into `directory`, creating it if needed.
void write_bundle(const std::string& directory, const sim::TraceBundle& bundle,
                  const sim::Scenario& scenario);

}  // namespace manet::trace
