#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "altbd/regularity.hpp"
#include "altbd/series.hpp"
#include "altbd/simulate.hpp"
#include "altbd/stationary.hpp"

namespace altbd {

// CSV outputs are ordered by level ascending, phase b before d, use '.' as the
// decimal separator and LF line endings. Numbers are written in the shortest
// form that reads back to the same double.

std::string format_double(double v);

std::string weights_to_csv(const WeightTable& w);              // n,phase,log_weight
std::string distribution_to_csv(const StationaryDistribution& d);  // n,phase,probability

struct CsvRow {
  Level n = 0;
  Phase phase = Phase::B;
  double value = 0.0;
};

/// Reads either CSV layout back. Throws ParseError with a byte offset.
std::vector<CsvRow> parse_state_csv(const std::string& text);

std::string reuter_trace_to_csv(const std::vector<ReuterIterate>& iterates);  // n,y_b,y_d,D,E
std::string event_trace_to_csv(const std::vector<TraceEvent>& trace);         // t,level,phase

nlohmann::json to_json(const WeightTable& w);
nlohmann::json to_json(const StationaryDistribution& d);
nlohmann::json to_json(const TailCertificate& c);
nlohmann::json to_json(const SeriesEvidence& e);
nlohmann::json to_json(const ErgodicityVerdict& v);
nlohmann::json to_json(const RegularityVerdict& v);
nlohmann::json to_json(const std::vector<ReuterIterate>& iterates);
nlohmann::json to_json(const OccupancyReport& r, bool include_trace = false);

}  // namespace altbd
