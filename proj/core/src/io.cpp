#include "altbd/io.hpp"

#include <charconv>
#include <cmath>

#include "altbd/error.hpp"
#include "altbd/model_config.hpp"

namespace altbd {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

// JSON has no infinities; they are written as strings.
json number_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

std::string state_csv(Level n_min, Level n_max, const char* column, const auto& value) {
  std::string out = std::string("n,phase,") + column + "\n";
  for (Level n = n_min; n <= n_max; ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      out += std::to_string(n);
      out += ',';
      out += to_string(p);
      out += ',';
      out += format_double(value(n, p));
      out += '\n';
    }
  }
  return out;
}

}  // namespace

std::string weights_to_csv(const WeightTable& w) {
  return state_csv(w.n_min(), w.n_max(), "log_weight", [&](Level n, Phase p) { return w.log_weight(n, p); });
}

std::string distribution_to_csv(const StationaryDistribution& d) {
  return state_csv(d.n_min, d.n_max, "probability", [&](Level n, Phase p) { return d.probability(n, p); });
}

std::vector<CsvRow> parse_state_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) throw ParseError(0, {"header line"}, "missing CSV header");
  const std::string header = text.substr(0, pos);
  if (header != "n,phase,log_weight" && header != "n,phase,probability") {
    throw ParseError(0, {"n,phase,log_weight", "n,phase,probability"}, "unexpected CSV header");
  }
  ++pos;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::size_t stop = end == std::string::npos ? text.size() : end;
    const char* line = text.data() + pos;
    const char* last = text.data() + stop;
    CsvRow row;
    auto r1 = std::from_chars(line, last, row.n);
    if (r1.ec != std::errc() || r1.ptr == last || *r1.ptr != ',') {
      throw ParseError(static_cast<std::size_t>(r1.ptr - text.data()), {"integer level", ","}, "bad level field");
    }
    const char* ph = r1.ptr + 1;
    if (ph + 1 >= last || (ph[0] != 'b' && ph[0] != 'd') || ph[1] != ',') {
      throw ParseError(static_cast<std::size_t>(ph - text.data()), {"b", "d"}, "bad phase field");
    }
    row.phase = ph[0] == 'b' ? Phase::B : Phase::D;
    const char* vstart = ph + 2;
    auto r2 = std::from_chars(vstart, last, row.value);
    if (r2.ec != std::errc() || r2.ptr != last) {
      throw ParseError(static_cast<std::size_t>(vstart - text.data()), {"number"}, "bad value field");
    }
    rows.push_back(row);
    pos = stop + 1;
  }
  return rows;
}

std::string reuter_trace_to_csv(const std::vector<ReuterIterate>& iterates) {
  std::string out = "n,y_b,y_d,D,E\n";
  for (const auto& it : iterates) {
    out += std::to_string(it.n) + ',' + format_double(it.y_b) + ',' + format_double(it.y_d) + ',' +
           format_double(it.D) + ',' + format_double(it.E) + '\n';
  }
  return out;
}

std::string event_trace_to_csv(const std::vector<TraceEvent>& trace) {
  std::string out = "t,level,phase\n";
  for (const auto& e : trace) {
    out += format_double(e.time) + ',' + std::to_string(e.state.level) + ',' + std::string(to_string(e.state.phase)) +
           '\n';
  }
  return out;
}

json to_json(const WeightTable& w) {
  json states = json::array();
  for (Level n = w.n_min(); n <= w.n_max(); ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      states.push_back({{"n", n}, {"phase", to_string(p)}, {"log_weight", number_json(w.log_weight(n, p))}});
    }
  }
  return {{"topology", topology_to_json(w.topology())},
          {"n_min", w.n_min()},
          {"n_max", w.n_max()},
          {"reference", w.reference() == WeightReference::kZeroD ? "x(0,d)=1" : "x(0,b)=1"},
          {"weights", states}};
}

json to_json(const StationaryDistribution& d) {
  json states = json::array();
  for (Level n = d.n_min; n <= d.n_max; ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      states.push_back({{"n", n}, {"phase", to_string(p)}, {"probability", d.probability(n, p)}});
    }
  }
  return {{"topology", topology_to_json(d.topology)},
          {"n_min", d.n_min},
          {"n_max", d.n_max},
          {"log_normalizer", number_json(d.log_normalizer)},
          {"tail_error", d.tail_error},
          {"probabilities", states}};
}

json to_json(const TailCertificate& c) {
  return {{"n0", c.n0}, {"rho_bar", c.rho_bar}, {"side", to_string(c.side)}};
}

json to_json(const SeriesEvidence& e) {
  json j = {{"label", e.label},
            {"result", to_string(e.result)},
            {"branch", to_string(e.branch)},
            {"w0", e.w0},
            {"w1", e.w1},
            {"last", e.last},
            {"truncated", e.truncated},
            {"sup_ratio", number_json(e.sup_ratio)},
            {"inf_ratio", number_json(e.inf_ratio)},
            {"ratio_threshold", e.ratio_threshold},
            {"min_relative_term", number_json(e.min_relative_term)},
            {"bdm_min", number_json(e.bdm_min)},
            {"bdm_max", number_json(e.bdm_max)},
            {"log_terms", numbers_json(e.log_terms)},
            {"log_partial_sums", numbers_json(e.log_partial_sums)},
            {"bdm", numbers_json(e.bdm)}};
  if (e.truncated) j["truncation_reason"] = e.truncation_reason;
  return j;
}

json to_json(const ErgodicityVerdict& v) {
  json sides = json::array();
  for (const auto& s : v.sides) sides.push_back(to_json(s));
  json certs = json::array();
  for (const auto& c : v.certificates) certs.push_back(to_json(c));
  json j = {{"verdict", to_string(v.verdict)}, {"window", {v.w0, v.w1}}, {"series", sides}, {"certificates", certs}};
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const std::vector<ReuterIterate>& iterates) {
  json a = json::array();
  for (const auto& it : iterates) {
    a.push_back({{"n", it.n},
                 {"y_b", number_json(it.y_b)},
                 {"y_d", number_json(it.y_d)},
                 {"D", number_json(it.D)},
                 {"E", number_json(it.E)}});
  }
  return a;
}

json to_json(const RegularityVerdict& v) {
  json series = json::array();
  for (const auto& s : v.series) series.push_back(to_json(s));
  json j = {{"verdict", to_string(v.verdict)}, {"series", series}, {"trace_length", v.trace_length}};
  if (v.bounds) {
    j["bounds"] = {{"log_lower", number_json(v.bounds->log_lower)}, {"log_upper", number_json(v.bounds->log_upper)}};
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json to_json(const OccupancyReport& r, bool include_trace) {
  json occ = json::array();
  for (std::size_t i = 0; i < r.occupancy_b.size(); ++i) {
    const Level n = r.n_min + static_cast<Level>(i);
    for (Phase p : {Phase::B, Phase::D}) {
      const double v = r.occupancy(n, p);
      if (v > 0.0) occ.push_back({{"n", n}, {"phase", to_string(p)}, {"time", v}});
    }
  }
  json j = {{"seed", r.seed},
            {"rng", r.rng},
            {"events", r.events},
            {"total_time", r.total_time},
            {"termination", to_string(r.termination)},
            {"final_state", {{"n", r.final_state.level}, {"phase", to_string(r.final_state.phase)}}},
            {"occupancy", occ}};
  if (include_trace) {
    json t = json::array();
    for (const auto& e : r.trace) t.push_back({e.time, e.state.level, to_string(e.state.phase)});
    j["trace"] = t;
  }
  return j;
}

}  // namespace altbd
