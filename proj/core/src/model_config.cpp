#include "altbd/model_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "altbd/error.hpp"

namespace altbd {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::kConfig, msg); }

double number_of(const json& j, const std::string& what) {
  if (!j.is_number()) config_error(what + " must be a number");
  return j.get<double>();
}

std::int64_t parse_level_key(const std::string& key) {
  std::int64_t v = 0;
  const char* first = key.data();
  const char* last = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) config_error("table key '" + key + "' is not an integer level");
  return v;
}

}  // namespace

RateSpec rate_spec_from_json(const json& j) {
  if (j.is_number()) return RateSpec::constant(j.get<double>());
  if (j.is_string()) return parse_rate_expr(j.get<std::string>());
  if (!j.is_object()) config_error("rate must be a number, string or object");
  if (j.contains("table")) {
    const json& t = j.at("table");
    if (!t.is_object()) config_error("'table' must be an object of level -> value");
    if (!j.contains("tail")) config_error("table rate needs a 'tail'");
    std::map<std::int64_t, double> entries;
    for (const auto& [k, v] : t.items()) entries[parse_level_key(k)] = number_of(v, "table entry " + k);
    return RateSpec::table(std::move(entries), rate_spec_from_json(j.at("tail")));
  }
  if (j.contains("a") || j.contains("b")) {
    const double a = j.contains("a") ? number_of(j.at("a"), "affine 'a'") : 0.0;
    const double b = j.contains("b") ? number_of(j.at("b"), "affine 'b'") : 0.0;
    return RateSpec::affine(a, b);
  }
  config_error("rate object must have 'a'/'b' or 'table'/'tail'");
}

json rate_spec_to_json(const RateSpec& spec) {
  const auto& v = spec.variant();
  if (const auto* c = std::get_if<RateSpec::Constant>(&v)) return c->value;
  if (const auto* f = std::get_if<RateSpec::Affine>(&v)) return json{{"a", f->a}, {"b", f->b}};
  if (const auto* t = std::get_if<RateSpec::Table>(&v)) {
    json entries = json::object();
    for (const auto& [k, val] : t->entries) entries[std::to_string(k)] = val;
    return json{{"table", entries}, {"tail", rate_spec_to_json(*t->tail)}};
  }
  const auto& e = std::get<RateSpec::Expression>(v);
  return e.source;
}

Topology topology_from_json(const json& j) {
  if (j.is_string()) {
    const auto kind = j.get<std::string>();
    if (kind == "one-sided") return Topology::one_sided();
    if (kind == "two-sided") return Topology::two_sided();
    config_error("topology '" + kind + "' needs an object form");
  }
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    config_error("topology must be an object with a string 'kind'");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "one-sided") return Topology::one_sided();
  if (kind == "two-sided") return Topology::two_sided();
  if (kind == "finite") {
    if (!j.contains("n") || !j.at("n").is_number_integer()) config_error("finite topology needs integer 'n'");
    const auto n = j.at("n").get<std::int64_t>();
    if (n < 1) config_error("finite topology needs n >= 1");
    return Topology::finite(n);
  }
  config_error("unknown topology kind '" + kind + "'");
}

json topology_to_json(const Topology& t) {
  switch (t.kind()) {
    case Topology::Kind::kOneSided: return json{{"kind", "one-sided"}};
    case Topology::Kind::kTwoSided: return json{{"kind", "two-sided"}};
    case Topology::Kind::kFinite: return json{{"kind", "finite"}, {"n", t.max_level()}};
  }
  return {};
}

RateSet rate_set_from_json(const json& j) {
  if (!j.is_object()) config_error("model config must be a JSON object");
  if (!j.contains("topology")) config_error("model config needs 'topology'");
  if (!j.contains("rates") || !j.at("rates").is_object()) config_error("model config needs a 'rates' object");
  const Topology topology = topology_from_json(j.at("topology"));
  bool allow_zeros = false;
  if (j.contains("allow_zeros")) {
    if (!j.at("allow_zeros").is_boolean()) config_error("'allow_zeros' must be a boolean");
    allow_zeros = j.at("allow_zeros").get<bool>();
  }
  const json& r = j.at("rates");
  for (const auto& [k, v] : r.items()) {
    bool known = false;
    for (RateKind kind : kAllRateKinds) known = known || k == to_string(kind);
    if (!known) config_error("unknown rate '" + k + "'");
  }
  const auto get = [&](RateKind kind) {
    const std::string name(to_string(kind));
    if (!r.contains(name)) config_error("missing rate '" + name + "'");
    return rate_spec_from_json(r.at(name));
  };
  RateSet::Specs specs{get(RateKind::kLambda), get(RateKind::kMu),    get(RateKind::kDelta),
                       get(RateKind::kBeta),   get(RateKind::kKappa), get(RateKind::kNu)};
  return RateSet(std::move(specs), topology, allow_zeros);
}

json rate_set_to_json(const RateSet& rates) {
  json r = json::object();
  for (RateKind kind : kAllRateKinds) r[std::string(to_string(kind))] = rate_spec_to_json(rates.spec(kind));
  return json{{"topology", topology_to_json(rates.topology())}, {"allow_zeros", rates.allow_zeros()}, {"rates", r}};
}

RateSet parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte == 0 ? 0 : e.byte - 1, {"JSON value"}, e.what());
  }
  return rate_set_from_json(j);
}

RateSet load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open model file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

}  // namespace altbd
