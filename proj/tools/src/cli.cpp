#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "altbd/error.hpp"
#include "altbd/io.hpp"
#include "altbd/model_config.hpp"
#include "altbd/presets.hpp"
#include "altbd/regularity.hpp"
#include "altbd/simulate.hpp"
#include "altbd/stationary.hpp"

namespace altbd::cli {

namespace {

using nlohmann::json;

struct ModelFlags {
  std::string model_path;
  std::string preset;
  std::vector<std::string> params;
};

struct LoadedModel {
  RateSet rates;
  std::vector<TailCertificate> certificates;
};

struct Options {
  ModelFlags model;
  std::optional<Level> nmax;
  std::optional<Level> nmin;
  std::optional<Level> tail_n0;
  std::optional<double> tail_rho;
  std::string format = "json";
  std::string out_path;
  std::string window = "16,4096";
  Level steps = 200;
  std::uint64_t seed = 0;
  std::int64_t events = 1000000;
  double time = 1e300;
  Level guard = 1000000;
  std::size_t replications = 1;
  bool compare_analytic = false;
  std::string preset_name;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LoadedModel load(const ModelFlags& f) {
  if (f.model_path.empty() == f.preset.empty()) throw UsageError("exactly one of --model or --preset is required");
  if (!f.model_path.empty()) {
    if (!f.params.empty()) throw UsageError("--param applies to --preset only");
    return {load_model(f.model_path), {}};
  }
  auto inst = make_preset(f.preset, parse_params(f.params));
  return {std::move(inst.rates), std::move(inst.certificates)};
}

std::pair<Level, Level> level_range(const Options& o, const Topology& topo) {
  switch (topo.kind()) {
    case Topology::Kind::kFinite: return {0, topo.max_level()};
    case Topology::Kind::kOneSided:
      if (!o.nmax) throw UsageError("--nmax is required for infinite state spaces");
      return {0, *o.nmax};
    case Topology::Kind::kTwoSided:
      if (!o.nmax) throw UsageError("--nmax is required for infinite state spaces");
      return {o.nmin.value_or(-*o.nmax), *o.nmax};
  }
  return {0, 0};
}

std::pair<Level, Level> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--window expects W0,W1");
  try {
    return {std::stoll(text.substr(0, comma)), std::stoll(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw UsageError("--window expects two integers W0,W1");
  }
}

// Certificates used to normalize an infinite chain: explicit flags, then the
// preset's own, then whatever the ergodicity ladder can certify.
std::vector<TailCertificate> certificates_for(const Options& o, const LoadedModel& m, std::ostream& err) {
  const auto& topo = m.rates.topology();
  if (!topo.is_infinite()) return {};
  if (o.tail_n0.has_value() != o.tail_rho.has_value()) throw UsageError("--tail-n0 and --tail-rho go together");
  if (o.tail_n0) {
    std::vector<TailCertificate> c{{*o.tail_n0, *o.tail_rho, TailSide::kPositive}};
    if (topo.kind() == Topology::Kind::kTwoSided) c.push_back({*o.tail_n0, *o.tail_rho, TailSide::kNegative});
    return c;
  }
  if (!m.certificates.empty()) return m.certificates;
  const auto v = ergodicity(m.rates);
  if (v.verdict == ErgodicityVerdict::Kind::kErgodic && !v.certificates.empty()) {
    const std::size_t sides = topo.kind() == Topology::Kind::kTwoSided ? 2 : 1;
    if (v.certificates.size() == sides) return v.certificates;
  }
  err << "note: no geometric tail certificate available (" << to_string(v.verdict) << ")\n";
  return {};
}

void emit(const Options& o, const std::string& body, std::ostream& out) {
  if (o.out_path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kConfig, "cannot open " + o.out_path + " for writing");
  f << body;
}

void require_format(const Options& o) {
  if (o.format != "json" && o.format != "csv") throw UsageError("--format must be csv or json");
}

int cmd_stationary(const Options& o, std::ostream& out, std::ostream& err) {
  require_format(o);
  const auto m = load(o.model);
  const auto [lo, hi] = level_range(o, m.rates.topology());
  const auto w = closed_form_weights(m.rates, lo, hi);
  const auto certs = certificates_for(o, m, err);
  const bool normalizable = !m.rates.topology().is_infinite() || !certs.empty();
  if (!normalizable) {
    err << "note: writing unnormalized log-weights\n";
    emit(o, o.format == "csv" ? weights_to_csv(w) : to_json(w).dump(2) + "\n", out);
    return kOk;
  }
  const auto d = normalize(w, certs);
  emit(o, o.format == "csv" ? distribution_to_csv(d) : to_json(d).dump(2) + "\n", out);
  return kOk;
}

int cmd_ergodicity(const Options& o, std::ostream& out, std::ostream&) {
  const auto m = load(o.model);
  const auto [w0, w1] = parse_window(o.window);
  const auto v = ergodicity(m.rates, w0, w1);
  emit(o, to_json(v).dump(2) + "\n", out);
  switch (v.verdict) {
    case ErgodicityVerdict::Kind::kErgodic: return kOk;
    case ErgodicityVerdict::Kind::kNotErgodic: return kNegative;
    case ErgodicityVerdict::Kind::kInconclusive: return kInconclusive;
  }
  return kInconclusive;
}

int cmd_regularity(const Options& o, std::ostream& out, std::ostream&) {
  const auto m = load(o.model);
  const auto [w0, w1] = parse_window(o.window);
  const auto v = regularity(m.rates, w0, w1, o.steps);
  if (o.format == "csv") {
    if (m.rates.topology().kind() != Topology::Kind::kOneSided) {
      throw UsageError("--format csv (Reuter trace) is available for one-sided chains only");
    }
    emit(o, reuter_trace_to_csv(reuter_recursion_one_sided(m.rates, o.steps).iterates), out);
  } else {
    require_format(o);
    emit(o, to_json(v).dump(2) + "\n", out);
  }
  switch (v.verdict) {
    case RegularityVerdict::Kind::kNonExplosive: return kOk;
    case RegularityVerdict::Kind::kExplosive: return kNegative;
    case RegularityVerdict::Kind::kInconclusive: return kInconclusive;
  }
  return kInconclusive;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const auto m = load(o.model);
  if (o.replications == 0) throw UsageError("--replications must be positive");
  SimConfig cfg;
  cfg.seed = o.seed;
  cfg.max_events = o.events;
  cfg.max_time = o.time;
  cfg.level_guard = o.guard;
  const auto reports = o.replications == 1 ? std::vector<OccupancyReport>{simulate_path(m.rates, cfg)}
                                           : simulate_replications(m.rates, cfg, o.replications);

  std::optional<StationaryDistribution> analytic;
  if (o.compare_analytic) {
    Level lo = 0;
    Level hi = 0;
    for (const auto& r : reports) {
      lo = std::min(lo, r.n_min);
      hi = std::max(hi, r.n_max());
    }
    if (m.rates.topology().kind() == Topology::Kind::kFinite) {
      lo = 0;
      hi = m.rates.topology().max_level();
    } else {
      // Pad so the analytic range reaches beyond every visited level.
      lo = m.rates.topology().kind() == Topology::Kind::kTwoSided ? lo - 8 : 0;
      hi += 8;
    }
    const auto certs = certificates_for(o, m, err);
    if (m.rates.topology().is_infinite() && certs.empty()) {
      throw UsageError("--compare-analytic needs a tail certificate (--tail-n0/--tail-rho)");
    }
    analytic = normalize(closed_form_weights(m.rates, lo, hi), certs);
  }

  json arr = json::array();
  for (const auto& r : reports) {
    json j = to_json(r);
    if (analytic) {
      const auto tv = compare_tv(*analytic, occupancy_distribution(r));
      j["tv"] = {{"distance", tv.distance}, {"bound", tv.bound}};
    }
    arr.push_back(std::move(j));
  }
  emit(o, (o.replications == 1 ? arr[0] : arr).dump(2) + "\n", out);
  return kOk;
}

int cmd_preset_list(std::ostream& out) {
  for (const auto& p : preset_catalog()) {
    out << p.name << "\t" << p.description << "\n";
    for (const auto& [k, v] : p.defaults) out << "  " << k << "=" << v << "\n";
  }
  return kOk;
}

int cmd_preset_show(const Options& o, std::ostream& out) {
  const auto inst = make_preset(o.preset_name, parse_params(o.model.params));
  json certs = json::array();
  for (const auto& c : inst.certificates) certs.push_back(to_json(c));
  json j = {{"name", inst.name}, {"params", inst.params}, {"model", rate_set_to_json(inst.rates)},
            {"certificates", certs}};
  emit(o, j.dump(2) + "\n", out);
  return kOk;
}

// Closed form against the dense solve on the same truncation. Levels adjacent
// to an artificial truncation boundary are excluded since the reflecting cap
// changes them.
int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const auto m = load(o.model);
  const auto& topo = m.rates.topology();
  const auto [lo, hi] = level_range(o, topo);
  const auto w = closed_form_weights(m.rates, lo, hi);
  const auto dense = dense_balance_solve(m.rates, lo, hi);
  const Level first = topo.contains(lo - 1) ? lo + 1 : lo;
  const Level last = topo.contains(hi + 1) ? hi - 1 : hi;
  if (first > last) throw UsageError("truncation too small to compare");

  // Renormalize both over the compared levels.
  double sw = 0.0;
  double sd = 0.0;
  for (Level n = first; n <= last; ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      sw += std::exp(w.log_weight(n, p) - w.log_weight(first, Phase::B));
      sd += dense.probability(n, p);
    }
  }
  double worst = 0.0;
  for (Level n = first; n <= last; ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      const double a = std::exp(w.log_weight(n, p) - w.log_weight(first, Phase::B)) / sw;
      const double b = dense.probability(n, p) / sd;
      worst = std::max(worst, std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b)));
    }
  }
  const double balance = balance_residual(w, m.rates);
  json j = {{"levels", {first, last}}, {"max_relative_difference", worst}, {"balance_residual", balance}};
  emit(o, "residual " + format_double(worst) + "\n" + j.dump(2) + "\n", out);
  if (!(worst < 1e-8)) {
    err << "closed form and dense solve disagree beyond 1e-8\n";
    return kNumerical;
  }
  return kOk;
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidArgument: return kUsage;
    case ErrorKind::kNonFinite:
    case ErrorKind::kDegenerateDenominator:
    case ErrorKind::kSingularSystem:
    case ErrorKind::kNumericalBreakdown: return kNumerical;
    default: return kModel;
  }
}

void add_model_flags(CLI::App* sub, Options& o) {
  sub->add_option("--model", o.model.model_path, "model config (JSON)");
  sub->add_option("--preset", o.model.preset, "preset name");
  sub->add_option("--param", o.model.params, "preset override k=v[,k=v...]")->allow_extra_args(false);
  sub->add_option("--out", o.out_path, "output file (default: stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Alternating birth-death processes: stationary laws, ergodicity, regularity, simulation", "altbd"};
  app.require_subcommand(1, 1);

  auto* stationary = app.add_subcommand("stationary", "closed-form weights or normalized distribution");
  add_model_flags(stationary, o);
  stationary->add_option("--nmax", o.nmax, "highest level");
  stationary->add_option("--nmin", o.nmin, "lowest level (two-sided; default -nmax)");
  stationary->add_option("--tail-n0", o.tail_n0, "tail certificate start level");
  stationary->add_option("--tail-rho", o.tail_rho, "tail certificate ratio bound");
  stationary->add_option("--format", o.format, "csv or json");

  auto* ergo = app.add_subcommand("ergodicity", "ergodicity verdict");
  add_model_flags(ergo, o);
  ergo->add_option("--window", o.window, "W0,W1");

  auto* reg = app.add_subcommand("regularity", "non-explosion verdict");
  add_model_flags(reg, o);
  reg->add_option("--steps", o.steps, "Reuter recursion steps");
  reg->add_option("--window", o.window, "W0,W1");
  reg->add_option("--format", o.format, "json (verdict) or csv (Reuter trace)");

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo occupancy");
  add_model_flags(sim, o);
  sim->add_option("--seed", o.seed, "master seed");
  sim->add_option("--events", o.events, "events per path");
  sim->add_option("--time", o.time, "time horizon");
  sim->add_option("--guard", o.guard, "level guard for suspected explosion");
  sim->add_option("--replications", o.replications, "independent replications");
  sim->add_flag("--compare-analytic", o.compare_analytic, "report TV distance to the closed form");
  sim->add_option("--tail-n0", o.tail_n0, "tail certificate start level");
  sim->add_option("--tail-rho", o.tail_rho, "tail certificate ratio bound");

  app.add_subcommand("preset-list", "list presets and their defaults");

  auto* show = app.add_subcommand("preset-show", "print a preset's rate set");
  show->add_option("name", o.preset_name, "preset name")->required();
  show->add_option("--param", o.model.params, "override k=v[,k=v...]");
  show->add_option("--out", o.out_path, "output file (default: stdout)");

  auto* verify = app.add_subcommand("verify", "closed form vs dense solve on a truncation");
  add_model_flags(verify, o);
  verify->add_option("--nmax", o.nmax, "highest level");
  verify->add_option("--nmin", o.nmin, "lowest level (two-sided; default -nmax)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (stationary->parsed()) return cmd_stationary(o, out, err);
    if (ergo->parsed()) return cmd_ergodicity(o, out, err);
    if (reg->parsed()) return cmd_regularity(o, out, err);
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (show->parsed()) return cmd_preset_show(o, out);
    if (verify->parsed()) return cmd_verify(o, out, err);
    return cmd_preset_list(out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error at offset " << e.offset() << ": " << e.what() << "\n";
    return kModel;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  }
}

}  // namespace altbd::cli
