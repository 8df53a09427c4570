#include "altbd/model.hpp"

#include <cmath>

#include "altbd/error.hpp"

namespace altbd {

std::string_view to_string(Phase p) { return p == Phase::B ? "b" : "d"; }

Phase parse_phase(std::string_view text) {
  if (text == "b" || text == "B") return Phase::B;
  if (text == "d" || text == "D") return Phase::D;
  throw Error(ErrorKind::kConfig, "phase must be 'b' or 'd', got '" + std::string(text) + "'");
}

std::string to_string(const ChainState& s) {
  return "(" + std::to_string(s.level) + "," + std::string(to_string(s.phase)) + ")";
}

Topology Topology::finite(Level n) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "finite topology needs N >= 1");
  return Topology(Kind::kFinite, n);
}

bool Topology::contains(Level level) const noexcept {
  switch (kind_) {
    case Kind::kOneSided: return level >= 0;
    case Kind::kTwoSided: return true;
    case Kind::kFinite: return level >= 0 && level <= n_;
  }
  return false;
}

std::string Topology::name() const {
  switch (kind_) {
    case Kind::kOneSided: return "one-sided";
    case Kind::kTwoSided: return "two-sided";
    case Kind::kFinite: return "finite(" + std::to_string(n_) + ")";
  }
  return "?";
}

std::string_view to_string(RateKind k) {
  switch (k) {
    case RateKind::kLambda: return "lambda";
    case RateKind::kMu: return "mu";
    case RateKind::kDelta: return "delta";
    case RateKind::kBeta: return "beta";
    case RateKind::kKappa: return "kappa";
    case RateKind::kNu: return "nu";
  }
  return "?";
}

RateSet::RateSet(Specs specs, Topology topology, bool allow_zeros)
    : specs_(std::move(specs)), topology_(topology), allow_zeros_(allow_zeros) {}

RateSet RateSet::uniform(double value, Topology topology) {
  const auto c = RateSpec::constant(value);
  return RateSet(Specs{c, c, c, c, c, c}, topology);
}

const RateSpec& RateSet::spec(RateKind k) const {
  switch (k) {
    case RateKind::kLambda: return specs_.lambda;
    case RateKind::kMu: return specs_.mu;
    case RateKind::kDelta: return specs_.delta;
    case RateKind::kBeta: return specs_.beta;
    case RateKind::kKappa: return specs_.kappa;
    case RateKind::kNu: return specs_.nu;
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown rate kind");
}

double RateSet::rate(RateKind k, Level n) const {
  if (!topology_.contains(n)) {
    throw Error(ErrorKind::kOutOfSupport,
                "level " + std::to_string(n) + " is outside the " + topology_.name() + " state space");
  }
  const bool has_floor = topology_.kind() != Topology::Kind::kTwoSided;
  if (has_floor && n == 0 && (k == RateKind::kMu || k == RateKind::kNu)) return 0.0;
  if (topology_.kind() == Topology::Kind::kFinite && n == topology_.max_level() &&
      (k == RateKind::kLambda || k == RateKind::kKappa)) {
    return 0.0;
  }
  const double v = spec(k).eval(n);
  if (v == 0.0 && !allow_zeros_) {
    throw Error(ErrorKind::kZeroRate, std::string(to_string(k)) + " is zero at n=" + std::to_string(n) +
                                          " (set allow_zeros to permit this)");
  }
  return v;
}

RateSet RateSet::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorKind::kInvalidArgument, "scale factor must be positive and finite");
  }
  const auto scale = [factor](const RateSpec& s) {
    return RateSpec::expression(expr::mul(expr::number(factor), s.to_expr()));
  };
  const auto scale_any = [&](const RateSpec& s) -> RateSpec {
    if (const auto* t = std::get_if<RateSpec::Table>(&s.variant())) {
      std::map<Level, double> entries;
      for (const auto& [k, v] : t->entries) entries[k] = v * factor;
      RateSpec tail = scale(*t->tail);
      return RateSpec::table(std::move(entries), std::move(tail));
    }
    return scale(s);
  };
  return RateSet(Specs{scale_any(specs_.lambda), scale_any(specs_.mu), scale_any(specs_.delta),
                       scale_any(specs_.beta), scale_any(specs_.kappa), scale_any(specs_.nu)},
                 topology_, allow_zeros_);
}

void require_in_support(const Topology& topology, const ChainState& s) {
  if (!topology.contains(s.level)) {
    throw Error(ErrorKind::kOutOfSupport, "state " + to_string(s) + " is outside the " + topology.name() +
                                              " state space");
  }
}

Aggregates aggregates(const RateSet& rates, Level n) {
  Aggregates a;
  const double lambda = rates.lambda(n);
  const double kappa = rates.kappa(n);
  const double mu = rates.mu(n);
  const double nu = rates.nu(n);
  a.up = lambda + kappa;
  a.down = mu + nu;
  a.up_plus = 1.0 + a.up + rates.delta(n);
  a.down_plus = 1.0 + a.down + rates.beta(n);
  return a;
}

std::vector<Transition> transitions(const RateSet& rates, const ChainState& s) {
  require_in_support(rates.topology(), s);
  std::vector<Transition> out;
  out.reserve(3);
  const auto push = [&](Level level, Phase phase, double rate) {
    if (rate > 0.0) out.push_back({ChainState{level, phase}, rate});
  };
  const Level n = s.level;
  if (s.phase == Phase::B) {
    push(n + 1, Phase::B, rates.lambda(n));
    push(n, Phase::D, rates.delta(n));
    push(n + 1, Phase::D, rates.kappa(n));
  } else {
    push(n - 1, Phase::D, rates.mu(n));
    push(n, Phase::B, rates.beta(n));
    push(n - 1, Phase::B, rates.nu(n));
  }
  return out;
}

double exit_rate(const RateSet& rates, const ChainState& s) {
  double total = 0.0;
  for (const auto& t : transitions(rates, s)) total += t.rate;
  return total;
}

}  // namespace altbd
