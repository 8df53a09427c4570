#include "altbd/presets.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "altbd/error.hpp"

namespace altbd {

namespace {

double ln(double v, const char* what, Level k) {
  if (!(v > 0.0)) {
    throw Error(ErrorKind::kDegenerateDenominator, std::string(what) + " vanishes at k=" + std::to_string(k));
  }
  return std::log(v);
}

double log_or_neg_inf(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

const RateSpec kZero = RateSpec::constant(0.0);

}  // namespace

RateSpec retrial_policy(RetrialPolicy policy, double alpha, double nu) {
  switch (policy) {
    case RetrialPolicy::kConstant: return RateSpec::constant(alpha);
    case RetrialPolicy::kClassical: return RateSpec::affine(0.0, nu);
    case RetrialPolicy::kLinear: return RateSpec::affine(alpha, nu);
    case RetrialPolicy::kGeneral: break;
  }
  throw Error(ErrorKind::kInvalidArgument, "the general policy takes an explicit retrial rate spec");
}

RateSet retrial_rate_set(const RetrialParams& p) {
  return RateSet({p.arrival_busy, kZero, p.service, p.arrival_idle, kZero, p.retrial}, Topology::one_sided(), true);
}

WeightTable retrial_closed_form(const RetrialParams& p, Level n_max) {
  if (n_max < 0) throw Error(ErrorKind::kInvalidArgument, "n_max must be >= 0");
  WeightTable w(Topology::one_sided(), 0, n_max, WeightReference::kZeroD);
  const double head = log_or_neg_inf(p.arrival_idle.eval(0)) - ln(p.service.eval(0), "delta", 0);
  w.set_log_weight(0, Phase::D, 0.0);
  double prod = 0.0;  // sum_{k=1..n} ln(lambda_{k-1}/delta_k * (beta_k+nu_k)/nu_k)
  for (Level n = 0; n <= n_max; ++n) {
    if (n > 0) {
      const double nu_n = p.retrial.eval(n);
      w.set_log_weight(n, Phase::D,
                       head + prod + log_or_neg_inf(p.arrival_busy.eval(n - 1)) - ln(nu_n, "nu", n));
      prod += log_or_neg_inf(p.arrival_busy.eval(n - 1)) - ln(p.service.eval(n), "delta", n) +
              log_or_neg_inf(p.arrival_idle.eval(n) + nu_n) - std::log(nu_n);
    }
    w.set_log_weight(n, Phase::B, head + prod);
  }
  return w;
}

WeightTable falin_closed_form(double lambda, double delta, const RateSpec& retrial, Level n_max) {
  if (!(lambda > 0.0) || !(delta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda and delta must be positive");
  WeightTable w(Topology::one_sided(), 0, n_max, WeightReference::kZeroD);
  const double rho = std::log(lambda / delta);
  double sum_b = 0.0;    // sum_{k=1..n} ln((lambda+nu_k)/nu_k)
  double sum_num = 0.0;  // sum_{k=0..n-1} ln(lambda+nu_k), nu_0 = 0
  double sum_den = 0.0;  // sum_{k=1..n} ln nu_k
  for (Level n = 0; n <= n_max; ++n) {
    if (n > 0) {
      const double nu_prev = n - 1 == 0 ? 0.0 : retrial.eval(n - 1);
      const double nu_n = retrial.eval(n);
      sum_num += std::log(lambda + nu_prev);
      sum_den += ln(nu_n, "nu", n);
      sum_b += std::log(lambda + nu_n) - std::log(nu_n);
    }
    w.set_log_weight(n, Phase::B, static_cast<double>(n + 1) * rho + sum_b);
    w.set_log_weight(n, Phase::D, static_cast<double>(n) * rho + sum_num - sum_den);
  }
  return w;
}

namespace {

void check_dam(const DamParams& p) {
  if (!(p.lambda > 0.0 && p.beta > 0.0 && p.delta > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "dam parameters must be positive");
  }
  if (!(p.theta > p.lambda)) throw Error(ErrorKind::kInvalidArgument, "dam needs theta > lambda");
}

}  // namespace

RateSet dam_rate_set(const DamParams& p) {
  check_dam(p);
  return RateSet({RateSpec::constant(p.lambda), RateSpec::constant(p.theta - p.lambda), RateSpec::constant(p.delta),
                  RateSpec::constant(p.beta), kZero, kZero},
                 Topology::one_sided(), true);
}

double dam_ratio(const DamParams& p) {
  check_dam(p);
  const double m = p.theta - p.lambda;
  return p.lambda * (p.beta + m) / (m * (p.lambda + p.delta));
}

bool dam_is_stable(const DamParams& p) {
  check_dam(p);
  return p.lambda * p.beta < (p.theta - p.lambda) * p.delta;
}

TailCertificate dam_certificate(const DamParams& p) { return {1, dam_ratio(p), TailSide::kPositive}; }

StationaryDistribution dam_closed_form(const DamParams& p, Level n_max) {
  if (!dam_is_stable(p)) {
    throw Error(ErrorKind::kUnstable, "dam is unstable: lambda*beta >= (theta-lambda)*delta");
  }
  if (n_max < 0) throw Error(ErrorKind::kInvalidArgument, "n_max must be >= 0");
  const double m = p.theta - p.lambda;
  const double r = dam_ratio(p);
  const double pi0 = (p.delta * m - p.lambda * p.beta) / (m * (p.beta + p.delta));
  const double cb = pi0 * p.beta / (p.lambda + p.delta);               // pi(n,b) = cb r^n
  const double cd = pi0 * p.beta * p.lambda / (m * (p.lambda + p.delta));  // pi(n,d) = cd r^{n-1}
  StationaryDistribution d;
  d.topology = Topology::one_sided();
  d.n_min = 0;
  d.n_max = n_max;
  for (Level n = 0; n <= n_max; ++n) {
    const double rn = std::pow(r, static_cast<double>(n));
    d.prob_b.push_back(cb * rn);
    d.prob_d.push_back(n == 0 ? pi0 : cd * rn / r);
  }
  const double rn1 = std::pow(r, static_cast<double>(n_max + 1));
  d.tail_error = (cb * rn1 + cd * rn1 / r) / (1.0 - r);
  d.log_normalizer = -std::log(pi0);
  return d;
}

RateSet fluid_queue_rate_set(double beta, double delta, double unit_rate) {
  if (!(beta > 0.0 && delta > 0.0 && unit_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "fluid queue parameters must be positive");
  }
  return dam_rate_set({unit_rate, 2.0 * unit_rate, beta, delta});
}

RateSet telegraph_rate_set(const TelegraphParams& p) {
  return RateSet({p.up, p.down, p.to_left, p.to_right, kZero, kZero}, Topology::two_sided(), true);
}

double telegraph_ell(const TelegraphParams& p, Level k) {
  return p.up.eval(k) / (p.up.eval(k + 1) + p.to_left.eval(k + 1));
}

double telegraph_m(const TelegraphParams& p, Level k) { return p.down.eval(k) / (p.down.eval(k) + p.to_right.eval(k)); }

WeightTable telegraph_closed_form(const TelegraphParams& p, Level n_min, Level n_max) {
  if (n_min > 0 || n_max < 0) throw Error(ErrorKind::kInvalidArgument, "range must contain level 0");
  WeightTable w(Topology::two_sided(), n_min, n_max, WeightReference::kZeroB);
  const auto log_ell = [&](Level k) { return ln(telegraph_ell(p, k), "ell", k); };
  const auto log_m = [&](Level k) { return ln(telegraph_m(p, k), "m", k); };
  const auto put_l = [&](Level n) {
    const double factor = (p.up.eval(n) + p.to_left.eval(n)) / (p.down.eval(n) + p.to_right.eval(n));
    w.set_log_weight(n, Phase::D, w.log_weight(n, Phase::B) + ln(factor, "phase factor", n));
  };
  w.set_log_weight(0, Phase::B, 0.0);
  put_l(0);
  for (Level n = 1; n <= n_max; ++n) {
    w.set_log_weight(n, Phase::B, w.log_weight(n - 1, Phase::B) + log_ell(n - 1) - log_m(n));
    put_l(n);
  }
  for (Level n = -1; n >= n_min; --n) {
    w.set_log_weight(n, Phase::B, w.log_weight(n + 1, Phase::B) + log_m(n + 1) - log_ell(n));
    put_l(n);
  }
  return w;
}

RateSet stabilized_telegraph(double eta, const ControlSpec& c) {
  if (!(eta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "eta must be positive");
  if (!(c.fill > 0.0)) throw Error(ErrorKind::kInvalidArgument, "fill value must be positive");
  for (Level n = 2; n <= c.probe_max; ++n) {
    if (!(c.r.eval(n) > 1.0) || !(c.t.eval(n) > 1.0)) {
      throw Error(ErrorKind::kControlInvalid, "control intensities must exceed 1, violated at n=" + std::to_string(n));
    }
  }
  using namespace expr;
  const ExprPtr n = var();
  const ExprPtr one = number(1.0);
  const ExprPtr two = number(2.0);
  const ExprPtr e = number(eta);
  const ExprPtr base_b = c.base_beta.to_expr();
  const ExprPtr base_d = c.base_delta.to_expr();
  const auto clamp01 = [&](ExprPtr x) {
    return call(ExprNode::Op::kMin, {one, call(ExprNode::Op::kMax, {number(0.0), std::move(x)})});
  };
  const auto control = [&](const ExprPtr& base, const RateSpec& rate, const ExprPtr& m) {
    const ExprPtr rm = substitute(rate.to_expr(), m);
    const ExprPtr gain = add(div(one, m), div(rm, mul(m, call(ExprNode::Op::kLn, {m}))));
    return add(base, mul(gain, add(e, base)));
  };

  // Levels k >= 3 use n = k - 1; the step s is 0 for k <= 2 and 1 for k >= 3.
  const ExprPtr s_pos = clamp01(sub(n, two));
  const ExprPtr m_pos = call(ExprNode::Op::kMax, {sub(n, one), two});
  const ExprPtr delta_expr = add(mul(sub(one, s_pos), base_d), mul(s_pos, control(base_b, c.r, m_pos)));
  // Mirror for k <= -3 with n = -k - 1.
  const ExprPtr s_neg = clamp01(sub(neg(n), two));
  const ExprPtr m_neg = call(ExprNode::Op::kMax, {sub(neg(n), one), two});
  const ExprPtr beta_tail = add(mul(sub(one, s_neg), base_b), mul(s_neg, control(base_d, c.t, m_neg)));

  RateSpec delta = RateSpec::table({{1, c.fill}, {2, c.fill}}, RateSpec::expression(delta_expr));
  RateSpec beta = RateSpec::table({{-1, c.fill}, {-2, c.fill}}, RateSpec::expression(beta_tail));
  const RateSpec speed = RateSpec::constant(eta);
  return RateSet({speed, speed, std::move(delta), std::move(beta), kZero, kZero}, Topology::two_sided(), true);
}

// ---------------------------------------------------------------------------
// Registry

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::kConfig, msg); }

class Params {
 public:
  Params(const std::string& preset, std::vector<std::pair<std::string, std::string>> defaults,
         const std::map<std::string, std::string>& overrides)
      : preset_(preset) {
    std::set<std::string> known;
    for (auto& [k, v] : defaults) {
      known.insert(k);
      values_[k] = v;
    }
    for (const auto& [k, v] : overrides) {
      if (!known.count(k)) config_error("preset '" + preset + "' has no parameter '" + k + "'");
      values_[k] = v;
    }
  }

  const std::string& text(const std::string& key) const { return values_.at(key); }

  double number(const std::string& key) const {
    const std::string& t = text(key);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      config_error("parameter '" + key + "' of preset '" + preset_ + "' is not a number: '" + t + "'");
    }
    return v;
  }

  Level integer(const std::string& key) const {
    const std::string& t = text(key);
    Level v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      config_error("parameter '" + key + "' of preset '" + preset_ + "' is not an integer: '" + t + "'");
    }
    return v;
  }

  RateSpec rate(const std::string& key) const {
    const std::string& t = text(key);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && ptr == t.data() + t.size()) return RateSpec::constant(v);
    return parse_rate_expr(t);
  }

  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  std::string preset_;
  std::map<std::string, std::string> values_;
};

RetrialPolicy parse_policy(const std::string& s) {
  if (s == "constant") return RetrialPolicy::kConstant;
  if (s == "classical") return RetrialPolicy::kClassical;
  if (s == "linear") return RetrialPolicy::kLinear;
  if (s == "general") return RetrialPolicy::kGeneral;
  config_error("unknown retrial policy '" + s + "'");
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"ones", "all six rates equal to `value`",
       {{"value", "1"}, {"topology", "one-sided"}, {"n", "2"}}},
      {"dam", "dam with gate: inflow lambda, outflow theta - lambda, gate rates beta/delta",
       {{"lambda", "1"}, {"theta", "3"}, {"beta", "1"}, {"delta", "1"}}},
      {"fluid", "symmetric discretized fluid buffer",
       {{"beta", "1"}, {"delta", "2"}, {"unit_rate", "1"}}},
      {"retrial", "single-server retrial queue; policy constant|classical|linear|general",
       {{"policy", "constant"}, {"lambda", "1"}, {"beta", "1"}, {"delta", "3"}, {"alpha", "1"}, {"nu", "1"},
        {"retrial", "1"}}},
      {"telegraph", "telegraph process on the integers (lambda, mu may be expressions)",
       {{"lambda", "1"}, {"mu", "1"}, {"beta", "1"}, {"delta", "1"}}},
      {"telegraph-stabilized", "telegraph with control intensities r, t restoring ergodicity",
       {{"eta", "1"}, {"beta", "1"}, {"delta", "1"}, {"r", "2"}, {"t", "2"}, {"fill", "1"}}},
  };
  return catalog;
}

PresetInstance make_preset(const std::string& name, const std::map<std::string, std::string>& overrides) {
  const PresetInfo* info = nullptr;
  for (const auto& p : preset_catalog()) {
    if (p.name == name) info = &p;
  }
  if (!info) config_error("unknown preset '" + name + "'");
  auto defaults = info->defaults;
  if (name == "telegraph" && overrides.count("eta")) {
    // eta sets both speeds.
    std::map<std::string, std::string> o = overrides;
    const std::string eta = o.at("eta");
    o.erase("eta");
    o.emplace("lambda", eta);
    o.emplace("mu", eta);
    return make_preset(name, o);
  }
  const Params p(name, defaults, overrides);

  if (name == "ones") {
    const double v = p.number("value");
    const std::string& topo = p.text("topology");
    Topology t = Topology::one_sided();
    if (topo == "two-sided") {
      t = Topology::two_sided();
    } else if (topo == "finite") {
      t = Topology::finite(p.integer("n"));
    } else if (topo != "one-sided") {
      config_error("unknown topology '" + topo + "'");
    }
    RateSet rates = RateSet::uniform(v, t);
    return {name, p.all(), rates, {}, [rates](Level a, Level b) { return closed_form_weights(rates, a, b); }};
  }
  if (name == "dam" || name == "fluid") {
    DamParams d;
    if (name == "dam") {
      d = {p.number("lambda"), p.number("theta"), p.number("beta"), p.number("delta")};
    } else {
      const double u = p.number("unit_rate");
      d = {u, 2.0 * u, p.number("beta"), p.number("delta")};
    }
    RateSet rates = dam_rate_set(d);
    std::vector<TailCertificate> certs;
    if (dam_is_stable(d)) certs.push_back(dam_certificate(d));
    auto closed = [d](Level, Level b) {
      const double m = d.theta - d.lambda;
      const double r = dam_ratio(d);
      WeightTable w(Topology::one_sided(), 0, b, WeightReference::kZeroD);
      const double lb = std::log(d.beta / (d.lambda + d.delta));
      const double ld = std::log(d.beta * d.lambda / (m * (d.lambda + d.delta)));
      const double lr = std::log(r);
      w.set_log_weight(0, Phase::D, 0.0);
      for (Level n = 0; n <= b; ++n) {
        w.set_log_weight(n, Phase::B, lb + static_cast<double>(n) * lr);
        if (n > 0) w.set_log_weight(n, Phase::D, ld + static_cast<double>(n - 1) * lr);
      }
      return w;
    };
    return {name, p.all(), rates, certs, closed};
  }
  if (name == "retrial") {
    const auto policy = parse_policy(p.text("policy"));
    RetrialParams rp;
    rp.arrival_busy = RateSpec::constant(p.number("lambda"));
    rp.arrival_idle = RateSpec::constant(p.number("beta"));
    rp.service = RateSpec::constant(p.number("delta"));
    rp.retrial = policy == RetrialPolicy::kGeneral ? p.rate("retrial")
                                                   : retrial_policy(policy, p.number("alpha"), p.number("nu"));
    RateSet rates = retrial_rate_set(rp);
    std::vector<TailCertificate> certs;
    if (policy == RetrialPolicy::kConstant) {
      const double lambda = p.number("lambda");
      const double alpha = p.number("alpha");
      const double q = lambda * (p.number("beta") + alpha) / (p.number("delta") * alpha);
      if (q > 0.0 && q < 1.0) certs.push_back({1, q, TailSide::kPositive});
    }
    return {name, p.all(), rates, certs, [rp](Level, Level b) { return retrial_closed_form(rp, b); }};
  }
  if (name == "telegraph") {
    TelegraphParams tp{p.rate("lambda"), p.rate("mu"), p.rate("beta"), p.rate("delta")};
    return {name, p.all(), telegraph_rate_set(tp), {},
            [tp](Level a, Level b) { return telegraph_closed_form(tp, a, b); }};
  }
  // telegraph-stabilized
  ControlSpec c;
  c.r = p.rate("r");
  c.t = p.rate("t");
  c.base_beta = p.rate("beta");
  c.base_delta = p.rate("delta");
  c.fill = p.number("fill");
  RateSet rates = stabilized_telegraph(p.number("eta"), c);
  return {name, p.all(), rates, {}, [rates](Level a, Level b) { return two_sided_weights(rates, a, b); }};
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    // Split on commas outside parentheses so expression arguments survive.
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char ch : item) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    for (const auto& part : parts) {
      const auto eq = part.find('=');
      if (eq == std::string::npos || eq == 0) config_error("parameter '" + part + "' is not of the form key=value");
      out[part.substr(0, eq)] = part.substr(eq + 1);
    }
  }
  return out;
}

}  // namespace altbd
