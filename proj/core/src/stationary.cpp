#include "altbd/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "altbd/error.hpp"

namespace altbd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// ln(Lambda_{k-1} beta_k + M_k lambda_{k-1})
double log_num(const RateSet& r, Level k) {
  const Aggregates prev = aggregates(r, k - 1);
  const Aggregates cur = aggregates(r, k);
  return safe_log(prev.up * r.beta(k) + cur.down * r.lambda(k - 1));
}

// ln(Lambda_k mu_{k+1} + M_{k+1} delta_k); zero is fatal.
double log_den(const RateSet& r, Level k) {
  const Aggregates cur = aggregates(r, k);
  const Aggregates next = aggregates(r, k + 1);
  const double v = cur.up * r.mu(k + 1) + next.down * r.delta(k);
  if (!(v > 0.0)) {
    throw Error(ErrorKind::kDegenerateDenominator,
                "Lambda_k mu_{k+1} + M_{k+1} delta_k vanishes at k=" + std::to_string(k));
  }
  return std::log(v);
}

double log_ratio_term(const RateSet& r, Level k) { return log_num(r, k) - log_den(r, k); }

void require_kind(const RateSet& r, Topology::Kind kind, const char* what) {
  if (r.topology().kind() != kind) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " called with a " + r.topology().name() + " rate set");
  }
}

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

WeightTable::WeightTable(Topology topology, Level n_min, Level n_max, WeightReference reference)
    : topology_(topology), n_min_(n_min), n_max_(n_max), reference_(reference) {
  if (n_max < n_min) throw Error(ErrorKind::kInvalidArgument, "empty weight range");
  const auto size = static_cast<std::size_t>(n_max - n_min + 1);
  log_b_.assign(size, kNegInf);
  log_d_.assign(size, kNegInf);
}

std::size_t WeightTable::index(Level n) const {
  if (!contains(n)) throw Error(ErrorKind::kOutOfSupport, "level " + std::to_string(n) + " is outside the table");
  return static_cast<std::size_t>(n - n_min_);
}

double WeightTable::log_weight(Level n, Phase p) const {
  const auto i = index(n);
  return p == Phase::B ? log_b_[i] : log_d_[i];
}

double WeightTable::weight(Level n, Phase p) const { return std::exp(log_weight(n, p)); }

void WeightTable::set_log_weight(Level n, Phase p, double value) {
  const auto i = index(n);
  (p == Phase::B ? log_b_ : log_d_)[i] = value;
}

WeightTable one_sided_weights(const RateSet& rates, Level n_max) {
  require_kind(rates, Topology::Kind::kOneSided, "one_sided_weights");
  if (n_max < 0) throw Error(ErrorKind::kInvalidArgument, "n_max must be >= 0");
  WeightTable w(rates.topology(), 0, n_max, WeightReference::kZeroD);

  const double log_pre = safe_log(rates.beta(0)) - log_den(rates, 0);
  w.set_log_weight(0, Phase::D, 0.0);
  double s = 0.0;  // S(n) = sum_{k=1..n} ln(num_k / den_k)
  for (Level n = 0; n <= n_max; ++n) {
    if (n > 0) {
      w.set_log_weight(n, Phase::D, log_pre + safe_log(aggregates(rates, n - 1).up) + s);
      s += log_ratio_term(rates, n);
    }
    w.set_log_weight(n, Phase::B, log_pre + safe_log(aggregates(rates, n + 1).down) + s);
  }
  return w;
}

WeightTable two_sided_weights(const RateSet& rates, Level n_min, Level n_max) {
  require_kind(rates, Topology::Kind::kTwoSided, "two_sided_weights");
  if (n_min > 0 || n_max < 0) throw Error(ErrorKind::kInvalidArgument, "range must contain level 0");
  WeightTable w(rates.topology(), n_min, n_max, WeightReference::kZeroB);
  const double log_m1 = safe_log(aggregates(rates, 1).down);

  // x(n,b) = M_{n+1}/M_1 e^{S(n)},  x(n,d) = Lambda_{n-1}/M_1 e^{S(n-1)}
  const auto put = [&](Level n, double s_n, double s_prev) {
    w.set_log_weight(n, Phase::B, safe_log(aggregates(rates, n + 1).down) - log_m1 + s_n);
    w.set_log_weight(n, Phase::D, safe_log(aggregates(rates, n - 1).up) - log_m1 + s_prev);
  };

  double s = 0.0;
  double s_prev = -log_ratio_term(rates, 0);  // S(-1)
  put(0, 0.0, s_prev);
  for (Level n = 1; n <= n_max; ++n) {
    const double next = s + log_ratio_term(rates, n);
    put(n, next, s);
    s = next;
  }
  // Downward: S(n-1) = S(n) - ln(num_n / den_n).
  double s_n = s_prev;  // S(-1)
  for (Level n = -1; n >= n_min; --n) {
    const double below = s_n - log_ratio_term(rates, n);
    put(n, s_n, below);
    s_n = below;
  }
  w.set_log_weight(0, Phase::B, 0.0);
  return w;
}

WeightTable finite_weights(const RateSet& rates) {
  require_kind(rates, Topology::Kind::kFinite, "finite_weights");
  const Level big_n = rates.topology().max_level();
  WeightTable w(rates.topology(), 0, big_n, WeightReference::kZeroD);

  const double log_pre = safe_log(rates.beta(0)) - log_den(rates, 0);
  w.set_log_weight(0, Phase::D, 0.0);
  double s = 0.0;  // S(n) after processing level n
  for (Level n = 0; n < big_n; ++n) {
    if (n > 0) {
      w.set_log_weight(n, Phase::D, log_pre + safe_log(aggregates(rates, n - 1).up) + s);
      s += log_ratio_term(rates, n);
    }
    w.set_log_weight(n, Phase::B, log_pre + safe_log(aggregates(rates, n + 1).down) + s);
  }
  // Boundary: x(N,b) delta_N = x(N-1,b) lambda_{N-1} + x(N,d) beta_N.
  const Aggregates below = aggregates(rates, big_n - 1);
  const Aggregates top = aggregates(rates, big_n);
  const double delta_n = rates.delta(big_n);
  if (!(delta_n > 0.0)) throw Error(ErrorKind::kDegenerateDenominator, "delta_N vanishes");
  const double log_p = log_pre + s;  // ln(beta_0 prod num / prod den)
  w.set_log_weight(big_n, Phase::B,
                   log_p + safe_log(below.up * rates.beta(big_n) + rates.lambda(big_n - 1) * top.down) -
                       std::log(delta_n));
  w.set_log_weight(big_n, Phase::D, log_p + safe_log(below.up));
  return w;
}

WeightTable closed_form_weights(const RateSet& rates, Level n_min, Level n_max) {
  switch (rates.topology().kind()) {
    case Topology::Kind::kOneSided: return one_sided_weights(rates, n_max);
    case Topology::Kind::kTwoSided: return two_sided_weights(rates, n_min, n_max);
    case Topology::Kind::kFinite: return finite_weights(rates);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown topology");
}

std::string_view to_string(TailSide s) { return s == TailSide::kPositive ? "positive" : "negative"; }

double StationaryDistribution::probability(Level n, Phase p) const {
  if (n < n_min || n > n_max) return 0.0;
  const auto i = static_cast<std::size_t>(n - n_min);
  return p == Phase::B ? prob_b[i] : prob_d[i];
}

double StationaryDistribution::total_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < prob_b.size(); ++i) s += prob_b[i] + prob_d[i];
  return s;
}

StationaryDistribution normalize(const WeightTable& w, const std::vector<TailCertificate>& certs) {
  const Topology& topo = w.topology();
  const auto log_mass = [&](Level n) { return log_add(w.log_weight(n, Phase::B), w.log_weight(n, Phase::D)); };

  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(2 * (w.n_max() - w.n_min() + 1)));
  for (Level n = w.n_min(); n <= w.n_max(); ++n) {
    logs.push_back(w.log_weight(n, Phase::B));
    logs.push_back(w.log_weight(n, Phase::D));
  }
  const double log_body = log_sum_exp(logs);
  double log_tail = kNegInf;

  const auto handle_side = [&](TailSide side, bool unbounded) {
    if (!unbounded) return;
    const TailCertificate* cert = nullptr;
    for (const auto& c : certs) {
      if (c.side == side) cert = &c;
    }
    if (!cert) {
      throw Error(ErrorKind::kMissingCertificate,
                  "normalizing a " + topo.name() + " chain needs a " + std::string(to_string(side)) +
                      "-side tail certificate");
    }
    if (!(cert->rho_bar > 0.0 && cert->rho_bar < 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "tail certificate rho must lie in (0,1)");
    }
    const double log_rho = std::log(cert->rho_bar);
    const double slack = std::log1p(1e-12);
    if (side == TailSide::kPositive) {
      if (w.n_max() <= cert->n0) {
        throw Error(ErrorKind::kInvalidArgument, "range must extend beyond the certificate level n0");
      }
      for (Level n = std::max(cert->n0, w.n_min()); n < w.n_max(); ++n) {
        if (log_mass(n + 1) - log_mass(n) > log_rho + slack) {
          throw Error(ErrorKind::kCertificateViolated,
                      "mass ratio at n=" + std::to_string(n + 1) + " exceeds rho " + std::to_string(cert->rho_bar));
        }
      }
      log_tail = log_add(log_tail, log_mass(w.n_max()) + log_rho - std::log1p(-cert->rho_bar));
    } else {
      if (w.n_min() >= -cert->n0) {
        throw Error(ErrorKind::kInvalidArgument, "range must extend below the certificate level -n0");
      }
      for (Level n = std::min(-cert->n0, w.n_max()); n > w.n_min(); --n) {
        if (log_mass(n - 1) - log_mass(n) > log_rho + slack) {
          throw Error(ErrorKind::kCertificateViolated,
                      "mass ratio at n=" + std::to_string(n - 1) + " exceeds rho " + std::to_string(cert->rho_bar));
        }
      }
      log_tail = log_add(log_tail, log_mass(w.n_min()) + log_rho - std::log1p(-cert->rho_bar));
    }
  };

  switch (topo.kind()) {
    case Topology::Kind::kOneSided: handle_side(TailSide::kPositive, true); break;
    case Topology::Kind::kTwoSided:
      handle_side(TailSide::kPositive, true);
      handle_side(TailSide::kNegative, true);
      break;
    case Topology::Kind::kFinite: break;
  }

  const double log_c = log_add(log_body, log_tail);
  StationaryDistribution d;
  d.topology = topo;
  d.n_min = w.n_min();
  d.n_max = w.n_max();
  d.log_normalizer = log_c;
  d.tail_error = log_tail == kNegInf ? 0.0 : std::exp(log_tail - log_c);
  for (Level n = w.n_min(); n <= w.n_max(); ++n) {
    d.prob_b.push_back(std::exp(w.log_weight(n, Phase::B) - log_c));
    d.prob_d.push_back(std::exp(w.log_weight(n, Phase::D) - log_c));
  }
  return d;
}

std::string_view to_string(ErgodicityVerdict::Kind k) {
  switch (k) {
    case ErgodicityVerdict::Kind::kErgodic: return "Ergodic";
    case ErgodicityVerdict::Kind::kNotErgodic: return "NotErgodic";
    case ErgodicityVerdict::Kind::kInconclusive: return "Inconclusive";
  }
  return "?";
}

SeriesTerms ergodicity_terms(const RateSet& rates, TailSide side) {
  const auto kind = rates.topology().kind();
  if (kind == Topology::Kind::kFinite) throw Error(ErrorKind::kInvalidArgument, "finite chains have no criterion series");
  if (side == TailSide::kNegative && kind != Topology::Kind::kTwoSided) {
    throw Error(ErrorKind::kInvalidArgument, "one-sided chains have no negative side");
  }
  // pair(m) = ln(Lambda_m + M_{m+1})
  const auto pair = [rates](Level m) {
    return safe_log(aggregates(rates, m).up + aggregates(rates, m + 1).down);
  };
  SeriesTerms t;
  if (side == TailSide::kPositive) {
    const bool one_sided = kind == Topology::Kind::kOneSided;
    t.log_term = [rates, pair, one_sided](Level n) {
      double s = one_sided ? -log_den(rates, 0) : 0.0;
      for (Level k = 1; k <= n; ++k) s += log_ratio_term(rates, k);
      return s + pair(n);
    };
    t.log_step = [rates, pair](Level n) { return log_ratio_term(rates, n) + pair(n) - pair(n - 1); };
  } else {
    // a_n = (Lambda_{-n} + M_{-n+1}) e^{S(-n)}
    t.log_term = [rates, pair](Level n) {
      double s = 0.0;
      for (Level k = -n + 1; k <= 0; ++k) s -= log_ratio_term(rates, k);
      return s + pair(-n);
    };
    t.log_step = [rates, pair](Level n) { return -log_ratio_term(rates, -n + 1) + pair(-n) - pair(-n + 1); };
  }
  return t;
}

ErgodicityVerdict ergodicity(const RateSet& rates, Level w0, Level w1, const LadderSettings& settings) {
  if (w0 < 2 || w1 <= w0) throw Error(ErrorKind::kInvalidArgument, "ergodicity window needs w1 > w0 >= 2");
  ErgodicityVerdict v;
  v.w0 = w0;
  v.w1 = w1;
  if (rates.topology().kind() == Topology::Kind::kFinite) {
    v.verdict = ErgodicityVerdict::Kind::kErgodic;
    v.note = "finite irreducible chain";
    return v;
  }
  std::vector<TailSide> sides = {TailSide::kPositive};
  if (rates.topology().kind() == Topology::Kind::kTwoSided) sides.push_back(TailSide::kNegative);

  bool all_convergent = true;
  bool any_divergent = false;
  for (TailSide side : sides) {
    SeriesEvidence ev = classify_series(ergodicity_terms(rates, side), w0, w1, settings);
    ev.label = std::string(to_string(side));
    if (ev.result == SeriesClass::kConvergent) {
      if (ev.branch == LadderBranch::kGeometric) v.certificates.push_back({w0, ev.sup_ratio, side});
    } else {
      all_convergent = false;
    }
    any_divergent = any_divergent || ev.result == SeriesClass::kDivergent;
    v.sides.push_back(std::move(ev));
  }
  if (any_divergent) {
    v.verdict = ErgodicityVerdict::Kind::kNotErgodic;
  } else if (all_convergent) {
    v.verdict = ErgodicityVerdict::Kind::kErgodic;
  } else {
    v.verdict = ErgodicityVerdict::Kind::kInconclusive;
  }
  return v;
}

double balance_residual(const WeightTable& w, const RateSet& rates) {
  const Topology& topo = rates.topology();
  double worst = 0.0;
  for (Level n = w.n_min(); n <= w.n_max(); ++n) {
    if (topo.contains(n - 1) && !w.contains(n - 1)) continue;
    if (topo.contains(n + 1) && !w.contains(n + 1)) continue;
    for (Phase p : {Phase::B, Phase::D}) {
      const ChainState target{n, p};
      const double lx = w.log_weight(n, p);
      const double out = exit_rate(rates, target);
      double in = 0.0;
      for (Level m = n - 1; m <= n + 1; ++m) {
        if (!topo.contains(m)) continue;
        for (Phase q : {Phase::B, Phase::D}) {
          const ChainState src{m, q};
          for (const auto& t : transitions(rates, src)) {
            if (t.to == target) in += std::exp(w.log_weight(m, q) - lx) * t.rate;
          }
        }
      }
      const double scale = std::max(out, in);
      if (scale > 0.0) worst = std::max(worst, std::fabs(in - out) / scale);
      if (!std::isfinite(lx)) worst = std::numeric_limits<double>::infinity();
    }
  }
  return worst;
}

}  // namespace altbd
