#include "altbd/regularity.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "altbd/error.hpp"

namespace altbd {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact value of a finite double.
Rational to_rational(double v) {
  if (v == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(v, &exp);  // v = mant * 2^exp, 0.5 <= |mant| < 1
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r{BigInt(scaled)};
  const int shift = exp - 53;
  BigInt pow2 = BigInt(1) << std::abs(shift);
  if (shift >= 0) {
    r *= Rational(pow2);
  } else {
    r /= Rational(pow2);
  }
  return r;
}

template <class T>
T convert(double v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return to_rational(v);
  } else {
    return v;
  }
}

template <class T>
struct UpCoeffs {
  T D;
  T E;
};

template <class T>
UpCoeffs<T> up_coeffs(const RateSet& r, Level n) {
  const T lambda = convert<T>(r.lambda(n));
  const T delta = convert<T>(r.delta(n));
  const T kappa = convert<T>(r.kappa(n));
  const T mu1 = convert<T>(r.mu(n + 1));
  const T beta1 = convert<T>(r.beta(n + 1));
  const T nu1 = convert<T>(r.nu(n + 1));
  const T mplus1 = T(1) + mu1 + nu1 + beta1;
  const T den = lambda * mplus1 + beta1 * kappa;
  if (!(den > T(0))) {
    throw Error(ErrorKind::kDegenerateDenominator,
                "lambda_n M+_{n+1} + beta_{n+1} kappa_n vanishes at n=" + std::to_string(n));
  }
  return {(delta * mplus1 + mu1 * kappa) / den, ((T(1) + lambda) * mplus1 + (T(1) + beta1) * kappa) / den};
}

// Coefficients for the step level -> level-1 (B and C at that level).
struct DownCoeffs {
  double B;
  double C;
};

DownCoeffs down_coeffs(const RateSet& r, Level level) {
  const double mu = r.mu(level);
  const double beta = r.beta(level);
  const double nu = r.nu(level);
  const double lambda1 = r.lambda(level - 1);
  const double delta1 = r.delta(level - 1);
  const double lplus1 = aggregates(r, level - 1).up_plus;
  const double den = mu * lplus1 + delta1 * nu;
  if (!(den > 0.0)) {
    throw Error(ErrorKind::kDegenerateDenominator,
                "mu_{-n} Lambda+_{-n-1} + delta_{-n-1} nu_{-n} vanishes at level " + std::to_string(level));
  }
  return {(beta * lplus1 + lambda1 * nu) / den, ((1.0 + mu) * lplus1 + (1.0 + delta1) * nu) / den};
}

void check_identity(double sum, double combined, const char* what, Level n) {
  if (std::fabs(sum - combined) > 1e-12 * std::max(std::fabs(sum), std::fabs(combined))) {
    throw Error(ErrorKind::kNumericalBreakdown, std::string(what) + " identity fails at n=" + std::to_string(n));
  }
}

template <class T>
bool positive(const T& v) {
  return v > T(0);
}

// Runs the canonical one-sided recursion in T. Returns false if positivity is lost.
template <class T>
bool run_one_sided(const RateSet& rates, Level n_steps, std::vector<T>& yb, std::vector<T>& yd,
                   std::vector<UpCoeffs<T>>& coeffs) {
  const T beta0 = convert<T>(rates.beta(0));
  yb.assign(1, T(1));
  yd.assign(1, beta0 / (T(1) + beta0));
  coeffs.clear();
  for (Level n = 0; n < n_steps; ++n) {
    const auto c = up_coeffs<T>(rates, n);
    coeffs.push_back(c);
    const T& b = yb.back();
    const T& d = yd.back();
    const T next_b = b * c.E + c.D * (b - d);
    const T beta1 = convert<T>(rates.beta(n + 1));
    const T mu1 = convert<T>(rates.mu(n + 1));
    const T nu1 = convert<T>(rates.nu(n + 1));
    const T mplus1 = T(1) + mu1 + nu1 + beta1;
    const T next_d = (beta1 * next_b + mu1 * d + nu1 * b) / mplus1;
    if constexpr (std::is_same_v<T, double>) {
      if (!std::isfinite(next_b) || !std::isfinite(next_d)) {
        throw Error(ErrorKind::kNumericalBreakdown, "Reuter iterate is not finite at n=" + std::to_string(n + 1));
      }
    }
    if (!positive(next_b) || !positive(next_d)) return false;
    yb.push_back(next_b);
    yd.push_back(next_d);
  }
  return true;
}

std::string rational_text(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

void require_kind(const RateSet& r, Topology::Kind kind, const char* what) {
  if (r.topology().kind() != kind) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " called with a " + r.topology().name() + " rate set");
  }
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

SeriesTerms terms_from(std::function<double(Level)> value) {
  SeriesTerms t;
  t.log_term = [value](Level n) { return safe_log(value(n)); };
  t.log_step = [value](Level n) { return safe_log(value(n)) - safe_log(value(n - 1)); };
  return t;
}

}  // namespace

RecursionCoeffs reuter_coeffs(const RateSet& rates, Level n) {
  RecursionCoeffs out;
  const auto up = up_coeffs<double>(rates, n);
  out.D = up.D;
  out.E = up.E;
  {
    const double mplus1 = aggregates(rates, n + 1).down_plus;
    const double den = rates.lambda(n) * mplus1 + rates.beta(n + 1) * rates.kappa(n);
    const double combined =
        (aggregates(rates, n).up_plus * mplus1 - rates.nu(n + 1) * rates.kappa(n)) / den;
    check_identity(out.D + out.E, combined, "D + E", n);
  }
  if (rates.topology().kind() == Topology::Kind::kTwoSided) {
    const Level level = -n;
    const auto down = down_coeffs(rates, level);
    out.B_minus = down.B;
    out.C_minus = down.C;
    const double lplus1 = aggregates(rates, level - 1).up_plus;
    const double den = rates.mu(level) * lplus1 + rates.delta(level - 1) * rates.nu(level);
    const double combined =
        (aggregates(rates, level).down_plus * lplus1 - rates.kappa(level - 1) * rates.nu(level)) / den;
    check_identity(down.B + down.C, combined, "B + C", n);
  }
  return out;
}

ReuterTrace reuter_recursion_one_sided(const RateSet& rates, Level n_steps) {
  require_kind(rates, Topology::Kind::kOneSided, "reuter_recursion_one_sided");
  if (n_steps < 0) throw Error(ErrorKind::kInvalidArgument, "n_steps must be >= 0");
  ReuterTrace trace;
  std::vector<double> yb, yd;
  std::vector<UpCoeffs<double>> coeffs;
  if (run_one_sided<double>(rates, n_steps, yb, yd, coeffs)) {
    for (std::size_t i = 0; i < yb.size(); ++i) {
      ReuterIterate it{static_cast<Level>(i), yb[i], yd[i], 0.0, 0.0};
      if (i < coeffs.size()) {
        it.D = coeffs[i].D;
        it.E = coeffs[i].E;
      }
      trace.iterates.push_back(it);
    }
    return trace;
  }
  std::vector<Rational> qb, qd;
  std::vector<UpCoeffs<Rational>> qc;
  if (!run_one_sided<Rational>(rates, n_steps, qb, qd, qc)) {
    throw Error(ErrorKind::kNumericalBreakdown, "Reuter iterate is nonpositive even in exact arithmetic");
  }
  trace.exact_fallback = true;
  for (std::size_t i = 0; i < qb.size(); ++i) {
    ReuterIterate it{static_cast<Level>(i), qb[i].convert_to<double>(), qd[i].convert_to<double>(), 0.0, 0.0};
    if (i < qc.size()) {
      it.D = qc[i].D.convert_to<double>();
      it.E = qc[i].E.convert_to<double>();
    }
    trace.iterates.push_back(it);
  }
  return trace;
}

std::vector<ExactIterate> reuter_recursion_one_sided_exact(const RateSet& rates, Level n_steps) {
  require_kind(rates, Topology::Kind::kOneSided, "reuter_recursion_one_sided_exact");
  std::vector<Rational> qb, qd;
  std::vector<UpCoeffs<Rational>> qc;
  if (!run_one_sided<Rational>(rates, n_steps, qb, qd, qc)) {
    throw Error(ErrorKind::kNumericalBreakdown, "Reuter iterate is nonpositive in exact arithmetic");
  }
  std::vector<ExactIterate> out;
  for (std::size_t i = 0; i < qb.size(); ++i) {
    out.push_back({static_cast<Level>(i), rational_text(qb[i]), rational_text(qd[i])});
  }
  return out;
}

double ReuterBounds::lower() const { return std::exp(log_lower); }
double ReuterBounds::upper() const { return std::exp(log_upper); }

ReuterBounds reuter_bounds(const RateSet& rates, Level n) {
  require_kind(rates, Topology::Kind::kOneSided, "reuter_bounds");
  ReuterBounds b;
  for (Level k = 0; k <= n; ++k) {
    const auto c = up_coeffs<double>(rates, k);
    b.log_lower += std::log(c.E);
    b.log_upper += std::log(c.E + c.D);
  }
  return b;
}

double reuter_residual(const RateSet& rates, const std::vector<ReuterIterate>& iterates) {
  if (iterates.empty()) return 0.0;
  const Topology& topo = rates.topology();
  const Level first = iterates.front().n;
  const Level last = iterates.back().n;
  const auto at = [&](Level n) -> const ReuterIterate& { return iterates[static_cast<std::size_t>(n - first)]; };
  const auto rel = [](double lhs, double rhs) {
    const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    return scale > 0.0 ? std::fabs(lhs - rhs) / scale : 0.0;
  };
  double worst = 0.0;
  for (Level n = first; n <= last; ++n) {
    const auto& y = at(n);
    if (n < last || !topo.contains(n + 1)) {
      const double rhs = (n < last) ? rates.lambda(n) * at(n + 1).y_b + rates.delta(n) * y.y_d +
                                          rates.kappa(n) * at(n + 1).y_d
                                    : rates.delta(n) * y.y_d;
      worst = std::max(worst, rel(aggregates(rates, n).up_plus * y.y_b, rhs));
    }
    if (n > first || !topo.contains(n - 1)) {
      const double rhs = (n > first) ? rates.mu(n) * at(n - 1).y_d + rates.beta(n) * y.y_b +
                                           rates.nu(n) * at(n - 1).y_b
                                     : rates.beta(n) * y.y_b;
      worst = std::max(worst, rel(aggregates(rates, n).down_plus * y.y_d, rhs));
    }
  }
  return worst;
}

std::string_view to_string(RegularityVerdict::Kind k) {
  switch (k) {
    case RegularityVerdict::Kind::kNonExplosive: return "NonExplosive";
    case RegularityVerdict::Kind::kExplosive: return "Explosive";
    case RegularityVerdict::Kind::kInconclusive: return "Inconclusive";
  }
  return "?";
}

SeriesTerms regularity_div_terms(const RateSet& rates) {
  return terms_from([rates](Level n) {
    const double mplus1 = aggregates(rates, n + 1).down_plus;
    const double kappa = rates.kappa(n);
    return (mplus1 + kappa) / (rates.lambda(n) * mplus1 + rates.beta(n + 1) * kappa);
  });
}

SeriesTerms regularity_conv_terms(const RateSet& rates) {
  return terms_from([rates](Level n) {
    const double mplus1 = aggregates(rates, n + 1).down_plus;
    const double kappa = rates.kappa(n);
    return ((1.0 + rates.delta(n)) * mplus1 + (1.0 + rates.mu(n + 1)) * kappa) /
           (rates.lambda(n) * mplus1 + rates.beta(n + 1) * kappa);
  });
}

SeriesTerms regularity_negative_terms(const RateSet& rates) {
  return terms_from([rates](Level n) {
    const double lplus = aggregates(rates, -n - 1).up_plus;
    const double nu = rates.nu(-n);
    return (lplus + nu) / (rates.mu(-n) * lplus + rates.delta(-n - 1) * nu);
  });
}

RegularityVerdict regularity_one_sided(const RateSet& rates, Level w0, Level w1, Level n_steps,
                                       const LadderSettings& settings) {
  require_kind(rates, Topology::Kind::kOneSided, "regularity_one_sided");
  RegularityVerdict v;
  SeriesEvidence div = classify_series(regularity_div_terms(rates), w0, w1, settings);
  div.label = "div";
  const bool diverges = div.result == SeriesClass::kDivergent;
  v.series.push_back(std::move(div));
  if (diverges) {
    v.verdict = RegularityVerdict::Kind::kNonExplosive;
  } else {
    SeriesEvidence conv = classify_series(regularity_conv_terms(rates), w0, w1, settings);
    conv.label = "conv";
    if (conv.result == SeriesClass::kConvergent) v.verdict = RegularityVerdict::Kind::kExplosive;
    v.series.push_back(std::move(conv));
  }
  if (n_steps > 0) {
    try {
      const auto trace = reuter_recursion_one_sided(rates, n_steps);
      v.trace_length = static_cast<Level>(trace.iterates.size());
      v.bounds = reuter_bounds(rates, n_steps - 1);
      if (trace.exact_fallback) v.note = "recursion needed exact arithmetic";
    } catch (const Error& e) {
      v.note = std::string("recursion trace unavailable: ") + e.what();
    }
  }
  return v;
}

TwoSidedTrace two_sided_recursion(const RateSet& rates, Level anchor_level, double y_b, double y_d, Level n_steps) {
  require_kind(rates, Topology::Kind::kTwoSided, "two_sided_recursion");
  if (!(y_b > 0.0) || !(y_d > 0.0)) throw Error(ErrorKind::kInvalidArgument, "anchor values must be positive");
  TwoSidedTrace t;
  t.up.push_back({anchor_level, y_b, y_d, 0.0, 0.0});
  t.down.push_back({anchor_level, y_b, y_d, 0.0, 0.0});
  if (y_b >= y_d) t.up_monotone_from = anchor_level;
  if (y_d >= y_b) t.down_monotone_from = anchor_level;

  for (Level i = 0; i < n_steps; ++i) {
    auto& cur = t.up.back();
    const Level n = cur.n;
    const auto c = up_coeffs<double>(rates, n);
    cur.D = c.D;
    cur.E = c.E;
    const double nb = cur.y_b * c.E + c.D * (cur.y_b - cur.y_d);
    const double nd = (rates.beta(n + 1) * nb + rates.mu(n + 1) * cur.y_d + rates.nu(n + 1) * cur.y_b) /
                      aggregates(rates, n + 1).down_plus;
    if (!std::isfinite(nb) || !std::isfinite(nd)) {
      throw Error(ErrorKind::kNumericalBreakdown, "Reuter iterate is not finite at n=" + std::to_string(n + 1));
    }
    if (!(nb > 0.0) || !(nd > 0.0)) {
      t.up_stopped_at = n + 1;
      break;
    }
    t.up.push_back({n + 1, nb, nd, 0.0, 0.0});
    if (!t.up_monotone_from && nb >= nd) t.up_monotone_from = n + 1;
  }
  for (Level i = 0; i < n_steps; ++i) {
    auto& cur = t.down.back();
    const Level n = cur.n;
    const auto c = down_coeffs(rates, n);
    cur.D = c.B;
    cur.E = c.C;
    const double nd = cur.y_d * (c.B + c.C) - cur.y_b * c.B;
    const double nb = (rates.delta(n - 1) * nd + rates.lambda(n - 1) * cur.y_b + rates.kappa(n - 1) * cur.y_d) /
                      aggregates(rates, n - 1).up_plus;
    if (!std::isfinite(nb) || !std::isfinite(nd)) {
      throw Error(ErrorKind::kNumericalBreakdown, "Reuter iterate is not finite at n=" + std::to_string(n - 1));
    }
    if (!(nb > 0.0) || !(nd > 0.0)) {
      t.down_stopped_at = n - 1;
      break;
    }
    t.down.push_back({n - 1, nb, nd, 0.0, 0.0});
    if (!t.down_monotone_from && nd >= nb) t.down_monotone_from = n - 1;
  }
  return t;
}

RegularityVerdict regularity_two_sided(const RateSet& rates, Level w0, Level w1, const LadderSettings& settings) {
  require_kind(rates, Topology::Kind::kTwoSided, "regularity_two_sided");
  RegularityVerdict v;
  SeriesEvidence pos = classify_series(regularity_div_terms(rates), w0, w1, settings);
  pos.label = "div-positive";
  SeriesEvidence neg = classify_series(regularity_negative_terms(rates), w0, w1, settings);
  neg.label = "div-negative";
  if (pos.result == SeriesClass::kDivergent || neg.result == SeriesClass::kDivergent) {
    v.verdict = RegularityVerdict::Kind::kNonExplosive;
  } else {
    v.note = "no divergent sufficient series; explosion is not decided for two-sided chains";
  }
  v.series.push_back(std::move(pos));
  v.series.push_back(std::move(neg));
  return v;
}

RegularityVerdict regularity(const RateSet& rates, Level w0, Level w1, Level n_steps, const LadderSettings& settings) {
  switch (rates.topology().kind()) {
    case Topology::Kind::kOneSided: return regularity_one_sided(rates, w0, w1, n_steps, settings);
    case Topology::Kind::kTwoSided: return regularity_two_sided(rates, w0, w1, settings);
    case Topology::Kind::kFinite: {
      RegularityVerdict v;
      v.verdict = RegularityVerdict::Kind::kNonExplosive;
      v.note = "finite state space";
      return v;
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown topology");
}

}  // namespace altbd
