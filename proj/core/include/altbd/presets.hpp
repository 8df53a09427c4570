#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "altbd/model.hpp"
#include "altbd/stationary.hpp"

namespace altbd {

// Retrial queue: phase B = server busy, phase D = server idle; the level is
// the orbit size. Arrivals while busy join the orbit (lambda), arrivals while
// idle start service (beta), service ends at rate delta, and the orbit retries
// successfully at rate nu_n.

enum class RetrialPolicy { kConstant, kClassical, kLinear, kGeneral };

/// nu_n for the standard policies: constant alpha, classical n*nu, linear
/// alpha + n*nu. nu_0 is forced to 0 by the one-sided topology.
RateSpec retrial_policy(RetrialPolicy policy, double alpha, double nu);

struct RetrialParams {
  RateSpec arrival_busy = RateSpec::constant(1.0);  // lambda_n
  RateSpec arrival_idle = RateSpec::constant(1.0);  // beta_n
  RateSpec service = RateSpec::constant(1.0);       // delta_n
  RateSpec retrial = RateSpec::constant(1.0);       // nu_n
};

RateSet retrial_rate_set(const RetrialParams& p);

/// Product form of the retrial weights, x(0,d) = 1. Throws
/// Error(kDegenerateDenominator) if some nu_k (k >= 1) or delta_k vanishes.
WeightTable retrial_closed_form(const RetrialParams& p, Level n_max);

/// Constant arrival and service rates with arrival_idle = arrival_busy:
///   x(n,b) = (lambda/delta)^{n+1} prod_{k=1..n} (lambda + nu_k)/nu_k
///   x(n,d) = (lambda/delta)^n prod_{k=0..n-1} (lambda + nu_k) / prod_{k=1..n} nu_k,  nu_0 = 0
WeightTable falin_closed_form(double lambda, double delta, const RateSpec& retrial, Level n_max);

struct DamParams {
  double lambda = 1.0;  // inflow
  double theta = 3.0;   // maximal outflow
  double beta = 1.0;    // gate opens
  double delta = 1.0;   // gate closes
};

/// lambda_n = lambda, mu_n = theta - lambda, beta, delta, kappa = nu = 0.
RateSet dam_rate_set(const DamParams& p);
/// Geometric ratio r = lambda (beta + theta - lambda) / ((theta - lambda)(lambda + delta)).
double dam_ratio(const DamParams& p);
bool dam_is_stable(const DamParams& p);
TailCertificate dam_certificate(const DamParams& p);
/// Exact distribution on [0, n_max] with the exact omitted mass as tail_error.
/// Throws Error(kUnstable) unless lambda beta < (theta - lambda) delta.
StationaryDistribution dam_closed_form(const DamParams& p, Level n_max);

/// Symmetric discretized fluid buffer; equals the dam with lambda = unit_rate,
/// theta = 2 unit_rate.
RateSet fluid_queue_rate_set(double beta, double delta, double unit_rate);

// Telegraph process: phase B moves right (r), phase D moves left (l).
struct TelegraphParams {
  RateSpec up = RateSpec::constant(1.0);     // lambda_n
  RateSpec down = RateSpec::constant(1.0);   // mu_n
  RateSpec to_right = RateSpec::constant(1.0);  // beta_n (l -> r)
  RateSpec to_left = RateSpec::constant(1.0);   // delta_n (r -> l)
};

RateSet telegraph_rate_set(const TelegraphParams& p);
/// ell_k = lambda_k / (lambda_{k+1} + delta_{k+1})
double telegraph_ell(const TelegraphParams& p, Level k);
/// m_k = mu_k / (mu_k + beta_k)
double telegraph_m(const TelegraphParams& p, Level k);
/// x(0,r) = 1, x(n,r) = prod ell_{k-1}/m_k upward, inverse products downward,
/// x(n,l) = x(n,r) (lambda_n + delta_n)/(mu_n + beta_n).
WeightTable telegraph_closed_form(const TelegraphParams& p, Level n_min, Level n_max);

struct ControlSpec {
  RateSpec r = RateSpec::constant(2.0);
  RateSpec t = RateSpec::constant(2.0);
  RateSpec base_beta = RateSpec::constant(1.0);   // beta_n where it is not controlled
  RateSpec base_delta = RateSpec::constant(1.0);  // delta_n where it is not controlled
  double fill = 1.0;                               // delta_1, delta_2, beta_{-1}, beta_{-2}
  Level probe_max = 4096;
};

/// lambda = mu = eta. For k >= 3 (n = k - 1):
///   delta_k = beta_k + (1/n + r_n/(n ln n)) (eta + beta_k),
/// for k <= -3 (n = -k - 1):
///   beta_k = delta_k + (1/n + t_n/(n ln n)) (eta + delta_k).
/// Throws Error(kControlInvalid) if r_n or t_n <= 1 for some n in [2, probe_max].
RateSet stabilized_telegraph(double eta, const ControlSpec& c);

// Named presets.

struct PresetInfo {
  std::string name;
  std::string description;
  std::vector<std::pair<std::string, std::string>> defaults;
};

struct PresetInstance {
  std::string name;
  std::map<std::string, std::string> params;
  RateSet rates;
  std::vector<TailCertificate> certificates;
  /// Preset-specific closed form over [n_min, n_max], if the preset has one.
  std::function<WeightTable(Level, Level)> closed_form;
};

const std::vector<PresetInfo>& preset_catalog();

/// Throws Error(kConfig) for unknown names, unknown keys or malformed values.
PresetInstance make_preset(const std::string& name, const std::map<std::string, std::string>& overrides = {});

/// Parses "k=v" items, each possibly a comma-separated list "k1=v1,k2=v2".
std::map<std::string, std::string> parse_params(const std::vector<std::string>& items);

}  // namespace altbd
