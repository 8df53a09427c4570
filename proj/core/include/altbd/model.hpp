#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "altbd/rate_spec.hpp"

namespace altbd {

using Level = std::int64_t;

/// Environment phase. In phase B the level can only move up, in phase D only
/// down. The enumerator order fixes serialization order (B before D).
enum class Phase : std::uint8_t { B = 0, D = 1 };

constexpr Phase other(Phase p) noexcept { return p == Phase::B ? Phase::D : Phase::B; }
std::string_view to_string(Phase p);
Phase parse_phase(std::string_view text);

struct ChainState {
  Level level = 0;
  Phase phase = Phase::B;

  auto operator<=>(const ChainState&) const = default;
};

std::string to_string(const ChainState& s);

class Topology {
 public:
  enum class Kind { kOneSided, kTwoSided, kFinite };

  static Topology one_sided() { return Topology(Kind::kOneSided, 0); }
  static Topology two_sided() { return Topology(Kind::kTwoSided, 0); }
  static Topology finite(Level n);

  Kind kind() const noexcept { return kind_; }
  /// Highest level of a finite topology.
  Level max_level() const noexcept { return n_; }
  bool contains(Level level) const noexcept;
  bool is_infinite() const noexcept { return kind_ != Kind::kFinite; }
  std::string name() const;

  bool operator==(const Topology&) const = default;

 private:
  Topology(Kind kind, Level n) : kind_(kind), n_(n) {}
  Kind kind_;
  Level n_;
};

enum class RateKind : std::uint8_t { kLambda, kMu, kDelta, kBeta, kKappa, kNu };

inline constexpr RateKind kAllRateKinds[] = {RateKind::kLambda, RateKind::kMu,    RateKind::kDelta,
                                             RateKind::kBeta,   RateKind::kKappa, RateKind::kNu};

std::string_view to_string(RateKind k);

/// Level sums that appear throughout the closed forms:
/// total up-rate, total down-rate, and the Reuter "plus one" variants.
struct Aggregates {
  double up = 0.0;         // lambda_n + kappa_n
  double down = 0.0;       // mu_n + nu_n
  double up_plus = 0.0;    // 1 + lambda_n + kappa_n + delta_n
  double down_plus = 0.0;  // 1 + mu_n + nu_n + beta_n
};

struct Transition {
  ChainState to;
  double rate = 0.0;

  bool operator==(const Transition&) const = default;
};

/// The six level-dependent intensities of the alternating process, bound to a
/// topology.
///
///   (n,B) -> (n+1,B) lambda   (n,B) -> (n,D) delta   (n,B) -> (n+1,D) kappa
///   (n,D) -> (n-1,D) mu       (n,D) -> (n,B) beta    (n,D) -> (n-1,B) nu
///
/// Boundary rules are applied on every lookup: mu_0 = nu_0 = 0 on one-sided and
/// finite topologies, and lambda_N = kappa_N = 0 on finite(N). Unless
/// `allow_zeros` is set, every other rate must be strictly positive where it is
/// evaluated; zero values raise Error(kZeroRate).
class RateSet {
 public:
  struct Specs {
    RateSpec lambda;
    RateSpec mu;
    RateSpec delta;
    RateSpec beta;
    RateSpec kappa;
    RateSpec nu;
  };

  RateSet(Specs specs, Topology topology, bool allow_zeros = false);

  /// All six rates equal to `value`.
  static RateSet uniform(double value, Topology topology);

  const Topology& topology() const noexcept { return topology_; }
  bool allow_zeros() const noexcept { return allow_zeros_; }
  const Specs& specs() const noexcept { return specs_; }
  const RateSpec& spec(RateKind k) const;

  /// Rate at `n` with boundary rules applied. Throws Error(kOutOfSupport) if
  /// `n` is not a level of the topology.
  double rate(RateKind k, Level n) const;

  double lambda(Level n) const { return rate(RateKind::kLambda, n); }
  double mu(Level n) const { return rate(RateKind::kMu, n); }
  double delta(Level n) const { return rate(RateKind::kDelta, n); }
  double beta(Level n) const { return rate(RateKind::kBeta, n); }
  double kappa(Level n) const { return rate(RateKind::kKappa, n); }
  double nu(Level n) const { return rate(RateKind::kNu, n); }

  /// Same rates, uniformly multiplied by `factor` (> 0).
  RateSet scaled(double factor) const;

 private:
  Specs specs_;
  Topology topology_;
  bool allow_zeros_;
};

Aggregates aggregates(const RateSet& rates, Level n);

/// Off-diagonal generator entries out of `s`, zero rates omitted, in the order
/// lambda, delta, kappa (phase B) or mu, beta, nu (phase D).
std::vector<Transition> transitions(const RateSet& rates, const ChainState& s);

/// Sum of all rates out of `s`.
double exit_rate(const RateSet& rates, const ChainState& s);

void require_in_support(const Topology& topology, const ChainState& s);

}  // namespace altbd
