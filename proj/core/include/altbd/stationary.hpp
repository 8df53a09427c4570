#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "altbd/model.hpp"
#include "altbd/series.hpp"

namespace altbd {

/// Which weight is pinned to 1.
enum class WeightReference { kZeroD, kZeroB };

/// Unnormalized stationary weights x(n, phase), stored as natural logs over a
/// contiguous level range.
class WeightTable {
 public:
  WeightTable(Topology topology, Level n_min, Level n_max, WeightReference reference);

  const Topology& topology() const noexcept { return topology_; }
  Level n_min() const noexcept { return n_min_; }
  Level n_max() const noexcept { return n_max_; }
  WeightReference reference() const noexcept { return reference_; }
  bool contains(Level n) const noexcept { return n >= n_min_ && n <= n_max_; }

  double log_weight(Level n, Phase p) const;
  double weight(Level n, Phase p) const;
  void set_log_weight(Level n, Phase p, double value);

 private:
  std::size_t index(Level n) const;

  Topology topology_;
  Level n_min_;
  Level n_max_;
  WeightReference reference_;
  std::vector<double> log_b_;
  std::vector<double> log_d_;
};

WeightTable one_sided_weights(const RateSet& rates, Level n_max);
WeightTable two_sided_weights(const RateSet& rates, Level n_min, Level n_max);
WeightTable finite_weights(const RateSet& rates);

/// Dispatches on the topology. For finite(N) the range arguments are ignored.
WeightTable closed_form_weights(const RateSet& rates, Level n_min, Level n_max);

enum class TailSide { kPositive, kNegative };
std::string_view to_string(TailSide s);

/// Claim that the level mass m(n) = x(n,b) + x(n,d) decays at least
/// geometrically with ratio rho_bar beyond level n0 (|n| > n0 on the negative
/// side).
struct TailCertificate {
  Level n0 = 0;
  double rho_bar = 0.5;
  TailSide side = TailSide::kPositive;
};

struct StationaryDistribution {
  Topology topology = Topology::one_sided();
  Level n_min = 0;
  Level n_max = 0;
  std::vector<double> prob_b;  // indexed by n - n_min
  std::vector<double> prob_d;
  double log_normalizer = 0.0;  // ln C, in units of the reference weight
  double tail_error = 0.0;

  double probability(Level n, Phase p) const;
  double total_mass() const;
};

StationaryDistribution normalize(const WeightTable& w, const std::vector<TailCertificate>& certs);

struct ErgodicityVerdict {
  enum class Kind { kErgodic, kNotErgodic, kInconclusive };

  Kind verdict = Kind::kInconclusive;
  Level w0 = 0;
  Level w1 = 0;
  std::vector<SeriesEvidence> sides;  // positive side first
  std::vector<TailCertificate> certificates;
  std::string note;
};

std::string_view to_string(ErgodicityVerdict::Kind k);

/// The criterion series sum_n a_n with a_n proportional to x(n,b) + x(n+1,d).
/// Finite topologies are always ergodic.
ErgodicityVerdict ergodicity(const RateSet& rates, Level w0 = 16, Level w1 = 4096,
                             const LadderSettings& settings = {});

/// Series terms used by `ergodicity`, exposed for diagnostics and tests.
SeriesTerms ergodicity_terms(const RateSet& rates, TailSide side);

/// Maximum relative violation of the global balance equations whose source
/// states all lie in the table's range (or outside the topology).
double balance_residual(const WeightTable& w, const RateSet& rates);

enum class StateOrder { kLevelAscending, kLevelDescending };

/// Stationary distribution of the chain restricted to [n_min, n_max] by
/// dropping every transition that leaves the range, solved with the
/// Grassmann-Taksar-Heyman elimination. Throws Error(kSingularSystem) if the
/// truncated chain is not irreducible.
StationaryDistribution dense_balance_solve(const RateSet& rates, Level n_min, Level n_max,
                                           StateOrder order = StateOrder::kLevelAscending);

}  // namespace altbd
