#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "altbd/model.hpp"
#include "altbd/stationary.hpp"

namespace altbd {

struct SimConfig {
  std::uint64_t seed = 0;
  std::int64_t max_events = 1000000;
  double max_time = 1e300;
  Level level_guard = 1000000;
  ChainState initial{0, Phase::D};
  bool record_trace = false;
};

enum class Termination { kMaxEvents, kMaxTime, kExplosionSuspected };
std::string_view to_string(Termination t);

struct TraceEvent {
  double time = 0.0;
  ChainState state;

  bool operator==(const TraceEvent&) const = default;
};

struct OccupancyReport {
  static constexpr std::string_view kRngName = "mt19937_64";

  std::uint64_t seed = 0;
  std::string rng = std::string(kRngName);
  Level n_min = 0;  // occupancy covers [n_min, n_min + occupancy_b.size())
  std::vector<double> occupancy_b;
  std::vector<double> occupancy_d;
  double total_time = 0.0;
  std::int64_t events = 0;
  Termination termination = Termination::kMaxEvents;
  ChainState final_state;
  std::vector<TraceEvent> trace;  // filled only with SimConfig::record_trace

  double occupancy(Level n, Phase p) const;
  Level n_max() const { return n_min + static_cast<Level>(occupancy_b.size()) - 1; }

  bool operator==(const OccupancyReport&) const = default;
};

/// Event-driven path simulation. Stops at max_events, max_time, or once
/// |level| reaches level_guard. Throws Error(kDeadState) if the chain enters a
/// state with no outgoing rate.
OccupancyReport simulate_path(const RateSet& rates, const SimConfig& cfg);

/// Seed of replication i (0-based) derived from the master seed with
/// splitmix64(master + (i+1) * 0x9E3779B97F4A7C15).
std::uint64_t replication_seed(std::uint64_t master, std::size_t i);

/// Runs `count` independent replications on up to `threads` worker threads
/// (0 = hardware concurrency). Output order is replication order.
std::vector<OccupancyReport> simulate_replications(const RateSet& rates, const SimConfig& cfg, std::size_t count,
                                                   unsigned threads = 0);

using EmpiricalDistribution = std::map<ChainState, double>;

EmpiricalDistribution occupancy_distribution(const OccupancyReport& r);

struct TvComparison {
  double distance = 0.0;  // 1/2 sum |pi - pi_hat|
  double bound = 0.0;     // distance + analytic tail error
};

TvComparison compare_tv(const StationaryDistribution& analytic, const EmpiricalDistribution& empirical);

}  // namespace altbd
