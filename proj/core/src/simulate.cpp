#include "altbd/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "altbd/error.hpp"

namespace altbd {

namespace {

// Draws in [0, 1) from the top 53 bits; std distributions differ across
// standard libraries, so they are not used.
double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

double exponential(std::mt19937_64& g, double rate) { return -std::log1p(-uniform01(g)) / rate; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Occupancy {
 public:
  explicit Occupancy(Level start) : n_min_(start), b_(1, 0.0), d_(1, 0.0) {}

  void add(const ChainState& s, double dt) {
    grow_to(s.level);
    const auto i = static_cast<std::size_t>(s.level - n_min_);
    (s.phase == Phase::B ? b_ : d_)[i] += dt;
  }

  void move_into(OccupancyReport& r) {
    r.n_min = n_min_;
    r.occupancy_b = std::move(b_);
    r.occupancy_d = std::move(d_);
  }

 private:
  void grow_to(Level n) {
    if (n < n_min_) {
      const auto extra = static_cast<std::size_t>(n_min_ - n);
      b_.insert(b_.begin(), extra, 0.0);
      d_.insert(d_.begin(), extra, 0.0);
      n_min_ = n;
    }
    const auto need = static_cast<std::size_t>(n - n_min_) + 1;
    if (need > b_.size()) {
      b_.resize(need, 0.0);
      d_.resize(need, 0.0);
    }
  }

  Level n_min_;
  std::vector<double> b_;
  std::vector<double> d_;
};

}  // namespace

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kMaxEvents: return "MaxEvents";
    case Termination::kMaxTime: return "MaxTime";
    case Termination::kExplosionSuspected: return "ExplosionSuspected";
  }
  return "?";
}

double OccupancyReport::occupancy(Level n, Phase p) const {
  if (n < n_min || n > n_max()) return 0.0;
  const auto i = static_cast<std::size_t>(n - n_min);
  return p == Phase::B ? occupancy_b[i] : occupancy_d[i];
}

OccupancyReport simulate_path(const RateSet& rates, const SimConfig& cfg) {
  if (cfg.max_events < 1) throw Error(ErrorKind::kInvalidArgument, "max_events must be >= 1");
  if (!(cfg.max_time > 0.0)) throw Error(ErrorKind::kInvalidArgument, "max_time must be positive");
  if (cfg.level_guard <= std::abs(cfg.initial.level)) {
    throw Error(ErrorKind::kInvalidArgument, "level_guard must exceed |initial level|");
  }
  require_in_support(rates.topology(), cfg.initial);

  std::mt19937_64 gen(cfg.seed);
  OccupancyReport report;
  report.seed = cfg.seed;
  Occupancy occ(cfg.initial.level);
  ChainState s = cfg.initial;
  double t = 0.0;
  if (cfg.record_trace) report.trace.push_back({0.0, s});

  report.termination = Termination::kMaxEvents;
  while (report.events < cfg.max_events) {
    const auto out = transitions(rates, s);
    double total = 0.0;
    for (const auto& tr : out) total += tr.rate;
    if (!(total > 0.0)) throw Error(ErrorKind::kDeadState, "no transition out of " + to_string(s));

    const double hold = exponential(gen, total);
    if (t + hold >= cfg.max_time) {
      occ.add(s, cfg.max_time - t);
      t = cfg.max_time;
      report.termination = Termination::kMaxTime;
      break;
    }
    occ.add(s, hold);
    t += hold;

    const double pick = uniform01(gen) * total;
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < out.size(); ++k) {
      acc += out[k].rate;
      if (pick < acc) break;
    }
    s = out[k].to;
    ++report.events;
    if (cfg.record_trace) report.trace.push_back({t, s});
    if (std::abs(s.level) >= cfg.level_guard) {
      report.termination = Termination::kExplosionSuspected;
      break;
    }
  }
  occ.move_into(report);
  report.total_time = t;
  report.final_state = s;
  return report;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t i) {
  return splitmix64(master + static_cast<std::uint64_t>(i + 1) * 0x9E3779B97F4A7C15ULL);
}

std::vector<OccupancyReport> simulate_replications(const RateSet& rates, const SimConfig& cfg, std::size_t count,
                                                   unsigned threads) {
  std::vector<OccupancyReport> out(count);
  std::vector<std::exception_ptr> errors(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      SimConfig c = cfg;
      c.seed = replication_seed(cfg.seed, i);
      try {
        out[i] = simulate_path(rates, c);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

EmpiricalDistribution occupancy_distribution(const OccupancyReport& r) {
  if (!(r.total_time > 0.0)) throw Error(ErrorKind::kInvalidArgument, "report has no elapsed time");
  EmpiricalDistribution d;
  for (std::size_t i = 0; i < r.occupancy_b.size(); ++i) {
    const Level n = r.n_min + static_cast<Level>(i);
    if (r.occupancy_b[i] > 0.0) d[{n, Phase::B}] = r.occupancy_b[i] / r.total_time;
    if (r.occupancy_d[i] > 0.0) d[{n, Phase::D}] = r.occupancy_d[i] / r.total_time;
  }
  return d;
}

TvComparison compare_tv(const StationaryDistribution& analytic, const EmpiricalDistribution& empirical) {
  double sum = 0.0;
  for (Level n = analytic.n_min; n <= analytic.n_max; ++n) {
    for (Phase p : {Phase::B, Phase::D}) {
      const double a = analytic.probability(n, p);
      const auto it = empirical.find({n, p});
      sum += std::fabs(a - (it == empirical.end() ? 0.0 : it->second));
    }
  }
  for (const auto& [s, v] : empirical) {
    if (s.level < analytic.n_min || s.level > analytic.n_max) sum += v;
  }
  TvComparison c;
  c.distance = std::min(1.0, 0.5 * sum);
  c.bound = std::min(1.0, c.distance + analytic.tail_error);
  return c;
}

}  // namespace altbd
