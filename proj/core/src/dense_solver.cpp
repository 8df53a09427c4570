#include <algorithm>
#include <cmath>
#include <vector>

#include "altbd/error.hpp"
#include "altbd/stationary.hpp"

namespace altbd {

namespace {

void require_irreducible(const std::vector<std::vector<double>>& q) {
  const std::size_t n = q.size();
  for (bool forward : {true, false}) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack = {0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double rate = forward ? q[i][j] : q[j][i];
        if (rate > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error(ErrorKind::kSingularSystem, "truncated chain is not irreducible");
    }
  }
}

}  // namespace

StationaryDistribution dense_balance_solve(const RateSet& rates, Level n_min, Level n_max, StateOrder order) {
  const Topology& topo = rates.topology();
  if (topo.kind() == Topology::Kind::kFinite) {
    n_min = std::max<Level>(n_min, 0);
    n_max = std::min(n_max, topo.max_level());
  } else if (topo.kind() == Topology::Kind::kOneSided) {
    n_min = std::max<Level>(n_min, 0);
  }
  if (n_max - n_min < 1) throw Error(ErrorKind::kInvalidArgument, "truncation must cover at least two levels");

  std::vector<ChainState> states;
  for (Level n = n_min; n <= n_max; ++n) {
    states.push_back({n, Phase::B});
    states.push_back({n, Phase::D});
  }
  if (order == StateOrder::kLevelDescending) std::reverse(states.begin(), states.end());
  const std::size_t size = states.size();
  const auto index_of = [&](const ChainState& s) -> std::ptrdiff_t {
    if (s.level < n_min || s.level > n_max) return -1;
    const auto i = static_cast<std::size_t>(2 * (s.level - n_min) + (s.phase == Phase::D ? 1 : 0));
    return static_cast<std::ptrdiff_t>(order == StateOrder::kLevelDescending ? size - 1 - i : i);
  };

  std::vector<std::vector<double>> q(size, std::vector<double>(size, 0.0));
  for (std::size_t i = 0; i < size; ++i) {
    for (const auto& t : transitions(rates, states[i])) {
      const auto j = index_of(t.to);
      if (j >= 0) q[i][static_cast<std::size_t>(j)] += t.rate;
    }
  }
  require_irreducible(q);

  // Grassmann-Taksar-Heyman: censor states from the back; no subtractions.
  for (std::size_t k = size - 1; k > 0; --k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += q[k][j];
    if (!(s > 0.0)) throw Error(ErrorKind::kSingularSystem, "zero pivot in elimination");
    for (std::size_t i = 0; i < k; ++i) q[i][k] /= s;
    for (std::size_t i = 0; i < k; ++i) {
      const double f = q[i][k];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) q[i][j] += f * q[k][j];
      }
    }
  }
  std::vector<double> x(size, 0.0);
  x[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < size; ++k) {
    double v = 0.0;
    for (std::size_t i = 0; i < k; ++i) v += x[i] * q[i][k];
    x[k] = v;
    total += v;
  }

  StationaryDistribution d;
  d.topology = topo;
  d.n_min = n_min;
  d.n_max = n_max;
  d.prob_b.assign(static_cast<std::size_t>(n_max - n_min + 1), 0.0);
  d.prob_d.assign(d.prob_b.size(), 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const auto lvl = static_cast<std::size_t>(states[i].level - n_min);
    (states[i].phase == Phase::B ? d.prob_b : d.prob_d)[lvl] = x[i] / total;
  }
  d.log_normalizer = std::log(total);
  d.tail_error = 0.0;
  return d;
}

}  // namespace altbd
