#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "altbd/model.hpp"

namespace altbd {

enum class SeriesClass { kConvergent, kDivergent, kUndecided };
enum class LadderBranch { kNone, kGeometric, kNonVanishing, kBertrandDeMorgan };

std::string_view to_string(SeriesClass c);
std::string_view to_string(LadderBranch b);

struct LadderSettings {
  double epsilon = 1e-6;
  double floor_factor = 0.99;
};

/// A positive series given in log form. `log_step(n)` must equal
/// log_term(n) - log_term(n-1) but is evaluated directly so that ratios close
/// to 1 keep their relative accuracy.
struct SeriesTerms {
  std::function<double(Level)> log_term;
  std::function<double(Level)> log_step;
};

struct SeriesEvidence {
  std::string label;
  Level w0 = 0;
  Level w1 = 0;
  Level last = 0;  // last level actually evaluated (< w1 when truncated)
  bool truncated = false;
  std::string truncation_reason;

  std::vector<double> log_terms;         // ln a_n, n = w0..last
  std::vector<double> log_partial_sums;  // ln sum_{k=w0..n} a_k
  double sup_ratio = 0.0;                // over n in (w0, last]
  double inf_ratio = 0.0;
  double ratio_threshold = 0.0;
  double min_relative_term = 0.0;  // min_n a_n / a_w0
  std::vector<double> bdm;         // s_n, n = w0..last-1
  double bdm_min = 0.0;
  double bdm_max = 0.0;

  SeriesClass result = SeriesClass::kUndecided;
  LadderBranch branch = LadderBranch::kNone;
};

/// Decision ladder over the window [w0, w1]:
///  1. sup a_n/a_{n-1} <= 1 - max(eps, 1/w0)           -> convergent (geometric)
///  2. inf a_n >= floor_factor * a_{w0}                 -> divergent
///  3. s_n from a_n/a_{n+1} = 1 + 1/n + s_n/(n ln n):
///     min s_n > 1 + eps -> convergent, max s_n < 1 - eps -> divergent
///  4. otherwise undecided.
/// A NonFinite error while evaluating a term shortens the window instead of
/// propagating; the ladder then runs on what was obtained.
SeriesEvidence classify_series(const SeriesTerms& terms, Level w0, Level w1, const LadderSettings& settings = {});

}  // namespace altbd
