#include "altbd/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "altbd/error.hpp"

namespace altbd {

std::string_view to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::kConvergent: return "convergent";
    case SeriesClass::kDivergent: return "divergent";
    case SeriesClass::kUndecided: return "undecided";
  }
  return "?";
}

std::string_view to_string(LadderBranch b) {
  switch (b) {
    case LadderBranch::kNone: return "none";
    case LadderBranch::kGeometric: return "geometric";
    case LadderBranch::kNonVanishing: return "non-vanishing";
    case LadderBranch::kBertrandDeMorgan: return "bertrand-de-morgan";
  }
  return "?";
}

namespace {

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

SeriesEvidence classify_series(const SeriesTerms& terms, Level w0, Level w1, const LadderSettings& settings) {
  if (w0 < 2 || w1 <= w0) throw Error(ErrorKind::kInvalidArgument, "series window needs w1 > w0 >= 2");
  SeriesEvidence ev;
  ev.w0 = w0;
  ev.w1 = w1;
  ev.ratio_threshold = 1.0 - std::max(settings.epsilon, 1.0 / static_cast<double>(w0));

  // Steps indexed like log_terms: steps[i] = ln a_{w0+i} - ln a_{w0+i-1}, steps[0] unused.
  std::vector<double> steps;
  try {
    const double first = terms.log_term(w0);
    if (!std::isfinite(first)) throw Error(ErrorKind::kNonFinite, "first term is not finite");
    ev.log_terms.push_back(first);
    steps.push_back(0.0);
    for (Level n = w0 + 1; n <= w1; ++n) {
      const double step = terms.log_step(n);
      if (!std::isfinite(step)) throw Error(ErrorKind::kNonFinite, "term ratio is not finite at n=" + std::to_string(n));
      const double lt = ev.log_terms.back() + step;
      if (!std::isfinite(lt)) throw Error(ErrorKind::kNonFinite, "term is not finite at n=" + std::to_string(n));
      ev.log_terms.push_back(lt);
      steps.push_back(step);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFinite) throw;
    ev.truncated = true;
    ev.truncation_reason = e.what();
  }
  if (ev.log_terms.empty()) {
    ev.last = w0 - 1;
    return ev;
  }
  ev.last = w0 + static_cast<Level>(ev.log_terms.size()) - 1;

  double acc = -std::numeric_limits<double>::infinity();
  for (double lt : ev.log_terms) {
    acc = log_add(acc, lt);
    ev.log_partial_sums.push_back(acc);
  }
  double min_rel = 0.0;
  for (double lt : ev.log_terms) min_rel = std::min(min_rel, lt - ev.log_terms.front());
  ev.min_relative_term = std::exp(min_rel);

  if (ev.log_terms.size() < 3) return ev;  // too short to say anything

  double sup_step = -std::numeric_limits<double>::infinity();
  double inf_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < steps.size(); ++i) {
    sup_step = std::max(sup_step, steps[i]);
    inf_step = std::min(inf_step, steps[i]);
  }
  ev.sup_ratio = std::exp(sup_step);
  ev.inf_ratio = std::exp(inf_step);

  ev.bdm_min = std::numeric_limits<double>::infinity();
  ev.bdm_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const double n = static_cast<double>(w0 + static_cast<Level>(i));
    const double s = (std::expm1(-steps[i + 1]) - 1.0 / n) * n * std::log(n);
    ev.bdm.push_back(s);
    ev.bdm_min = std::min(ev.bdm_min, s);
    ev.bdm_max = std::max(ev.bdm_max, s);
  }

  if (ev.sup_ratio <= ev.ratio_threshold) {
    ev.result = SeriesClass::kConvergent;
    ev.branch = LadderBranch::kGeometric;
  } else if (min_rel >= std::log(settings.floor_factor)) {
    ev.result = SeriesClass::kDivergent;
    ev.branch = LadderBranch::kNonVanishing;
  } else if (ev.bdm_min > 1.0 + settings.epsilon) {
    ev.result = SeriesClass::kConvergent;
    ev.branch = LadderBranch::kBertrandDeMorgan;
  } else if (ev.bdm_max < 1.0 - settings.epsilon) {
    ev.result = SeriesClass::kDivergent;
    ev.branch = LadderBranch::kBertrandDeMorgan;
  }
  return ev;
}

}  // namespace altbd
