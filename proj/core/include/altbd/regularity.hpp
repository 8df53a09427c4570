#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "altbd/model.hpp"
#include "altbd/series.hpp"

namespace altbd {

/// Coefficients of the Reuter recursions at level n. D, E drive the upward
/// step n -> n+1; B, C (two-sided only) drive the downward step -n -> -n-1.
struct RecursionCoeffs {
  double D = 0.0;
  double E = 0.0;
  std::optional<double> B_minus;
  std::optional<double> C_minus;
};

/// Throws Error(kDegenerateDenominator) when lambda_n M+_{n+1} + beta_{n+1}
/// kappa_n (or its mirrored counterpart) vanishes, and Error(kNumericalBreakdown)
/// if the closed forms of D + E and B + C disagree beyond 1e-12 relative.
RecursionCoeffs reuter_coeffs(const RateSet& rates, Level n);

/// One row of a recursion trace. On the downward side D and E hold B and C.
struct ReuterIterate {
  Level n = 0;
  double y_b = 0.0;
  double y_d = 0.0;
  double D = 0.0;
  double E = 0.0;
};

struct ReuterTrace {
  std::vector<ReuterIterate> iterates;
  bool exact_fallback = false;  // true if double precision lost positivity
};

/// Iterates from (y(0,b), y(0,d)) = (1, beta_0/(1+beta_0)) for `n_steps`
/// steps. If a double iterate turns nonpositive the whole run is redone in
/// exact rational arithmetic; non-finite values raise Error(kNumericalBreakdown).
ReuterTrace reuter_recursion_one_sided(const RateSet& rates, Level n_steps);

struct ExactIterate {
  Level n = 0;
  std::string y_b;  // "p/q" or "p"
  std::string y_d;
};

/// Same recursion in exact rational arithmetic over the binary values of the
/// rates.
std::vector<ExactIterate> reuter_recursion_one_sided_exact(const RateSet& rates, Level n_steps);

struct ReuterBounds {
  double log_lower = 0.0;  // sum_{k<=n} ln E_k
  double log_upper = 0.0;  // sum_{k<=n} ln(E_k + D_k)
  double lower() const;
  double upper() const;
};

/// Bounds on y(n+1,b) under the canonical start.
ReuterBounds reuter_bounds(const RateSet& rates, Level n);

/// Maximum relative residual of the original equations
///   Lambda+_n y(n,b) = lambda_n y(n+1,b) + delta_n y(n,d) + kappa_n y(n+1,d)
///   M+_n y(n,d)      = mu_n y(n-1,d) + beta_n y(n,b) + nu_n y(n-1,b)
/// over every equation whose terms are present in `iterates` (sorted by level,
/// contiguous).
double reuter_residual(const RateSet& rates, const std::vector<ReuterIterate>& iterates);

struct RegularityVerdict {
  enum class Kind { kNonExplosive, kExplosive, kInconclusive };

  Kind verdict = Kind::kInconclusive;
  std::vector<SeriesEvidence> series;  // labelled by the tested series
  Level trace_length = 0;
  std::optional<ReuterBounds> bounds;
  std::string note;
};

std::string_view to_string(RegularityVerdict::Kind k);

/// Series a_n = E_n - 1 (divergence => non-explosive), b_n = E_n + D_n - 1
/// (convergence => explosive). Exposed for tests and diagnostics.
SeriesTerms regularity_div_terms(const RateSet& rates);
SeriesTerms regularity_conv_terms(const RateSet& rates);
/// Mirrored series C_{-n} - 1 of the two-sided chain.
SeriesTerms regularity_negative_terms(const RateSet& rates);

RegularityVerdict regularity_one_sided(const RateSet& rates, Level w0 = 16, Level w1 = 4096, Level n_steps = 200,
                                       const LadderSettings& settings = {});

struct TwoSidedTrace {
  std::vector<ReuterIterate> up;    // anchor, anchor+1, ...
  std::vector<ReuterIterate> down;  // anchor, anchor-1, ...
  std::optional<Level> up_stopped_at;    // first level with a nonpositive iterate
  std::optional<Level> down_stopped_at;
  std::optional<Level> up_monotone_from;    // first level with y_b >= y_d
  std::optional<Level> down_monotone_from;  // first level with y_d >= y_b
};

TwoSidedTrace two_sided_recursion(const RateSet& rates, Level anchor_level, double y_b, double y_d, Level n_steps);

/// Never returns kExplosive.
RegularityVerdict regularity_two_sided(const RateSet& rates, Level w0 = 16, Level w1 = 4096,
                                       const LadderSettings& settings = {});

/// Dispatches on the topology; finite chains are trivially non-explosive.
RegularityVerdict regularity(const RateSet& rates, Level w0 = 16, Level w1 = 4096, Level n_steps = 200,
                             const LadderSettings& settings = {});

}  // namespace altbd
