#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bdmix/chain.hpp"
#include "bdmix/families.hpp"

namespace bdmix {

/// One chain's mixing summary. Vectors are aligned with `eps`.
struct FamilyRow {
  std::size_t n = 0;
  std::vector<double> eps;
  std::vector<std::size_t> t_mix;             // t_mix(eps)
  std::vector<std::size_t> t_mix_complement;  // t_mix(1 - eps)
  std::size_t t_mix_quarter = 0;
  double t_rel = 0.0;
  double gap = 0.0;
  /// gap * t_mix(1/4).
  double product = 0.0;
  std::vector<double> window;  // t_mix(eps) - t_mix(1 - eps)
  std::vector<double> ratio;   // t_mix(eps) / t_mix(1 - eps); infinite when the denominator is 0
  std::vector<double> normalized_window;  // window / sqrt(t_rel t_mix(1/4))
  bool ok = true;
  std::string error;
};

/// Every eps must lie in (0, 1/2]. Propagates HorizonExceeded.
FamilyRow analyze_chain(const Chain& chain, std::span<const double> eps_grid);

struct TrendSummary {
  double eps = 0.0;
  /// Least-squares slope of ratio(eps) against log n.
  double ratio_slope = 0.0;
  bool ratio_strictly_decreasing = false;
  /// Finite-size cutoff signature: negative slope and strictly decreasing ratios.
  bool cutoff_trend = false;
};

struct FamilyReport {
  std::string family;
  std::vector<double> eps;
  std::vector<FamilyRow> rows;  // in the order of `sizes`
  std::vector<TrendSummary> trends;
  bool product_strictly_increasing = false;
  /// max / min of gap * t_mix(1/4) across successful rows.
  double product_spread = 0.0;
};

/// Rows are computed independently (in parallel); a failing row is recorded
/// with ok = false and the scan continues.
FamilyReport family_scan(const FamilySpec& family, std::span<const std::size_t> sizes,
                         std::span<const double> eps_grid);

/// Window inequality with the explicit constant c_eps = max(c1, c2).
struct WindowVerdict {
  double epsilon = 0.0;
  double lhs = 0.0;  // t_mix(eps) - t_mix(1 - eps)
  double rhs = 0.0;  // c_eps sqrt(t_rel t_mix(1/4))
  double c1 = 0.0;
  double c2 = 0.0;
  double c_eps_used = 0.0;
  /// t_rel < eps^5 t_mix(1/4).
  bool effective_regime = false;
  /// Sharper form, checked when in the effective regime with eps < 1/16:
  /// t_mix(4 eps) - t_mix(1 - 2 eps) <= (6/eps) sqrt(t_rel t_mix(1/4)).
  bool sharper_checked = false;
  double sharper_lhs = 0.0;
  double sharper_rhs = 0.0;
  bool sharper_holds = true;
  /// Main inequality and, when checked, the sharper one.
  bool holds = false;
  std::size_t t_mix_eps = 0;
  std::size_t t_mix_complement = 0;
  std::size_t t_mix_quarter = 0;
  double t_rel = 0.0;
};

/// Requires 0 < eps < 1/2 and a lazy irreducible chain.
WindowVerdict window_bound_check(const Chain& chain, double eps);

enum class CheckStatus { holds, violated, not_applicable };
const char* to_string(CheckStatus s);

struct LemmaCheck {
  std::string id;
  std::string description;
  CheckStatus status = CheckStatus::not_applicable;
  /// False for checks recorded for comparison only; a violation of those does
  /// not indicate a bug.
  bool theorem_backed = true;
  /// min(rhs - lhs) over everything evaluated (negative when violated).
  double slack = 0.0;
  std::string note;
};

struct LemmaSuiteOptions {
  /// Above this many multiply-adds the all-starts check runs on a time grid.
  double full_scan_budget = 2e8;
  std::size_t grid_points = 128;
  /// Levels for the spectral lower bound, in addition to eps itself.
  std::vector<double> spectral_levels{0.25, 0.1, 0.01};
  /// Largest chain for which d-bar sub-multiplicativity is checked pairwise.
  std::size_t pairwise_limit = 64;
};

struct LemmaSuiteReport {
  double eps = 0.0;
  std::vector<LemmaCheck> checks;
  bool theorem_violation() const;
  const LemmaCheck& at(const std::string& id) const;
};

/// Checks a-g on a lazy irreducible chain:
///  a  TV(P^t(0,.), pi) <= P_0(tau_Q(1-eps) > t) + eps
///  b  TV(P^t(k,.), pi) <= P_k(tau_Q(eps) > t) + P_k(tau_Q(1-eps) > t) + 2 eps
///  c  t_mix(1/4) <= 16 max(E_0 tau_Q(1-eps), E_n tau_Q(eps))           (eps < 1/16)
///  d  E_Q(a) tau_Q(b) <= 3/(2 eps) sqrt(t_rel E_0 tau_Q(1/2))          (eps < 1/16,
///     t_rel < eps^4 E_0 tau_Q(1-eps); a < b on {eps, 1/4, 1/2, 3/4, 1-eps})
///  e  t_mix(e) >= (t_rel - 1) log(1/(2e))
///  f  t_mix(eps) <= t_mix(1/4) ceil(log2(1/eps) / 2)   (eps < 1/4; not theorem-backed)
///  g  dbar(s+t) <= dbar(s) dbar(t) and t_mix(eps) <= t_mix(1/4) ceil(log2(1/eps))
LemmaSuiteReport lemma_suite(const Chain& chain, double eps, const LemmaSuiteOptions& opts = {});

}  // namespace bdmix
