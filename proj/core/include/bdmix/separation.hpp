#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bdmix/chain.hpp"
#include "bdmix/transition_powers.hpp"

namespace bdmix {

/// max_y (1 - P^t(x,y)/pi(y)). Rounding-level negatives are clipped to 0;
/// anything below -tolerance throws NumericalError.
double separation_at(const Chain& chain, State x, std::size_t t);

struct SeparationReport {
  std::size_t t = 0;
  /// Separation from each start, and the target attaining it (smallest index).
  std::vector<double> per_start;
  std::vector<State> per_start_target;
  double worst = 0.0;
  /// Lexicographically smallest maximising (start, target).
  std::pair<State, State> argmax_pair{0, 0};
  /// Every pair within the global tolerance of `worst`.
  std::vector<std::pair<State, State>> attaining;
  /// 1 - P^t(0,n)/pi(n).
  double endpoint_value = 0.0;
  /// worst == endpoint_value within tolerance.
  bool endpoint_attains = false;
  /// worst is attained from start 0 or start n.
  bool endpoint_start_attains = false;
  /// Entries clipped from a tiny negative value to 0.
  std::size_t clipped = 0;
};

/// Full (x, y) scan at time t.
SeparationReport worst_separation(const Chain& chain, std::size_t t);
/// Same scan on precomputed rows.
SeparationReport separation_report(const TransitionPowers& rows, std::span<const double> pi);

/// |P^t(0,n)/pi(n) - P^t(n,0)/pi(0)| <= tolerance.
bool separation_symmetry_check(const Chain& chain, std::size_t t);

struct SeparationTimeOptions {
  /// Step budget; 0 selects 10^4 * (n+1).
  std::size_t horizon = 0;
  /// For lazy chains also run the full scan and throw NumericalError if the
  /// endpoint shortcut disagrees with it.
  bool audit = false;
};
/// Least t with worst separation <= eps. Lazy chains follow the endpoint
/// column only; other chains are scanned in full.
std::size_t separation_time(const Chain& chain, double eps, const SeparationTimeOptions& opts = {});

/// The vector P f.
std::vector<double> apply_kernel(const Chain& chain, std::span<const double> f);

/// Nondecreasing then nonincreasing with plateaus allowed; comparisons use
/// the global tolerance scaled by max(1, max |v|). `mode` is the smallest
/// maximising index and is empty when v is not unimodal or empty.
struct Unimodality {
  bool unimodal = false;
  std::optional<State> mode;
};
Unimodality is_unimodal(std::span<const double> v);

struct StructureCheck {
  bool applicable = false;
  bool holds = true;
  /// First index (or start) at which the check fails.
  std::optional<std::size_t> first_violation;
};

struct LikelihoodRatioReport {
  std::size_t t = 0;
  /// Monotone chains: P^t(k,0) >= P^t(k+1,0) for every k.
  StructureCheck column_zero_decreasing;
  /// Monotone chains: P^t(0,k)/pi(k) nonincreasing in k.
  StructureCheck ratio_from_zero_decreasing;
  /// Lazy chains: P^t(s,.)/pi unimodal for every start s.
  StructureCheck ratios_unimodal;
  /// Mode of P^t(s,.)/pi for each s (when unimodal).
  std::vector<std::optional<State>> modes;
};
LikelihoodRatioReport likelihood_ratio_checks(const Chain& chain, std::size_t t);
LikelihoodRatioReport likelihood_ratio_checks(const Chain& chain, const TransitionPowers& rows,
                                              std::span<const double> pi);

}  // namespace bdmix
