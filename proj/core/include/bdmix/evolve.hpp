#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

Distribution step_distribution(const Chain& chain, const Distribution& dist);

/// P^t(x,.) by t sequential steps. `drift` is |mass - 1| before the final
/// renormalisation; it is reported in `drift_reported` once it exceeds 1e-9.
struct EvolvedRow {
  Distribution distribution;
  double drift = 0.0;
  bool drift_reported = false;
};
EvolvedRow distribution_at(const Chain& chain, State x, std::size_t t);

double tv_distance(std::span<const double> a, std::span<const double> b);
inline double tv_distance(const Distribution& a, const Distribution& b) {
  return tv_distance(a.weights(), b.weights());
}

struct WorstTv {
  double value = 0.0;
  State argmax = 0;
};
/// d(t), scanning every start. Ties go to the smallest start.
WorstTv worst_tv(const Chain& chain, std::size_t t);

/// d-bar(t): max over pairs of starts of the TV distance between their rows.
double pairwise_tv(const Chain& chain, std::size_t t);

struct MixingOptions {
  /// Step budget; 0 selects 10^4 * (n+1).
  std::size_t horizon = 0;
  /// Skip the doubling search and scan t = 0, 1, 2, ...
  bool linear_scan = false;
};

/// t_mix(eps) = min{t : d(t) <= eps}. Throws HorizonExceeded for chains that
/// do not get within eps in the budget.
std::size_t mixing_time(const Chain& chain, double eps, const MixingOptions& opts = {});

/// t_mix for several eps at once, sharing the power computations. Output is
/// aligned with `eps`.
std::vector<std::size_t> mixing_times(const Chain& chain, std::span<const double> eps,
                                      const MixingOptions& opts = {});

/// Continuous-time kernel row H_t(x,.) by uniformization. `tail_bound` is a
/// certified bound on the sup-norm error of `distribution`.
struct HeatKernelRow {
  Distribution distribution;
  std::size_t truncation = 0;
  double tail_bound = 0.0;
};
HeatKernelRow heat_kernel_row(const Chain& chain, State x, double t, double tol = 1e-12);

/// The kernel (1 - t/m) I + (t/m) P. Requires m >= 2t.
Chain binomial_kernel(const Chain& chain, double t, std::size_t m);

/// Row x of binomial_kernel(chain, t, m)^m.
Distribution binomial_heat_approx(const Chain& chain, State x, double t, std::size_t m);

struct DistanceProfile {
  std::vector<std::size_t> times;
  std::vector<double> d_tv;
  std::vector<double> d_sep;  // empty unless requested
  std::vector<double> d_bar;  // empty unless requested
};

struct ProfileOptions {
  /// Stop at the first t with d(t) <= until (inclusive).
  double until = 1e-3;
  /// Hard stop; 0 selects the mixing horizon 10^4 * (n+1).
  std::size_t max_time = 0;
  bool separation = false;
  bool pairwise = false;
};
/// d(t) for t = 0, 1, ... until d(t) <= opts.until. Throws HorizonExceeded if
/// max_time passes first.
DistanceProfile distance_profile(const Chain& chain, const ProfileOptions& opts = {});

/// Default step budget for mixing and separation searches.
std::size_t default_horizon(const Chain& chain);

}  // namespace bdmix
