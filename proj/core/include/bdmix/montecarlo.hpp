#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

struct SimConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t horizon = 1000;
};

/// Uniform variate in [0, 1) keyed by (seed, trial, step, stream). Stateless,
/// so trials can run in any order on any thread.
double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t step, std::uint64_t stream) noexcept;

/// X_0 = x, ..., X_horizon. One uniform per step, inverted over {down, hold, up}.
std::vector<State> sample_path(const Chain& chain, State x, std::size_t horizon, std::uint64_t seed);

/// (P - delta I) / (1 - delta). Throws InvalidInput if delta exceeds the
/// chain's smallest holding probability.
Chain thinned_kernel(const Chain& chain, double delta);

struct CouplingStats {
  /// First time the two copies share a state, per trial; censored trials
  /// hold horizon + 1.
  std::vector<std::size_t> coalescence;
  std::size_t censored = 0;
  /// Fraction of trials not coalesced by t, t = 0..horizon, and its standard
  /// error from the smoothed proportion (k+1)/(N+2).
  std::vector<double> survival;
  std::vector<double> survival_se;
  /// Steps at which the order of the copies strictly reversed.
  std::size_t crossings = 0;
};

/// Start x against a stationary partner; each step a fair coin picks which
/// copy moves, by the non-lazy kernel 2P - I. Needs a lazy irreducible chain.
CouplingStats no_crossing_coupling(const Chain& chain, State x, const SimConfig& config);

struct DeltaCouplingStats : CouplingStats {
  double delta = 0.0;
  /// Steps per move of the thinned chain; geometric with mean 1/(1-delta).
  double mean_multiplicity = 0.0;
  double multiplicity_se = 0.0;
  std::size_t multiplicity_samples = 0;
  /// Completed commute trips of the thinned path between Q(c) and Q(1-c)
  /// before coalescence, per trial.
  std::vector<std::size_t> commute_trips;
};

/// Shared uniform u per step: X moves if u < 1 - delta, the partner if
/// u >= delta, both by the thinned kernel. At delta = 1/2 exactly one moves.
DeltaCouplingStats delta_lazy_coupling(const Chain& chain, double delta, const SimConfig& config, State x = 0,
                                       double commute_eps = 0.25);

struct HittingSample {
  std::size_t completed = 0;
  std::size_t censored = 0;
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
  /// histogram[t] = number of trials with tau = t, t = 0..horizon.
  std::vector<std::size_t> histogram;
};
HittingSample empirical_hitting(const Chain& chain, State start, State target, const SimConfig& config);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
};
/// Two-sample Kolmogorov-Smirnov test; critical value c(alpha) sqrt((n+m)/(nm)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

}  // namespace bdmix
