#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

/// Same chain with `target` made absorbing (p = q = 0, r = 1 there).
Chain absorbing_variant(const Chain& chain, State target);

/// The chain read from n down to 0: p and q swap roles.
Chain reflect(const Chain& chain);

struct HittingLaw {
  /// P(tau = t) for t = 0..pmf.size()-1. Empty when the pmf was refused.
  std::vector<double> pmf;
  /// P(tau > pmf.size()-1), computed from the surviving mass.
  double tail = 0.0;
  double expectation = 0.0;
  double variance = 0.0;
  /// Certified bounds on |reported - true| for the two moments.
  double expectation_error = 0.0;
  double variance_error = 0.0;
  /// Geometric failure parameters, when the spectral form was used.
  std::optional<std::vector<double>> thetas;
  std::vector<std::string> diagnostics;
};

/// Law of the first time the chain started at `start` sits at `target`, by
/// dynamic programming on the transient states. Iterates until the surviving
/// mass drops below tail_tol. Throws InvalidInput when the target cannot be
/// reached almost surely.
HittingLaw hitting_pmf(const Chain& chain, State start, State target, double tail_tol = 1e-12);

/// Law of the hitting time of `target` from 0 as a sum of independent
/// geometric variables whose failure probabilities are the eigenvalues of the
/// block {0, ..., target-1}. When an eigenvalue is negative the moments are
/// still returned but the pmf is refused (left empty, with a diagnostic).
HittingLaw spectral_hitting(const Chain& chain, State target, double tail_tol = 1e-12);

/// prod_j (1 - theta_j) u / (1 - theta_j u).
double hitting_pgf(std::span<const double> thetas, double u);

/// Coefficients of u^0 .. u^horizon in the power series of hitting_pgf.
std::vector<double> hitting_pgf_series(std::span<const double> thetas, std::size_t horizon);

/// E_a tau_b from the one-step recursions E_k tau_{k+1} = (1 + q_k E_{k-1} tau_k) / p_k
/// (and the mirrored form when a > b). Throws InvalidInput if b is not reached a.s.
double expected_hitting_time(const Chain& chain, State a, State b);

/// P_x(tau_target > t) for every start x, advanced one step at a time.
class SurvivalFunction {
 public:
  SurvivalFunction(const Chain& chain, State target);
  std::size_t time() const noexcept { return time_; }
  std::span<const double> values() const noexcept { return s_; }
  double at(State x) const { return s_[x]; }
  void step();
  void advance(std::size_t h);

 private:
  Chain chain_;
  State target_;
  std::size_t time_ = 0;
  std::vector<double> s_;
  std::vector<double> scratch_;
};

struct MomentBoundsReport {
  /// Q(1 - eps).
  State quantile = 0;
  double expectation = 0.0;
  double variance = 0.0;
  /// 1 - largest eigenvalue of the block {0, ..., quantile-1}.
  double restricted_gap = 0.0;
  double gap = 0.0;
  /// Var <= E / restricted_gap.
  bool restricted_bound_holds = true;
  double restricted_bound = 0.0;
  /// Var <= E / (eps * gap).
  bool global_bound_holds = true;
  double global_bound = 0.0;
};
MomentBoundsReport hitting_moment_bounds(const Chain& chain, double eps);

}  // namespace bdmix
