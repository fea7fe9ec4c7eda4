#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

enum class FamilyKind { lazy_srw, biased_walk, ehrenfest_like, pure_birth, custom };

struct FamilySpec {
  FamilyKind kind = FamilyKind::lazy_srw;
  std::size_t n = 1;
  /// Bias for biased_walk, in (1/2, 1).
  double beta = 2.0 / 3.0;
  /// Holding probabilities for pure_birth; n is taken from their count.
  std::vector<double> thetas;
  /// Builder for custom families, called with n.
  std::function<Chain(std::size_t)> custom;
  /// Label used in reports and file names.
  std::string name;
};

/// lazy_srw: p = q = 1/4 inside, ends hold 3/4. biased_walk: p = beta/2,
/// q = (1-beta)/2, r = 1/2 inside; ends keep the leftover mass. ehrenfest_like:
/// p_i = (n-i)/(2n), q_i = i/(2n), r = 1/2. pure_birth: p_i = 1 - theta_i,
/// r_i = theta_i, state n absorbing.
Chain generate(const FamilySpec& spec);

/// Parses "lazy_srw", "biased:0.6667", "ehrenfest" and "pure_birth:0.5,0.25".
FamilySpec parse_family(const std::string& text);

/// Pure-birth chain whose non-unit eigenvalues are exactly `thetas`.
Chain realize_eigenvalues(std::span<const double> thetas);

struct TightnessReport {
  Chain chain;
  /// h_m / (2 t_R).
  double K = 0.0;
  std::size_t k_floor = 0;
  /// 1 - 2/t_R, used floor(K) times.
  double lambda = 0.0;
  /// Used n - floor(K) times.
  double lambda_prime = 0.0;
  /// Eigenvalues of the unperturbed pure-birth chain, before taking the lazy version.
  std::vector<double> eigenvalues;
  /// Achieved by the returned (lazy) chain.
  double expected_hitting = 0.0;
  double t_rel = 0.0;
  /// floor(K) lambda / (1 - lambda)^2, for the chain before the lazy step.
  double variance_lower_bound = 0.0;
  bool irreducible = false;
};

/// Pure-birth chain with floor(K) eigenvalues at lambda and the rest at
/// lambda' chosen so that sum 1/(1 - lambda_i) = h_m / 2; every death
/// probability from state 1 up is then set to `perturb` (taken from the
/// holding mass where possible) and the lazy version is returned. Throws
/// InvalidInput naming the violated inequality when the triple is infeasible.
TightnessReport tightness_family(double h_m, double t_R, std::size_t n, double perturb = 1e-4);

}  // namespace bdmix
