#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bdmix {

/// Index into the state space {0, ..., n}.
using State = std::size_t;

/// Which end of the state space a quantile is measured from.
enum class Side { left, right };

/// How a loop conductance enters the total weight of its state.
enum class LoopCounting { once, twice };

struct ChainFlags {
  bool irreducible = false;
  /// Every holding probability is at least 1/2.
  bool lazy = false;
  /// min_i r_i; the largest delta for which the chain is delta-lazy.
  double delta_lazy = 0.0;
  /// P(i,i+1) + P(i+1,i) <= 1 for every i < n.
  bool monotone = false;
  /// States with p_i = q_i = 0.
  std::vector<State> absorbing_states;
};

/// Probability vector over {0, ..., n}.
class Distribution {
 public:
  /// Validates non-negativity and unit mass (within the global tolerance).
  explicit Distribution(std::vector<double> weights);

  /// Wraps kernel output without re-validating it. Callers own the invariant.
  static Distribution adopt(std::vector<double> weights) noexcept;
  static Distribution point_mass(std::size_t size, State x);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](State i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::vector<double> release() && noexcept { return std::move(weights_); }

 private:
  struct Trusted {};
  Distribution(std::vector<double> weights, Trusted) noexcept : weights_(std::move(weights)) {}

  std::vector<double> weights_;
};

/// A birth-and-death chain on {0, ..., n}: from state i the chain moves to
/// i+1 with probability p_i, to i-1 with probability q_i and stays put with
/// probability r_i. Immutable once constructed.
class Chain {
 public:
  /// Validates and builds a chain; throws InvalidInput naming the offending
  /// index on a dimension mismatch, a negative/NaN entry or a bad row sum.
  static Chain create(std::vector<double> p, std::vector<double> q, std::vector<double> r);

  std::size_t n() const noexcept { return p_.size() - 1; }
  std::size_t size() const noexcept { return p_.size(); }

  std::span<const double> births() const noexcept { return p_; }
  std::span<const double> deaths() const noexcept { return q_; }
  std::span<const double> holds() const noexcept { return r_; }
  double birth(State i) const { return p_[i]; }
  double death(State i) const { return q_[i]; }
  double hold(State i) const { return r_[i]; }

  /// P(i, j); zero unless |i - j| <= 1.
  double transition(State i, State j) const;

  const ChainFlags& flags() const noexcept { return flags_; }
  bool irreducible() const noexcept { return flags_.irreducible; }
  bool lazy() const noexcept { return flags_.lazy; }

  friend bool operator==(const Chain& a, const Chain& b) {
    return a.p_ == b.p_ && a.q_ == b.q_ && a.r_ == b.r_;
  }

 private:
  Chain(std::vector<double> p, std::vector<double> q, std::vector<double> r);

  std::vector<double> p_;
  std::vector<double> q_;
  std::vector<double> r_;
  ChainFlags flags_;
};

inline Chain new_chain(std::vector<double> p, std::vector<double> q, std::vector<double> r) {
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

/// Reversible chain from edge conductances w(i,i+1) (n entries) and loop
/// weights (n+1 entries): P(i,j) = w(i,j)/w(i). With LoopCounting::once the
/// state weight is w(i) = loop_i + adjacent edges; `twice` doubles the loop.
Chain from_conductances(std::span<const double> edge_weights, std::span<const double> loop_weights,
                        LoopCounting loops = LoopCounting::once);

/// The kernel (P + I) / 2.
Chain lazy_version(const Chain& chain);

/// Stationary distribution of an irreducible chain, from the detailed-balance
/// product evaluated in log space. Throws ReducibleChain.
Distribution stationary(const Chain& chain);

/// Left: smallest k with pi[0..k] >= eps. Right: largest k with pi[k..n] >= eps.
/// Exact ties (within the global tolerance) qualify.
State quantile_state(std::span<const double> pi, double eps, Side side);
State quantile_state(const Chain& chain, double eps, Side side);

/// Compares the left quantile Q(eps) with the right quantile taken at 1 - eps.
/// The two agree unless a cumulative sum equals eps; such ties are reported.
struct QuantileSymmetry {
  State left = 0;
  State right_complement = 0;
  bool tie = false;
  bool consistent = true;
};
QuantileSymmetry quantile_symmetry(std::span<const double> pi, double eps);

ChainFlags classify(const Chain& chain);

}  // namespace bdmix
