#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "bdmix/chain.hpp"

namespace bdmix {

/// All n+1 rows of P^t, stored densely and advanced in time. Small jumps are
/// taken by tridiagonal stepping (O(n^2) per step); long power-of-two jumps
/// multiply by a cached P^(2^k), which costs O(n^3) once.
class TransitionPowers {
 public:
  explicit TransitionPowers(const Chain& chain);

  std::size_t time() const noexcept { return time_; }
  std::size_t size() const noexcept { return m_; }

  std::span<const double> row(State x) const { return {rows_.data() + x * m_, m_}; }
  double at(State x, State y) const { return rows_[x * m_ + y]; }

  void step();
  /// Moves from t to t + h.
  void advance(std::size_t h);

  /// max_x TV(P^t(x,.), pi) and the smallest maximising start.
  double worst_tv(std::span<const double> pi, State* argmax = nullptr) const;
  /// max over ordered pairs of TV(P^t(x,.), P^t(y,.)).
  double pairwise_tv() const;

 private:
  const std::vector<double>& power_of_two(unsigned k);

  Chain chain_;
  std::size_t m_;
  std::size_t time_ = 0;
  std::vector<double> rows_;
  // powers_->at(k) = P^(2^k); shared between copies.
  std::shared_ptr<std::vector<std::vector<double>>> powers_;
};

}  // namespace bdmix
