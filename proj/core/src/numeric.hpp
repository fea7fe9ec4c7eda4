#pragma once

#include <cmath>
#include <span>

namespace bdmix::detail {

// Neumaier's variant of Kahan summation.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> v) noexcept {
  KahanSum acc;
  for (double x : v) acc.add(x);
  return acc.value();
}

}  // namespace bdmix::detail
