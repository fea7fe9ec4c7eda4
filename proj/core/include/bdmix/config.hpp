#pragma once

#include <cstddef>

namespace bdmix {

inline constexpr double kDefaultTolerance = 1e-12;

/// Global tolerance for structural comparisons (row sums, laziness,
/// monotonicity, unimodality, quantile ties). Defaults to 1e-12.
double tolerance() noexcept;
void set_tolerance(double tol);

/// Worker count used by data-parallel loops (start-state scans, family rows,
/// Monte Carlo trials). 0 means "use hardware concurrency".
std::size_t worker_count() noexcept;
void set_worker_count(std::size_t workers) noexcept;

/// RAII override of the global tolerance, restored on scope exit.
class ScopedTolerance {
 public:
  explicit ScopedTolerance(double tol);
  ~ScopedTolerance();
  ScopedTolerance(const ScopedTolerance&) = delete;
  ScopedTolerance& operator=(const ScopedTolerance&) = delete;

 private:
  double saved_;
};

}  // namespace bdmix
