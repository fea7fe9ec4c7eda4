#include "bdmix/config.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "bdmix/errors.hpp"

namespace bdmix {
namespace {

std::atomic<double> g_tolerance{kDefaultTolerance};
std::atomic<std::size_t> g_workers{0};

}  // namespace

double tolerance() noexcept { return g_tolerance.load(std::memory_order_relaxed); }

void set_tolerance(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol) || tol >= 1e-2) {
    throw InvalidInput("tolerance must lie in (0, 1e-2)");
  }
  g_tolerance.store(tol, std::memory_order_relaxed);
}

std::size_t worker_count() noexcept {
  const std::size_t w = g_workers.load(std::memory_order_relaxed);
  if (w != 0) return w;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void set_worker_count(std::size_t workers) noexcept {
  g_workers.store(workers, std::memory_order_relaxed);
}

ScopedTolerance::ScopedTolerance(double tol) : saved_(tolerance()) { set_tolerance(tol); }

ScopedTolerance::~ScopedTolerance() { g_tolerance.store(saved_, std::memory_order_relaxed); }

}  // namespace bdmix
