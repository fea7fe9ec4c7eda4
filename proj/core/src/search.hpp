#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdmix/errors.hpp"
#include "bdmix/transition_powers.hpp"

namespace bdmix::detail {

// Slack when checking that a metric is nonincreasing in t.
inline constexpr double kMonotoneSlack = 1e-12;

// First t with metric(P^t) <= eps[i] for each i, for a metric that is
// nonincreasing in t. Doubles t until every level is reached, then bisects
// each bracket. Returns nullopt if the monotonicity check fails anywhere, so
// the caller can fall back to a linear scan.
template <class Metric>
std::optional<std::vector<std::size_t>> doubling_search(const Chain& chain, Metric&& metric,
                                                        std::span<const double> eps, std::size_t horizon,
                                                        const char* what) {
  std::vector<std::size_t> order(eps.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps[a] > eps[b]; });
  std::vector<std::size_t> out(eps.size(), 0);

  TransitionPowers a(chain);
  double da = metric(a);
  std::size_t next = 0;
  while (next < order.size() && da <= eps[order[next]]) out[order[next++]] = 0;

  // Bisection on (lo, lo + h]: metric(lo) > e >= metric(lo + h).
  auto bisect = [&](const TransitionPowers& lo_rows, double d_lo, std::size_t h, double d_hi,
                    double e) -> std::optional<std::size_t> {
    TransitionPowers lo = lo_rows;
    std::size_t width = h;
    while (width > 1) {
      const std::size_t half = width / 2;
      TransitionPowers mid = lo;
      mid.advance(half);
      const double dm = metric(mid);
      if (dm > d_lo + kMonotoneSlack || dm < d_hi - kMonotoneSlack) return std::nullopt;
      if (dm > e) {
        lo = std::move(mid);
        d_lo = dm;
        width -= half;
      } else {
        d_hi = dm;
        width = half;
      }
    }
    return lo.time() + 1;
  };

  std::size_t h = 1;
  while (next < order.size()) {
    if (a.time() >= horizon) {
      throw HorizonExceeded(std::string(what) + " not reached within " + std::to_string(horizon) + " steps",
                            horizon);
    }
    const std::size_t jump = std::min(h, horizon - a.time());
    TransitionPowers b = a;
    b.advance(jump);
    const double db = metric(b);
    if (db > da + kMonotoneSlack) return std::nullopt;
    while (next < order.size() && db <= eps[order[next]]) {
      const auto t = bisect(a, da, jump, db, eps[order[next]]);
      if (!t) return std::nullopt;
      out[order[next++]] = *t;
    }
    a = std::move(b);
    da = db;
    h *= 2;
  }
  return out;
}

// Same contract as doubling_search, by single steps. Never gives up on
// monotonicity.
template <class Metric>
std::vector<std::size_t> linear_search(const Chain& chain, Metric&& metric, std::span<const double> eps,
                                       std::size_t horizon, const char* what) {
  std::vector<std::size_t> out(eps.size(), 0);
  std::vector<bool> done(eps.size(), false);
  std::size_t remaining = eps.size();
  TransitionPowers a(chain);
  while (true) {
    const double d = metric(a);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      if (!done[i] && d <= eps[i]) {
        done[i] = true;
        out[i] = a.time();
        --remaining;
      }
    }
    if (remaining == 0) return out;
    if (a.time() >= horizon) {
      throw HorizonExceeded(std::string(what) + " not reached within " + std::to_string(horizon) + " steps",
                            horizon);
    }
    a.step();
  }
}

}  // namespace bdmix::detail
