#include "bdmix/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bdmix/config.hpp"
#include "bdmix/errors.hpp"
#include "numeric.hpp"

namespace bdmix {
namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(15);
  os << x;
  return os.str();
}

void check_entries(const std::vector<double>& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw InvalidInput(std::string(name) + "[" + std::to_string(i) + "] is not finite");
    }
    if (v[i] < 0.0) {
      throw InvalidInput("negative entry " + std::string(name) + "[" + std::to_string(i) + "] = " + num(v[i]));
    }
    if (v[i] > 1.0) {
      throw InvalidInput("entry " + std::string(name) + "[" + std::to_string(i) + "] = " + num(v[i]) +
                         " exceeds 1");
    }
  }
}

}  // namespace

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidInput("distribution must have at least one state");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw InvalidInput("distribution weight " + std::to_string(i) + " = " + num(weights_[i]) +
                         " is not a non-negative number");
    }
  }
  const double total = detail::compensated_sum(weights_);
  const double slack = std::max(tolerance(), 1e-15 * static_cast<double>(weights_.size()));
  if (std::abs(total - 1.0) > slack) {
    throw InvalidInput("distribution sums to " + num(total) + ", not 1");
  }
}

Distribution Distribution::adopt(std::vector<double> weights) noexcept {
  return Distribution(std::move(weights), Trusted{});
}

Distribution Distribution::point_mass(std::size_t size, State x) {
  if (x >= size) throw InvalidInput("state " + std::to_string(x) + " out of range");
  std::vector<double> w(size, 0.0);
  w[x] = 1.0;
  return Distribution(std::move(w), Trusted{});
}

Chain Chain::create(std::vector<double> p, std::vector<double> q, std::vector<double> r) {
  if (p.size() != q.size() || p.size() != r.size()) {
    throw InvalidInput("dimension mismatch: p has " + std::to_string(p.size()) + " entries, q has " +
                       std::to_string(q.size()) + ", r has " + std::to_string(r.size()));
  }
  if (p.empty()) throw InvalidInput("a chain needs at least one state");
  check_entries(p, "p");
  check_entries(q, "q");
  check_entries(r, "r");
  const std::size_t n = p.size() - 1;
  if (q[0] != 0.0) throw InvalidInput("q[0] = " + num(q[0]) + " must be 0 (no state below 0)");
  if (p[n] != 0.0) {
    throw InvalidInput("p[" + std::to_string(n) + "] = " + num(p[n]) + " must be 0 (no state above n)");
  }
  const double tol = tolerance();
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = p[i] + q[i] + r[i];
    if (std::abs(s - 1.0) > tol) {
      throw InvalidInput("row " + std::to_string(i) + " sums to " + num(s));
    }
  }
  return Chain(std::move(p), std::move(q), std::move(r));
}

Chain::Chain(std::vector<double> p, std::vector<double> q, std::vector<double> r)
    : p_(std::move(p)), q_(std::move(q)), r_(std::move(r)) {
  flags_ = classify(*this);
}

double Chain::transition(State i, State j) const {
  if (i > n() || j > n()) throw InvalidInput("state out of range");
  if (j == i) return r_[i];
  if (j == i + 1) return p_[i];
  if (i == j + 1) return q_[i];
  return 0.0;
}

ChainFlags classify(const Chain& chain) {
  const double tol = tolerance();
  const std::size_t n = chain.n();
  const auto p = chain.births();
  const auto q = chain.deaths();
  const auto r = chain.holds();
  ChainFlags f;
  f.irreducible = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p[i] > 0.0) || !(q[i + 1] > 0.0)) f.irreducible = false;
  }
  f.delta_lazy = *std::min_element(r.begin(), r.end());
  f.lazy = f.delta_lazy >= 0.5 - tol;
  f.monotone = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] + q[i + 1] > 1.0 + tol) f.monotone = false;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (p[i] == 0.0 && q[i] == 0.0) f.absorbing_states.push_back(i);
  }
  return f;
}

Chain from_conductances(std::span<const double> edge_weights, std::span<const double> loop_weights,
                        LoopCounting loops) {
  if (loop_weights.empty()) throw InvalidInput("loop weights must have at least one entry");
  if (edge_weights.size() + 1 != loop_weights.size()) {
    throw InvalidInput("expected " + std::to_string(loop_weights.size() - 1) + " edge weights for " +
                       std::to_string(loop_weights.size()) + " loop weights, got " +
                       std::to_string(edge_weights.size()));
  }
  auto check = [](std::span<const double> v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]) || v[i] < 0.0) {
        throw InvalidInput(std::string(name) + " weight " + std::to_string(i) + " = " + num(v[i]) +
                           " is not a non-negative number");
      }
    }
  };
  check(edge_weights, "edge");
  check(loop_weights, "loop");

  const std::size_t n = edge_weights.size();
  const double loop_factor = loops == LoopCounting::twice ? 2.0 : 1.0;
  std::vector<double> p(n + 1, 0.0), q(n + 1, 0.0), r(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double up = i < n ? edge_weights[i] : 0.0;
    const double down = i > 0 ? edge_weights[i - 1] : 0.0;
    const double loop = loop_factor * loop_weights[i];
    const double w = up + down + loop;
    if (!(w > 0.0)) throw InvalidInput("isolated state " + std::to_string(i) + " (zero total weight)");
    p[i] = up / w;
    q[i] = down / w;
    r[i] = loop / w;
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

Chain lazy_version(const Chain& chain) {
  const std::size_t m = chain.size();
  std::vector<double> p(m), q(m), r(m);
  for (std::size_t i = 0; i < m; ++i) {
    p[i] = 0.5 * chain.birth(i);
    q[i] = 0.5 * chain.death(i);
    r[i] = 0.5 + 0.5 * chain.hold(i);
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

Distribution stationary(const Chain& chain) {
  if (!chain.irreducible()) throw ReducibleChain("stationary distribution requires an irreducible chain");
  const std::size_t m = chain.size();
  std::vector<double> logw(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    logw[i + 1] = logw[i] + std::log(chain.birth(i)) - std::log(chain.death(i + 1));
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = std::exp(logw[i] - top);
  const double total = detail::compensated_sum(w);
  for (double& x : w) x /= total;
  return Distribution::adopt(std::move(w));
}

State quantile_state(std::span<const double> pi, double eps, Side side) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1), got " + num(eps));
  if (pi.empty()) throw InvalidInput("empty distribution");
  const double tol = tolerance();
  if (side == Side::left) {
    detail::KahanSum acc;
    for (std::size_t k = 0; k < pi.size(); ++k) {
      acc.add(pi[k]);
      if (acc.value() >= eps - tol) return k;
    }
    return pi.size() - 1;
  }
  detail::KahanSum acc;
  for (std::size_t k = pi.size(); k-- > 0;) {
    acc.add(pi[k]);
    if (acc.value() >= eps - tol) return k;
  }
  return 0;
}

State quantile_state(const Chain& chain, double eps, Side side) {
  const Distribution pi = stationary(chain);
  return quantile_state(pi.weights(), eps, side);
}

QuantileSymmetry quantile_symmetry(std::span<const double> pi, double eps) {
  QuantileSymmetry out;
  out.left = quantile_state(pi, eps, Side::left);
  out.right_complement = quantile_state(pi, 1.0 - eps, Side::right);
  const double tol = tolerance();
  detail::KahanSum acc;
  for (std::size_t k = 0; k + 1 < pi.size(); ++k) {
    acc.add(pi[k]);
    if (std::abs(acc.value() - eps) <= tol) out.tie = true;
  }
  out.consistent = out.left == out.right_complement;
  return out;
}

}  // namespace bdmix
