#include "bdmix/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bdmix/config.hpp"
#include "bdmix/errors.hpp"
#include "bdmix/separation.hpp"
#include "bdmix/transition_powers.hpp"
#include "numeric.hpp"
#include "search.hpp"

namespace bdmix {
namespace {

void step_in_place(const Chain& c, const std::vector<double>& in, std::vector<double>& out) {
  const std::size_t m = c.size();
  out.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double v = in[j] * c.hold(j);
    if (j > 0) v += in[j - 1] * c.birth(j - 1);
    if (j + 1 < m) v += in[j + 1] * c.death(j + 1);
    out[j] = v;
  }
}

void check_state(const Chain& c, State x) {
  if (x > c.n()) {
    throw InvalidInput("state " + std::to_string(x) + " out of range [0, " + std::to_string(c.n()) + "]");
  }
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << "eps must lie in (0, 1), got " << eps;
    throw InvalidInput(os.str());
  }
}

}  // namespace

std::size_t default_horizon(const Chain& chain) { return 10000 * chain.size(); }

Distribution step_distribution(const Chain& chain, const Distribution& dist) {
  if (dist.size() != chain.size()) {
    throw InvalidInput("distribution has " + std::to_string(dist.size()) + " entries, chain has " +
                       std::to_string(chain.size()) + " states");
  }
  std::vector<double> in(dist.weights().begin(), dist.weights().end());
  std::vector<double> out;
  step_in_place(chain, in, out);
  return Distribution::adopt(std::move(out));
}

EvolvedRow distribution_at(const Chain& chain, State x, std::size_t t) {
  check_state(chain, x);
  std::vector<double> v(chain.size(), 0.0), next;
  v[x] = 1.0;
  for (std::size_t s = 0; s < t; ++s) {
    step_in_place(chain, v, next);
    v.swap(next);
  }
  const double mass = detail::compensated_sum(v);
  EvolvedRow out{Distribution::adopt({}), std::abs(mass - 1.0), false};
  out.drift_reported = out.drift > 1e-9;
  if (mass != 1.0 && mass > 0.0) {
    for (double& w : v) w /= mass;
  }
  out.distribution = Distribution::adopt(std::move(v));
  return out;
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("distributions differ in length");
  detail::KahanSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add(std::abs(a[i] - b[i]));
  return std::min(1.0, 0.5 * acc.value());
}

WorstTv worst_tv(const Chain& chain, std::size_t t) {
  const Distribution pi = stationary(chain);
  TransitionPowers rows(chain);
  rows.advance(t);
  WorstTv out;
  out.value = rows.worst_tv(pi.weights(), &out.argmax);
  return out;
}

double pairwise_tv(const Chain& chain, std::size_t t) {
  TransitionPowers rows(chain);
  rows.advance(t);
  return rows.pairwise_tv();
}

std::vector<std::size_t> mixing_times(const Chain& chain, std::span<const double> eps, const MixingOptions& opts) {
  for (double e : eps) check_eps(e);
  const Distribution pi = stationary(chain);
  const std::size_t horizon = opts.horizon ? opts.horizon : default_horizon(chain);
  auto metric = [&](const TransitionPowers& rows) { return rows.worst_tv(pi.weights()); };
  if (!opts.linear_scan) {
    if (auto fast = detail::doubling_search(chain, metric, eps, horizon, "mixing level")) return *fast;
  }
  return detail::linear_search(chain, metric, eps, horizon, "mixing level");
}

std::size_t mixing_time(const Chain& chain, double eps, const MixingOptions& opts) {
  const double e[1] = {eps};
  return mixing_times(chain, e, opts).front();
}

HeatKernelRow heat_kernel_row(const Chain& chain, State x, double t, double tol) {
  check_state(chain, x);
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("time must be a finite non-negative number");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  if (t == 0.0) return {Distribution::point_mass(chain.size(), x), 0, 0.0};

  // Chernoff: P(N >= k) <= exp(-t) (e t / k)^k for k > t.
  auto chernoff = [t](double k) { return std::exp(-t + k * (1.0 + std::log(t) - std::log(k))); };
  std::size_t trunc = static_cast<std::size_t>(std::ceil(t));
  while (chernoff(static_cast<double>(trunc + 1)) >= tol) ++trunc;
  const double tail = chernoff(static_cast<double>(trunc + 1));

  const std::size_t m = chain.size();
  std::vector<double> v(m, 0.0), next;
  v[x] = 1.0;
  std::vector<detail::KahanSum> acc(m);
  detail::KahanSum weight_total;
  const double log_t = std::log(t);
  for (std::size_t k = 0; k <= trunc; ++k) {
    if (k > 0) {
      step_in_place(chain, v, next);
      v.swap(next);
    }
    const double kk = static_cast<double>(k);
    const double w = std::exp(-t + kk * log_t - std::lgamma(kk + 1.0));
    weight_total.add(w);
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) acc[j].add(w * v[j]);
  }
  const double s = weight_total.value();
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = acc[j].value() / s;
  HeatKernelRow row{Distribution::adopt(std::move(out)), trunc, 0.0};
  // Renormalising moves each entry by at most tail / (1 - tail); the rest is
  // accumulated rounding.
  row.tail_bound = tail / (1.0 - tail) + static_cast<double>(trunc + 2) * std::numeric_limits<double>::epsilon();
  return row;
}

Chain binomial_kernel(const Chain& chain, double t, std::size_t m) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("time must be a finite non-negative number");
  if (static_cast<double>(m) < 2.0 * t) {
    std::ostringstream os;
    os << "binomial approximation needs m >= 2t (m = " << m << ", t = " << t << ")";
    throw InvalidInput(os.str());
  }
  const std::size_t size = chain.size();
  std::vector<double> p(size), q(size), r(size);
  const double a = m == 0 ? 0.0 : t / static_cast<double>(m);
  for (std::size_t i = 0; i < size; ++i) {
    p[i] = a * chain.birth(i);
    q[i] = a * chain.death(i);
    r[i] = (1.0 - a) + a * chain.hold(i);
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

Distribution binomial_heat_approx(const Chain& chain, State x, double t, std::size_t m) {
  const Chain q = binomial_kernel(chain, t, m);
  return distribution_at(q, x, t == 0.0 ? 0 : m).distribution;
}

DistanceProfile distance_profile(const Chain& chain, const ProfileOptions& opts) {
  if (!(opts.until > 0.0 && opts.until < 1.0)) throw InvalidInput("profile threshold must lie in (0, 1)");
  const Distribution pi = stationary(chain);
  const std::size_t horizon = opts.max_time ? opts.max_time : default_horizon(chain);
  DistanceProfile prof;
  TransitionPowers rows(chain);
  while (true) {
    const double d = rows.worst_tv(pi.weights());
    prof.times.push_back(rows.time());
    prof.d_tv.push_back(d);
    if (opts.separation) prof.d_sep.push_back(separation_report(rows, pi.weights()).worst);
    if (opts.pairwise) prof.d_bar.push_back(rows.pairwise_tv());
    if (d <= opts.until) break;
    if (rows.time() >= horizon) {
      throw HorizonExceeded("distance did not fall to the threshold within " + std::to_string(horizon) + " steps",
                            horizon);
    }
    rows.step();
  }
  return prof;
}

}  // namespace bdmix
