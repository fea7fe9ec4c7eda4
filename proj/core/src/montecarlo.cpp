#include "bdmix/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdmix/config.hpp"
#include "bdmix/errors.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

namespace bdmix {
namespace {

// Streams of the counter-based generator.
constexpr std::uint64_t kCoin = 0;
constexpr std::uint64_t kStart = 1;
constexpr std::uint64_t kMove = 2;
constexpr std::uint64_t kPartnerMove = 3;
constexpr std::uint64_t kPath = 4;

std::uint64_t mix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_config(const SimConfig& cfg) {
  if (cfg.trials == 0) throw InvalidInput("trials must be at least 1");
  if (cfg.horizon == 0) throw InvalidInput("horizon must be at least 1");
}

void check_state(const Chain& c, State x, const char* what) {
  if (x > c.n()) {
    throw InvalidInput(std::string(what) + " " + std::to_string(x) + " out of range [0, " + std::to_string(c.n()) +
                       "]");
  }
}

// Inverse CDF over {down, hold, up}.
State move(const Chain& c, State x, double u) {
  if (u < c.death(x)) return x - 1;
  if (u < c.death(x) + c.hold(x) || !(c.birth(x) > 0.0)) return x;
  return x + 1;
}

State draw(std::span<const double> cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<State>(static_cast<State>(it - cdf.begin()), cdf.size() - 1);
}

std::vector<double> cumulative(const Distribution& pi) {
  std::vector<double> cdf(pi.size());
  detail::KahanSum acc;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    acc.add(pi[i]);
    cdf[i] = acc.value();
  }
  return cdf;
}

int sign(State a, State b) { return a < b ? -1 : (a > b ? 1 : 0); }

void summarize(CouplingStats& s, std::size_t trials, std::size_t horizon) {
  s.censored = static_cast<std::size_t>(
      std::count_if(s.coalescence.begin(), s.coalescence.end(), [&](std::size_t t) { return t > horizon; }));
  std::vector<std::size_t> met(horizon + 2, 0);
  for (std::size_t t : s.coalescence) ++met[std::min(t, horizon + 1)];
  s.survival.resize(horizon + 1);
  s.survival_se.resize(horizon + 1);
  const double N = static_cast<double>(trials);
  std::size_t coalesced = 0;
  for (std::size_t t = 0; t <= horizon; ++t) {
    coalesced += met[t];
    const double alive = static_cast<double>(trials - coalesced);
    s.survival[t] = alive / N;
    const double smooth = (alive + 1.0) / (N + 2.0);
    s.survival_se[t] = std::sqrt(smooth * (1.0 - smooth) / N);
  }
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t trial, std::uint64_t step, std::uint64_t stream) noexcept {
  std::uint64_t h = mix(seed);
  h = mix(h ^ trial);
  h = mix(h ^ (step * 0xd1342543de82ef95ULL));
  h = mix(h ^ (stream + 0x632be59bd9b4e019ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<State> sample_path(const Chain& chain, State x, std::size_t horizon, std::uint64_t seed) {
  check_state(chain, x, "start");
  std::vector<State> path(horizon + 1);
  path[0] = x;
  for (std::size_t t = 1; t <= horizon; ++t) path[t] = move(chain, path[t - 1], counter_uniform(seed, 0, t, kPath));
  return path;
}

Chain thinned_kernel(const Chain& chain, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in [0, 1)");
  const double tol = tolerance();
  if (delta > chain.flags().delta_lazy + tol) {
    std::ostringstream os;
    os.precision(17);
    os << "delta = " << delta << " exceeds the chain's laziness min r_i = " << chain.flags().delta_lazy;
    throw InvalidInput(os.str());
  }
  const std::size_t m = chain.size();
  const double scale = 1.0 - delta;
  std::vector<double> p(m), q(m), r(m);
  for (State i = 0; i < m; ++i) {
    p[i] = chain.birth(i) / scale;
    q[i] = chain.death(i) / scale;
    r[i] = (chain.hold(i) - delta) / scale;
    if (r[i] < tol) r[i] = 0.0;
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

CouplingStats no_crossing_coupling(const Chain& chain, State x, const SimConfig& config) {
  check_config(config);
  check_state(chain, x, "start");
  if (!chain.lazy()) throw InvalidInput("the fair-coin coupling needs a lazy chain (every r_i >= 1/2)");
  if (!chain.irreducible()) throw ReducibleChain("the coupling needs an irreducible chain");
  const Chain fast = thinned_kernel(chain, 0.5);
  const std::vector<double> cdf = cumulative(stationary(chain));
  const std::size_t H = config.horizon;

  CouplingStats s;
  s.coalescence.assign(config.trials, H + 1);
  std::vector<std::size_t> crossings(config.trials, 0);
  detail::parallel_for(
      config.trials,
      [&](std::size_t trial) {
        State a = x;
        State b = draw(cdf, counter_uniform(config.seed, trial, 0, kStart));
        if (a == b) {
          s.coalescence[trial] = 0;
          return;
        }
        for (std::size_t t = 1; t <= H; ++t) {
          const int before = sign(a, b);
          const double u = counter_uniform(config.seed, trial, t, kMove);
          if (counter_uniform(config.seed, trial, t, kCoin) < 0.5) {
            a = move(fast, a, u);
          } else {
            b = move(fast, b, u);
          }
          const int after = sign(a, b);
          if (after != 0 && after != before) ++crossings[trial];
          if (a == b) {
            s.coalescence[trial] = t;
            return;
          }
        }
      },
      64);
  for (std::size_t c : crossings) s.crossings += c;
  summarize(s, config.trials, H);
  return s;
}

DeltaCouplingStats delta_lazy_coupling(const Chain& chain, double delta, const SimConfig& config, State x,
                                       double commute_eps) {
  check_config(config);
  check_state(chain, x, "start");
  if (!(delta > 0.0)) throw InvalidInput("delta must be positive");
  if (!(commute_eps > 0.0 && commute_eps <= 0.5)) throw InvalidInput("commute_eps must lie in (0, 1/2]");
  if (!chain.irreducible()) throw ReducibleChain("the coupling needs an irreducible chain");
  const Chain fast = thinned_kernel(chain, delta);
  const Distribution pi = stationary(chain);
  const std::vector<double> cdf = cumulative(pi);
  const State low = quantile_state(pi.weights(), commute_eps, Side::left);
  const State high = quantile_state(pi.weights(), 1.0 - commute_eps, Side::left);
  const std::size_t H = config.horizon;

  DeltaCouplingStats s;
  s.delta = delta;
  s.coalescence.assign(config.trials, H + 1);
  s.commute_trips.assign(config.trials, 0);
  std::vector<std::size_t> crossings(config.trials, 0);
  // Per trial: number of completed geometric waits, their sum and sum of squares.
  std::vector<std::size_t> waits(config.trials, 0);
  std::vector<double> wsum(config.trials, 0.0), wsq(config.trials, 0.0);

  detail::parallel_for(
      config.trials,
      [&](std::size_t trial) {
        State a = x;
        State b = draw(cdf, counter_uniform(config.seed, trial, 0, kStart));
        if (a == b) {
          s.coalescence[trial] = 0;
          return;
        }
        // A trip is [0, low] -> [high, n] -> [0, low]. phase 1: seen low,
        // phase 2: seen high after low.
        int phase = a <= low ? 1 : 0;
        std::size_t since_move = 0;
        // The wait in progress when the trial stops is run to completion on
        // the coin stream alone. Dropping it would favour short waits.
        const auto finish_wait = [&](std::size_t t) {
          for (;;) {
            ++since_move;
            if (counter_uniform(config.seed, trial, ++t, kCoin) < 1.0 - delta) break;
          }
          const double w = static_cast<double>(since_move);
          ++waits[trial];
          wsum[trial] += w;
          wsq[trial] += w * w;
        };
        for (std::size_t t = 1; t <= H; ++t) {
          const int before = sign(a, b);
          const double u = counter_uniform(config.seed, trial, t, kCoin);
          ++since_move;
          if (u < 1.0 - delta) {
            a = move(fast, a, counter_uniform(config.seed, trial, t, kMove));
            const double w = static_cast<double>(since_move);
            ++waits[trial];
            wsum[trial] += w;
            wsq[trial] += w * w;
            since_move = 0;
            if (a <= low) {
              if (phase == 2) ++s.commute_trips[trial];
              phase = 1;
            } else if (a >= high && phase == 1) {
              phase = 2;
            }
          }
          if (u >= delta) b = move(fast, b, counter_uniform(config.seed, trial, t, kPartnerMove));
          const int after = sign(a, b);
          if (after != 0 && before != 0 && after != before) ++crossings[trial];
          if (a == b) {
            s.coalescence[trial] = t;
            finish_wait(t);
            return;
          }
        }
        finish_wait(H);
      },
      64);

  for (std::size_t c : crossings) s.crossings += c;
  detail::KahanSum sum, sq;
  for (std::size_t i = 0; i < config.trials; ++i) {
    s.multiplicity_samples += waits[i];
    sum.add(wsum[i]);
    sq.add(wsq[i]);
  }
  if (s.multiplicity_samples > 0) {
    const double k = static_cast<double>(s.multiplicity_samples);
    s.mean_multiplicity = sum.value() / k;
    const double var = k > 1.0 ? std::max(0.0, (sq.value() - k * s.mean_multiplicity * s.mean_multiplicity) / (k - 1.0))
                               : 0.0;
    s.multiplicity_se = std::sqrt(var / k);
  }
  summarize(s, config.trials, H);
  return s;
}

HittingSample empirical_hitting(const Chain& chain, State start, State target, const SimConfig& config) {
  check_config(config);
  check_state(chain, start, "start");
  check_state(chain, target, "target");
  const std::size_t H = config.horizon;
  std::vector<std::size_t> tau(config.trials, H + 1);
  detail::parallel_for(
      config.trials,
      [&](std::size_t trial) {
        State a = start;
        if (a == target) {
          tau[trial] = 0;
          return;
        }
        for (std::size_t t = 1; t <= H; ++t) {
          a = move(chain, a, counter_uniform(config.seed, trial, t, kMove));
          if (a == target) {
            tau[trial] = t;
            return;
          }
        }
      },
      64);

  HittingSample s;
  s.histogram.assign(H + 1, 0);
  for (std::size_t t : tau) {
    if (t > H) {
      ++s.censored;
    } else {
      ++s.histogram[t];
      ++s.completed;
    }
  }
  if (s.completed == 0) return s;
  const double N = static_cast<double>(s.completed);
  detail::KahanSum m1;
  for (std::size_t t = 0; t <= H; ++t) m1.add(static_cast<double>(s.histogram[t]) * static_cast<double>(t));
  s.mean = m1.value() / N;
  detail::KahanSum m2, m4;
  for (std::size_t t = 0; t <= H; ++t) {
    if (s.histogram[t] == 0) continue;
    const double d = static_cast<double>(t) - s.mean;
    const double c = static_cast<double>(s.histogram[t]);
    m2.add(c * d * d);
    m4.add(c * d * d * d * d);
  }
  s.variance = N > 1.0 ? m2.value() / (N - 1.0) : 0.0;
  s.mean_se = std::sqrt(s.variance / N);
  const double mu2 = m2.value() / N;
  const double mu4 = m4.value() / N;
  s.variance_se = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / N);
  return s;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty()) throw InvalidInput("both samples must be non-empty");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.statistic = d;
  double c = 0.0;
  if (alpha == 0.01) {
    c = 1.628;
  } else if (alpha == 0.05) {
    c = 1.358;
  } else if (alpha == 0.1) {
    c = 1.224;
  } else if (alpha == 0.001) {
    c = 1.949;
  } else {
    c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  }
  r.critical = c * std::sqrt((n + m) / (n * m));
  r.reject = d > r.critical;
  return r;
}

}  // namespace bdmix
