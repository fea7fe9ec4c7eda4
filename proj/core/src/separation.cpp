#include "bdmix/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bdmix/config.hpp"
#include "bdmix/errors.hpp"
#include "bdmix/evolve.hpp"
#include "parallel.hpp"
#include "search.hpp"

namespace bdmix {
namespace {

struct RowSeparation {
  double value = 0.0;
  State target = 0;
  bool clipped = false;
};

RowSeparation row_separation(std::span<const double> row, std::span<const double> pi) {
  RowSeparation out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < row.size(); ++y) {
    const double v = 1.0 - row[y] / pi[y];
    if (v > best) {
      best = v;
      out.target = y;
    }
  }
  if (best < -tolerance()) {
    std::ostringstream os;
    os << "separation evaluated to " << best << ", below -tolerance";
    throw NumericalError(os.str());
  }
  if (best < 0.0) {
    out.clipped = true;
    best = 0.0;
  }
  out.value = std::min(best, 1.0);
  return out;
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
}

}  // namespace

double separation_at(const Chain& chain, State x, std::size_t t) {
  const Distribution pi = stationary(chain);
  const EvolvedRow row = distribution_at(chain, x, t);
  return row_separation(row.distribution.weights(), pi.weights()).value;
}

SeparationReport separation_report(const TransitionPowers& rows, std::span<const double> pi) {
  const std::size_t m = rows.size();
  SeparationReport rep;
  rep.t = rows.time();
  rep.per_start.resize(m);
  rep.per_start_target.resize(m);
  std::vector<RowSeparation> per(m);
  detail::parallel_for(m, [&](std::size_t x) { per[x] = row_separation(rows.row(x), pi); }, 64);
  for (std::size_t x = 0; x < m; ++x) {
    rep.per_start[x] = per[x].value;
    rep.per_start_target[x] = per[x].target;
    if (per[x].clipped) ++rep.clipped;
  }
  const auto it = std::max_element(rep.per_start.begin(), rep.per_start.end());
  rep.worst = *it;
  const State x0 = static_cast<State>(it - rep.per_start.begin());
  rep.argmax_pair = {x0, rep.per_start_target[x0]};

  const double tol = tolerance();
  for (std::size_t x = 0; x < m; ++x) {
    if (rep.per_start[x] < rep.worst - tol) continue;
    for (std::size_t y = 0; y < m; ++y) {
      const double v = std::clamp(1.0 - rows.at(x, y) / pi[y], 0.0, 1.0);
      if (v >= rep.worst - tol) rep.attaining.emplace_back(x, y);
    }
  }
  const std::size_t n = m - 1;
  rep.endpoint_value = std::clamp(1.0 - rows.at(0, n) / pi[n], 0.0, 1.0);
  rep.endpoint_attains = std::abs(rep.worst - rep.endpoint_value) <= tol;
  rep.endpoint_start_attains = std::max(rep.per_start[0], rep.per_start[n]) >= rep.worst - tol;
  return rep;
}

SeparationReport worst_separation(const Chain& chain, std::size_t t) {
  const Distribution pi = stationary(chain);
  TransitionPowers rows(chain);
  rows.advance(t);
  return separation_report(rows, pi.weights());
}

bool separation_symmetry_check(const Chain& chain, std::size_t t) {
  const Distribution pi = stationary(chain);
  const std::size_t n = chain.n();
  const double a = distribution_at(chain, 0, t).distribution[n] / pi[n];
  const double b = distribution_at(chain, n, t).distribution[0] / pi[0];
  return std::abs(a - b) <= tolerance();
}

std::size_t separation_time(const Chain& chain, double eps, const SeparationTimeOptions& opts) {
  check_eps(eps);
  const Distribution pi = stationary(chain);
  const std::size_t horizon = opts.horizon ? opts.horizon : default_horizon(chain);
  const std::size_t n = chain.n();

  auto full_scan = [&] {
    auto metric = [&](const TransitionPowers& rows) { return separation_report(rows, pi.weights()).worst; };
    const double e[1] = {eps};
    if (auto fast = detail::doubling_search(chain, metric, e, horizon, "separation level")) return fast->front();
    return detail::linear_search(chain, metric, e, horizon, "separation level").front();
  };
  if (!chain.lazy()) return full_scan();

  // Lazy chains: the worst separation is 1 - P^t(0,n)/pi(n).
  std::vector<double> v(chain.size(), 0.0);
  v[0] = 1.0;
  std::size_t t = 0;
  Distribution d = Distribution::adopt(v);
  while (std::clamp(1.0 - d[n] / pi[n], 0.0, 1.0) > eps) {
    if (t >= horizon) {
      throw HorizonExceeded("separation level not reached within " + std::to_string(horizon) + " steps", horizon);
    }
    d = step_distribution(chain, d);
    ++t;
  }
  if (opts.audit) {
    const std::size_t audited = full_scan();
    if (audited != t) {
      throw NumericalError("endpoint separation time " + std::to_string(t) + " disagrees with full scan " +
                           std::to_string(audited));
    }
  }
  return t;
}

std::vector<double> apply_kernel(const Chain& chain, std::span<const double> f) {
  const std::size_t m = chain.size();
  if (f.size() != m) {
    throw InvalidInput("vector has " + std::to_string(f.size()) + " entries, chain has " + std::to_string(m) +
                       " states");
  }
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double v = chain.hold(i) * f[i];
    if (i > 0) v += chain.death(i) * f[i - 1];
    if (i + 1 < m) v += chain.birth(i) * f[i + 1];
    out[i] = v;
  }
  return out;
}

Unimodality is_unimodal(std::span<const double> v) {
  Unimodality out;
  if (v.empty()) return out;
  double scale = 1.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  const double tol = tolerance() * scale;
  std::size_t i = 0;
  while (i + 1 < v.size() && v[i + 1] >= v[i] - tol) ++i;
  while (i + 1 < v.size() && v[i + 1] <= v[i] + tol) ++i;
  if (i + 1 != v.size()) return out;
  out.unimodal = true;
  const double top = *std::max_element(v.begin(), v.end());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] >= top - tol) {
      out.mode = k;
      break;
    }
  }
  return out;
}

LikelihoodRatioReport likelihood_ratio_checks(const Chain& chain, const TransitionPowers& rows,
                                              std::span<const double> pi) {
  const std::size_t m = chain.size();
  LikelihoodRatioReport rep;
  rep.t = rows.time();
  const double tol = tolerance();

  if (chain.flags().monotone) {
    rep.column_zero_decreasing.applicable = true;
    rep.ratio_from_zero_decreasing.applicable = true;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double a = rows.at(k, 0), b = rows.at(k + 1, 0);
      if (b > a + tol * std::max(1.0, a) && rep.column_zero_decreasing.holds) {
        rep.column_zero_decreasing.holds = false;
        rep.column_zero_decreasing.first_violation = k;
      }
      const double ra = rows.at(0, k) / pi[k], rb = rows.at(0, k + 1) / pi[k + 1];
      if (rb > ra + tol * std::max(1.0, ra) && rep.ratio_from_zero_decreasing.holds) {
        rep.ratio_from_zero_decreasing.holds = false;
        rep.ratio_from_zero_decreasing.first_violation = k;
      }
    }
  }

  rep.modes.resize(m);
  std::vector<double> ratio(m);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t y = 0; y < m; ++y) ratio[y] = rows.at(s, y) / pi[y];
    const Unimodality u = is_unimodal(ratio);
    rep.modes[s] = u.mode;
    if (chain.lazy() && !u.unimodal && rep.ratios_unimodal.holds) {
      rep.ratios_unimodal.holds = false;
      rep.ratios_unimodal.first_violation = s;
    }
  }
  rep.ratios_unimodal.applicable = chain.lazy();
  if (!rep.ratios_unimodal.applicable) rep.ratios_unimodal.holds = true;
  return rep;
}

LikelihoodRatioReport likelihood_ratio_checks(const Chain& chain, std::size_t t) {
  const Distribution pi = stationary(chain);
  TransitionPowers rows(chain);
  rows.advance(t);
  return likelihood_ratio_checks(chain, rows, pi.weights());
}

}  // namespace bdmix
