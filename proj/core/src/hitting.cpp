#include "bdmix/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bdmix/config.hpp"
#include "bdmix/errors.hpp"
#include "bdmix/evolve.hpp"
#include "bdmix/spectral.hpp"
#include "numeric.hpp"

namespace bdmix {
namespace {

void check_state(const Chain& c, State x, const char* what) {
  if (x > c.n()) {
    throw InvalidInput(std::string(what) + " " + std::to_string(x) + " out of range [0, " + std::to_string(c.n()) +
                       "]");
  }
}

// Bounds on the moment mass the DP leaves out after stopping at time T:
//   first  >= sum_k P(tau > T + k)
//   second >= sum_k (2(T + k) + 1) P(tau > T + k)
struct TailBound {
  double first = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
};

// Transient block [lo, target) with q_j > 0 inside. The block kernel is
// self-adjoint in l2(mu) for the detailed-balance weights mu, so
// P(tau > T + k) = <v_T / mu, P^k 1>_mu <= rho^k |v_T / mu|_mu |1|_mu.
std::optional<TailBound> symmetric_tail(const Chain& c, State lo, State target, std::span<const double> v,
                                        std::size_t T) {
  const std::size_t b = target - lo;
  for (std::size_t j = lo + 1; j < target; ++j) {
    if (!(c.death(j) > 0.0)) return std::nullopt;
  }
  std::vector<double> logmu(b, 0.0);
  for (std::size_t i = 1; i < b; ++i) {
    logmu[i] = logmu[i - 1] + std::log(c.birth(lo + i - 1)) - std::log(c.death(lo + i));
  }
  const double top = *std::max_element(logmu.begin(), logmu.end());
  detail::KahanSum mass, weighted;
  for (std::size_t i = 0; i < b; ++i) {
    const double mu = std::exp(logmu[i] - top);
    mass.add(mu);
    if (v[i] != 0.0) weighted.add(v[i] * v[i] / mu);
  }
  const double scale = std::sqrt(weighted.value()) * std::sqrt(mass.value());

  std::vector<double> diag(b), off2(b - 1);
  for (std::size_t i = 0; i < b; ++i) diag[i] = c.hold(lo + i);
  for (std::size_t i = 0; i + 1 < b; ++i) off2[i] = c.birth(lo + i) * c.death(lo + i + 1);
  const std::vector<double> eig = tridiagonal_eigenvalues(diag, off2);
  const double rho = std::max(std::abs(eig.front()), std::abs(eig.back()));
  if (!(rho < 1.0)) return std::nullopt;

  const double tt = static_cast<double>(T);
  const double g = 1.0 / (1.0 - rho);
  return TailBound{scale * g, scale * ((2.0 * tt + 1.0) * g + 2.0 * rho * g * g)};
}

// Generic fallback: c = max_x P_x(tau > L) over the block bounds the decay
// per L steps, P(tau > T + jL + i) <= s_T c^j.
TailBound block_survival_tail(const Chain& c, State lo, State target, double s_T, std::size_t T) {
  const std::size_t b = target - lo;
  const std::size_t L = std::max<std::size_t>(T, b);
  std::vector<double> s(b, 1.0), next(b);
  for (std::size_t step = 0; step < L; ++step) {
    for (std::size_t i = 0; i < b; ++i) {
      const State x = lo + i;
      double v = c.hold(x) * s[i];
      if (i > 0) v += c.death(x) * s[i - 1];
      if (i + 1 < b) v += c.birth(x) * s[i + 1];
      next[i] = v;
    }
    s.swap(next);
  }
  const double cmax = *std::max_element(s.begin(), s.end());
  TailBound out;
  if (!(cmax < 1.0)) return out;
  const double ll = static_cast<double>(L), tt = static_cast<double>(T);
  const double g = 1.0 / (1.0 - cmax);
  out.first = s_T * ll * g;
  out.second = s_T * ll * ((2.0 * tt + 2.0 * ll + 1.0) * g + 2.0 * ll * cmax * g * g);
  return out;
}

// start < target. Transient states are [lo, target), lo being as far down as
// the chain can walk from start.
HittingLaw upward_dp(const Chain& c, State start, State target, double tail_tol) {
  State lo = start;
  while (lo > 0 && c.death(lo) > 0.0) --lo;
  for (State j = lo; j < target; ++j) {
    if (!(c.birth(j) > 0.0)) {
      throw InvalidInput("target " + std::to_string(target) + " is not reached almost surely: p[" +
                         std::to_string(j) + "] = 0");
    }
  }
  const std::size_t b = target - lo;
  const std::size_t cap = default_horizon(c) * 100;

  HittingLaw law;
  law.pmf.push_back(0.0);
  std::vector<double> v(b, 0.0), next(b);
  v[start - lo] = 1.0;
  double survival = 1.0;
  detail::KahanSum first, second;  // sum s_t, sum (2t+1) s_t over t < T
  double prev_survival = 1.0;
  std::size_t t = 0;
  while (survival >= tail_tol) {
    if (t >= cap) throw HorizonExceeded("hitting-time recursion did not converge", cap);
    first.add(survival);
    second.add((2.0 * static_cast<double>(t) + 1.0) * survival);
    const double absorbed = v[b - 1] * c.birth(target - 1);
    for (std::size_t i = 0; i < b; ++i) {
      const State x = lo + i;
      double w = v[i] * c.hold(x);
      if (i > 0) w += v[i - 1] * c.birth(x - 1);
      if (i + 1 < b) w += v[i + 1] * c.death(x + 1);
      next[i] = w;
    }
    v.swap(next);
    law.pmf.push_back(absorbed);
    prev_survival = survival;
    survival = detail::compensated_sum(v);
    ++t;
  }
  law.tail = survival;

  TailBound bound;
  if (auto sym = symmetric_tail(c, lo, target, v, t)) {
    bound = *sym;
  } else {
    bound = block_survival_tail(c, lo, target, survival, t);
  }
  // Point estimate of the omitted mass from the observed decay ratio,
  // clipped into the certified interval [0, bound].
  const double ratio = prev_survival > 0.0 ? std::min(survival / prev_survival, 1.0 - 1e-16) : 0.0;
  const double tt = static_cast<double>(t);
  const double g = 1.0 / (1.0 - ratio);
  const double est1 = std::min(survival * g, bound.first);
  const double est2 = std::min(survival * ((2.0 * tt + 1.0) * g + 2.0 * ratio * g * g), bound.second);

  law.expectation = first.value() + est1;
  const double m2 = second.value() + est2;
  law.variance = std::max(0.0, m2 - law.expectation * law.expectation);
  law.expectation_error = bound.first;
  law.variance_error = bound.second + 2.0 * (law.expectation + bound.first) * bound.first;
  return law;
}

}  // namespace

Chain absorbing_variant(const Chain& chain, State target) {
  check_state(chain, target, "target");
  std::vector<double> p(chain.births().begin(), chain.births().end());
  std::vector<double> q(chain.deaths().begin(), chain.deaths().end());
  std::vector<double> r(chain.holds().begin(), chain.holds().end());
  p[target] = 0.0;
  q[target] = 0.0;
  r[target] = 1.0;
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

Chain reflect(const Chain& chain) {
  const std::size_t m = chain.size();
  std::vector<double> p(m), q(m), r(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = m - 1 - i;
    p[i] = chain.death(j);
    q[i] = chain.birth(j);
    r[i] = chain.hold(j);
  }
  return Chain::create(std::move(p), std::move(q), std::move(r));
}

HittingLaw hitting_pmf(const Chain& chain, State start, State target, double tail_tol) {
  check_state(chain, start, "start");
  check_state(chain, target, "target");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw InvalidInput("tail tolerance must lie in (0, 1)");
  if (start == target) {
    HittingLaw law;
    law.pmf = {1.0};
    return law;
  }
  if (start < target) return upward_dp(chain, start, target, tail_tol);
  const std::size_t n = chain.n();
  return upward_dp(reflect(chain), n - start, n - target, tail_tol);
}

double hitting_pgf(std::span<const double> thetas, double u) {
  for (double th : thetas) {
    if (!(th >= -1.0 && th < 1.0)) throw InvalidInput("every theta must lie in [-1, 1)");
  }
  if (!(std::abs(u) <= 1.0)) throw InvalidInput("pgf argument must satisfy |u| <= 1");
  if (u == 1.0) return 1.0;
  double out = 1.0;
  for (double th : thetas) {
    const double den = 1.0 - th * u;
    if (std::abs(den) <= 1e-300) {
      std::ostringstream os;
      os << "pgf has a pole at u = " << u << " (theta = " << th << ")";
      throw InvalidInput(os.str());
    }
    out *= (1.0 - th) * u / den;
  }
  return out;
}

std::vector<double> hitting_pgf_series(std::span<const double> thetas, std::size_t horizon) {
  std::vector<double> f(horizon + 1, 0.0), g(horizon + 1);
  f[0] = 1.0;
  for (double th : thetas) {
    g[0] = 0.0;
    for (std::size_t k = 1; k <= horizon; ++k) g[k] = th * g[k - 1] + (1.0 - th) * f[k - 1];
    f.swap(g);
  }
  return f;
}

HittingLaw spectral_hitting(const Chain& chain, State target, double tail_tol) {
  check_state(chain, target, "target");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw InvalidInput("tail tolerance must lie in (0, 1)");
  for (State j = 0; j < target; ++j) {
    if (!(chain.birth(j) > 0.0)) {
      throw InvalidInput("spectral form needs p[j] > 0 below the target; p[" + std::to_string(j) + "] = 0");
    }
  }
  HittingLaw law;
  std::vector<double> thetas = submatrix_eigenvalues(chain, target);
  detail::KahanSum mean, var;
  for (double th : thetas) {
    mean.add(1.0 / (1.0 - th));
    var.add(th / ((1.0 - th) * (1.0 - th)));
  }
  law.expectation = mean.value();
  law.variance = std::max(0.0, var.value());

  const double tol = tolerance();
  const bool negative = !thetas.empty() && thetas.back() < -tol;
  if (negative) {
    std::ostringstream os;
    os << "negative eigenvalue " << thetas.back()
       << " in the absorbing block; moments come from the pgf, pmf by geometric convolution refused";
    law.diagnostics.push_back(os.str());
  } else {
    for (double& th : thetas) th = std::max(th, 0.0);
    std::size_t horizon = static_cast<std::size_t>(
                              std::ceil(law.expectation + 10.0 * std::sqrt(law.variance))) +
                          target + 1;
    const std::size_t cap = default_horizon(chain) * 100;
    while (true) {
      law.pmf = hitting_pgf_series(thetas, horizon);
      const double tail = 1.0 - detail::compensated_sum(law.pmf);
      law.tail = std::max(tail, 0.0);
      if (tail < tail_tol) break;
      if (horizon >= cap) throw HorizonExceeded("geometric convolution did not converge", cap);
      horizon *= 2;
    }
  }
  law.thetas = std::move(thetas);
  return law;
}

double expected_hitting_time(const Chain& chain, State a, State b) {
  check_state(chain, a, "start");
  check_state(chain, b, "target");
  if (a == b) return 0.0;
  if (a > b) {
    const std::size_t n = chain.n();
    return expected_hitting_time(reflect(chain), n - a, n - b);
  }
  // e_k = E_k tau_{k+1}.
  const double inf = std::numeric_limits<double>::infinity();
  double e_prev = 0.0;
  detail::KahanSum total;
  for (State k = 0; k < b; ++k) {
    double e;
    if (!(chain.birth(k) > 0.0)) {
      e = inf;
    } else {
      const double down = chain.death(k) > 0.0 ? chain.death(k) * e_prev : 0.0;
      e = (1.0 + down) / chain.birth(k);
    }
    if (k >= a) {
      if (std::isinf(e)) {
        throw InvalidInput("target " + std::to_string(b) + " is not reached almost surely from " +
                           std::to_string(a));
      }
      total.add(e);
    }
    e_prev = e;
  }
  return total.value();
}

SurvivalFunction::SurvivalFunction(const Chain& chain, State target)
    : chain_(chain), target_(target), s_(chain.size(), 1.0), scratch_(chain.size()) {
  check_state(chain, target, "target");
  s_[target] = 0.0;
}

void SurvivalFunction::step() {
  const std::size_t m = s_.size();
  for (std::size_t x = 0; x < m; ++x) {
    if (x == target_) {
      scratch_[x] = 0.0;
      continue;
    }
    double v = chain_.hold(x) * s_[x];
    if (x > 0) v += chain_.death(x) * s_[x - 1];
    if (x + 1 < m) v += chain_.birth(x) * s_[x + 1];
    scratch_[x] = v;
  }
  s_.swap(scratch_);
  ++time_;
}

void SurvivalFunction::advance(std::size_t h) {
  for (std::size_t i = 0; i < h; ++i) step();
}

MomentBoundsReport hitting_moment_bounds(const Chain& chain, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  if (!chain.irreducible()) throw ReducibleChain("moment bounds need an irreducible chain");
  if (!chain.lazy()) throw InvalidInput("moment bounds need a lazy chain");
  MomentBoundsReport rep;
  rep.quantile = quantile_state(chain, 1.0 - eps, Side::left);
  rep.gap = spectral_gap(chain).gap;
  if (rep.quantile == 0) return rep;

  const std::vector<double> thetas = submatrix_eigenvalues(chain, rep.quantile);
  detail::KahanSum mean, var;
  for (double th : thetas) {
    mean.add(1.0 / (1.0 - th));
    var.add(th / ((1.0 - th) * (1.0 - th)));
  }
  rep.expectation = mean.value();
  rep.variance = var.value();
  rep.restricted_gap = 1.0 - thetas.front();
  rep.restricted_bound = rep.expectation / rep.restricted_gap;
  rep.global_bound = rep.expectation / (eps * rep.gap);
  const double slack = 1e-12 * std::max(1.0, rep.variance);
  rep.restricted_bound_holds = rep.variance <= rep.restricted_bound + slack;
  rep.global_bound_holds = rep.variance <= rep.global_bound + slack;
  return rep;
}

}  // namespace bdmix
