#include "bdmix/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bdmix/errors.hpp"
#include "bdmix/evolve.hpp"
#include "bdmix/hitting.hpp"
#include "bdmix/spectral.hpp"
#include "bdmix/transition_powers.hpp"
#include "parallel.hpp"

namespace bdmix {
namespace {

LemmaCheck make_check(std::string id, std::string description) {
  LemmaCheck c;
  c.id = std::move(id);
  c.description = std::move(description);
  return c;
}

constexpr double kProbSlack = 1e-10;

void require_lazy_irreducible(const Chain& chain, const char* what) {
  if (!chain.irreducible()) throw ReducibleChain(std::string(what) + " needs an irreducible chain");
  if (!chain.lazy()) throw InvalidInput(std::string(what) + " needs a lazy chain");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Batch of mixing levels with lookup by value.
class Levels {
 public:
  void add(double e) {
    if (std::find(eps_.begin(), eps_.end(), e) == eps_.end()) eps_.push_back(e);
  }
  void solve(const Chain& chain) { times_ = mixing_times(chain, eps_); }
  std::size_t operator()(double e) const {
    const auto it = std::find(eps_.begin(), eps_.end(), e);
    return times_[static_cast<std::size_t>(it - eps_.begin())];
  }

 private:
  std::vector<double> eps_;
  std::vector<std::size_t> times_;
};

double half_l1(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

void finish(LemmaCheck& c, double slack, double tol) {
  c.slack = slack;
  c.status = slack >= -tol ? CheckStatus::holds : CheckStatus::violated;
}

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::holds:
      return "holds";
    case CheckStatus::violated:
      return "violated";
    case CheckStatus::not_applicable:
      return "not_applicable";
  }
  return "?";
}

FamilyRow analyze_chain(const Chain& chain, std::span<const double> eps_grid) {
  for (double e : eps_grid) {
    if (!(e > 0.0 && e <= 0.5)) throw InvalidInput("eps grid values must lie in (0, 1/2], got " + fmt(e));
  }
  Levels levels;
  levels.add(0.25);
  for (double e : eps_grid) {
    levels.add(e);
    levels.add(1.0 - e);
  }
  levels.solve(chain);
  const GapSummary g = spectral_gap(chain);

  FamilyRow row;
  row.n = chain.n();
  row.eps.assign(eps_grid.begin(), eps_grid.end());
  row.t_mix_quarter = levels(0.25);
  row.gap = g.gap;
  row.t_rel = g.t_rel;
  row.product = g.gap * static_cast<double>(row.t_mix_quarter);
  const double scale = std::sqrt(row.t_rel * static_cast<double>(row.t_mix_quarter));
  for (double e : eps_grid) {
    const std::size_t a = levels(e), b = levels(1.0 - e);
    row.t_mix.push_back(a);
    row.t_mix_complement.push_back(b);
    const double w = static_cast<double>(a) - static_cast<double>(b);
    row.window.push_back(w);
    row.ratio.push_back(b == 0 ? (a == 0 ? 1.0 : std::numeric_limits<double>::infinity())
                               : static_cast<double>(a) / static_cast<double>(b));
    row.normalized_window.push_back(scale > 0.0 ? w / scale : 0.0);
  }
  return row;
}

FamilyReport family_scan(const FamilySpec& family, std::span<const std::size_t> sizes,
                         std::span<const double> eps_grid) {
  FamilyReport rep;
  rep.family = family.name;
  rep.eps.assign(eps_grid.begin(), eps_grid.end());
  rep.rows.resize(sizes.size());
  detail::parallel_for(sizes.size(), [&](std::size_t i) {
    FamilyRow& row = rep.rows[i];
    try {
      FamilySpec spec = family;
      spec.n = sizes[i];
      row = analyze_chain(generate(spec), eps_grid);
    } catch (const std::exception& e) {
      row = FamilyRow{};
      row.n = sizes[i];
      row.eps.assign(eps_grid.begin(), eps_grid.end());
      row.ok = false;
      row.error = e.what();
    }
  });

  std::vector<const FamilyRow*> good;
  for (const auto& r : rep.rows) {
    if (r.ok) good.push_back(&r);
  }
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    TrendSummary tr;
    tr.eps = eps_grid[k];
    std::vector<double> xs, ys;
    for (const FamilyRow* r : good) {
      if (std::isfinite(r->ratio[k])) {
        xs.push_back(std::log(static_cast<double>(r->n)));
        ys.push_back(r->ratio[k]);
      }
    }
    if (xs.size() >= 2) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
      }
      tr.ratio_slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    tr.ratio_strictly_decreasing = good.size() >= 2;
    for (std::size_t i = 1; i < good.size(); ++i) {
      if (!(good[i]->ratio[k] < good[i - 1]->ratio[k])) tr.ratio_strictly_decreasing = false;
    }
    tr.cutoff_trend = tr.ratio_slope < 0.0 && tr.ratio_strictly_decreasing;
    rep.trends.push_back(tr);
  }
  rep.product_strictly_increasing = good.size() >= 2;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < good.size(); ++i) {
    if (i > 0 && !(good[i]->product > good[i - 1]->product)) rep.product_strictly_increasing = false;
    lo = std::min(lo, good[i]->product);
    hi = std::max(hi, good[i]->product);
  }
  rep.product_spread = good.empty() || lo <= 0.0 ? 0.0 : hi / lo;
  return rep;
}

WindowVerdict window_bound_check(const Chain& chain, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidInput("window check needs eps in (0, 1/2), got " + fmt(eps));
  require_lazy_irreducible(chain, "window check");
  const bool small = eps < 1.0 / 16.0;
  Levels levels;
  for (double e : {eps, 1.0 - eps, 0.25}) levels.add(e);
  if (small) {
    levels.add(4.0 * eps);
    levels.add(1.0 - 2.0 * eps);
  }
  levels.solve(chain);

  WindowVerdict v;
  v.epsilon = eps;
  v.t_mix_eps = levels(eps);
  v.t_mix_complement = levels(1.0 - eps);
  v.t_mix_quarter = levels(0.25);
  v.t_rel = spectral_gap(chain).t_rel;
  v.c1 = 24.0 * std::max(1.0 / eps, 64.0);
  v.c2 = std::max(std::log2(1.0 / eps) / std::pow(eps, 2.5), 64.0);
  v.c_eps_used = std::max(v.c1, v.c2);
  const double tq = static_cast<double>(v.t_mix_quarter);
  const double scale = std::sqrt(v.t_rel * tq);
  v.lhs = static_cast<double>(v.t_mix_eps) - static_cast<double>(v.t_mix_complement);
  v.rhs = v.c_eps_used * scale;
  v.effective_regime = v.t_rel < std::pow(eps, 5) * tq;
  if (v.effective_regime && small) {
    v.sharper_checked = true;
    v.sharper_lhs = static_cast<double>(levels(4.0 * eps)) - static_cast<double>(levels(1.0 - 2.0 * eps));
    v.sharper_rhs = (6.0 / eps) * scale;
    v.sharper_holds = v.sharper_lhs <= v.sharper_rhs * (1.0 + 1e-12);
  }
  v.holds = v.lhs <= v.rhs * (1.0 + 1e-12) && v.sharper_holds;
  return v;
}

bool LemmaSuiteReport::theorem_violation() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const LemmaCheck& c) { return c.theorem_backed && c.status == CheckStatus::violated; });
}

const LemmaCheck& LemmaSuiteReport::at(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return c;
  }
  throw InvalidInput("no check named '" + id + "'");
}

LemmaSuiteReport lemma_suite(const Chain& chain, double eps, const LemmaSuiteOptions& opts) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0, 1)");
  require_lazy_irreducible(chain, "lemma suite");
  const Distribution pi_d = stationary(chain);
  const std::span<const double> pi = pi_d.weights();
  const std::size_t n = chain.n();
  const std::size_t m = chain.size();
  const double t_rel = spectral_gap(chain).t_rel;
  const State q_hi = quantile_state(pi, 1.0 - eps, Side::left);
  const State q_lo = quantile_state(pi, eps, Side::left);

  Levels levels;
  levels.add(eps);
  levels.add(0.25);
  for (double e : opts.spectral_levels) levels.add(e);
  levels.solve(chain);
  const std::size_t T = levels(eps);
  const std::size_t tq = levels(0.25);

  LemmaSuiteReport rep;
  rep.eps = eps;

  {  // a: start 0, every t up to t_mix(eps)
    LemmaCheck c = make_check("a", "TV from 0 <= P_0(tau_Q(1-eps) > t) + eps");
    SurvivalFunction surv(chain, q_hi);
    Distribution row = Distribution::point_mass(m, 0);
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t <= T; ++t) {
      slack = std::min(slack, surv.at(0) + eps - tv_distance(row.weights(), pi));
      row = step_distribution(chain, row);
      surv.step();
    }
    c.note = "t = 0.." + std::to_string(T);
    finish(c, slack, kProbSlack);
    rep.checks.push_back(c);
  }

  {  // b: every start, every t (or a power-of-two grid) up to t_mix(eps)
    LemmaCheck c = make_check("b", "TV from k <= P_k(tau_Q(eps) > t) + P_k(tau_Q(1-eps) > t) + 2 eps");
    const double work = static_cast<double>(m) * static_cast<double>(m) * static_cast<double>(T + 1);
    std::size_t stride = 1;
    if (work > opts.full_scan_budget) {
      while ((T + 1) / stride > opts.grid_points) stride *= 2;
    }
    SurvivalFunction s_lo(chain, q_lo), s_hi(chain, q_hi);
    TransitionPowers rows(chain);
    double slack = std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0;
    while (true) {
      std::vector<double> per(m);
      detail::parallel_for(
          m, [&](std::size_t k) { per[k] = s_lo.at(k) + s_hi.at(k) + 2.0 * eps - half_l1(rows.row(k), pi); }, 64);
      slack = std::min(slack, *std::min_element(per.begin(), per.end()));
      ++evaluated;
      if (rows.time() >= T) break;
      const std::size_t h = std::min(stride, T - rows.time());
      rows.advance(h);
      s_lo.advance(h);
      s_hi.advance(h);
    }
    c.note = stride == 1 ? "every t = 0.." + std::to_string(T)
                         : std::to_string(evaluated) + " times, stride " + std::to_string(stride) + ", up to " +
                               std::to_string(T);
    finish(c, slack, kProbSlack);
    rep.checks.push_back(c);
  }

  const double e0_hi = expected_hitting_time(chain, 0, q_hi);
  {  // c
    LemmaCheck c = make_check("c", "t_mix(1/4) <= 16 max(E_0 tau_Q(1-eps), E_n tau_Q(eps))");
    if (eps < 1.0 / 16.0) {
      const double bound = 16.0 * std::max(e0_hi, expected_hitting_time(chain, n, q_lo));
      finish(c, bound - static_cast<double>(tq), 1e-9 * std::max(1.0, bound));
    } else {
      c.note = "needs eps < 1/16";
    }
    rep.checks.push_back(c);
  }

  {  // d
    LemmaCheck c = make_check("d", "E_Q(a) tau_Q(b) <= 3/(2 eps) sqrt(t_rel E_0 tau_Q(1/2))");
    if (!(eps < 1.0 / 16.0)) {
      c.note = "needs eps < 1/16";
    } else if (!(t_rel < std::pow(eps, 4) * e0_hi)) {
      c.note = "precondition t_rel < eps^4 E_0 tau_Q(1-eps) fails (" + fmt(t_rel) + " >= " +
               fmt(std::pow(eps, 4) * e0_hi) + ")";
    } else {
      const double bound =
          1.5 / eps * std::sqrt(t_rel * expected_hitting_time(chain, 0, quantile_state(pi, 0.5, Side::left)));
      const double grid[] = {eps, 0.25, 0.5, 0.75, 1.0 - eps};
      double slack = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = i + 1; j < 5; ++j) {
          const State a = quantile_state(pi, grid[i], Side::left);
          const State b = quantile_state(pi, grid[j], Side::left);
          slack = std::min(slack, bound - expected_hitting_time(chain, a, b));
        }
      }
      finish(c, slack, 1e-9 * std::max(1.0, bound));
    }
    rep.checks.push_back(c);
  }

  {  // e
    LemmaCheck c = make_check("e", "t_mix(e) >= (t_rel - 1) log(1/(2e))");
    std::vector<double> es{eps};
    es.insert(es.end(), opts.spectral_levels.begin(), opts.spectral_levels.end());
    double slack = std::numeric_limits<double>::infinity();
    for (double e : es) {
      if (!(e < 0.5)) continue;
      const double bound = (t_rel - 1.0) * std::log(1.0 / (2.0 * e));
      slack = std::min(slack, static_cast<double>(levels(e)) - bound);
    }
    if (std::isinf(slack)) {
      c.note = "no level below 1/2";
    } else {
      finish(c, slack, 1e-9 * std::max(1.0, t_rel));
    }
    rep.checks.push_back(c);
  }

  {  // f
    LemmaCheck c = make_check("f", "t_mix(eps) <= t_mix(1/4) ceil(log2(1/eps) / 2)");
    c.theorem_backed = false;
    if (eps < 0.25) {
      const double bound = static_cast<double>(tq) * std::ceil(0.5 * std::log2(1.0 / eps));
      finish(c, bound - static_cast<double>(T), 0.0);
    } else {
      c.note = "needs eps < 1/4";
    }
    rep.checks.push_back(c);
  }

  {  // g
    LemmaCheck c = make_check("g", "dbar(s+t) <= dbar(s) dbar(t); t_mix(eps) <= t_mix(1/4) ceil(log2(1/eps))");
    double slack = std::numeric_limits<double>::infinity();
    if (eps < 0.25) {
      slack = static_cast<double>(tq) * std::ceil(std::log2(1.0 / eps)) - static_cast<double>(T);
    }
    if (m <= opts.pairwise_limit) {
      const std::size_t span = std::min<std::size_t>(std::max<std::size_t>(2 * tq, 8), 64);
      std::vector<double> dbar;
      TransitionPowers rows(chain);
      for (std::size_t t = 0; t <= span; ++t) {
        dbar.push_back(rows.pairwise_tv());
        rows.step();
      }
      for (std::size_t s = 0; s <= span; ++s) {
        for (std::size_t t = 0; s + t <= span; ++t) {
          slack = std::min(slack, dbar[s] * dbar[t] - dbar[s + t]);
        }
      }
      c.note = "dbar checked for s + t <= " + std::to_string(span);
    } else {
      c.note = "dbar part skipped above " + std::to_string(opts.pairwise_limit) + " states";
    }
    if (std::isinf(slack)) {
      c.note += "; nothing applicable";
    } else {
      finish(c, slack, kProbSlack);
    }
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace bdmix
