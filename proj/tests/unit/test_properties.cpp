// Cross-module invariants on randomized chains.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bdmix/evolve.hpp"
#include "bdmix/families.hpp"
#include "bdmix/separation.hpp"
#include "bdmix/spectral.hpp"
#include "bdmix/transition_powers.hpp"
#include "oracle.hpp"

using namespace bdmix;

TEST(Properties, SeparationDominatesTotalVariation) {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 100; ++trial) {
    const Chain c = oracle::random_lazy(rng, 1 + trial % 16);
    const Distribution pi = stationary(c);
    TransitionPowers rows(c);
    std::vector<double> d, sep;
    for (std::size_t t = 0; t <= 240; ++t) {
      d.push_back(rows.worst_tv(pi.weights()));
      sep.push_back(separation_report(rows, pi.weights()).worst);
      rows.step();
    }
    for (std::size_t t = 0; t <= 30; ++t) {
      EXPECT_LE(d[t], sep[t] + 1e-10);
      EXPECT_LE(sep[8 * t], 32 * std::pow(d[t], 4) + 1e-10) << "trial " << trial << " t " << t;
    }
  }
}

TEST(Properties, SeparationTimeBracketsMixingTime) {
  for (std::size_t n : {8u, 32u, 64u}) {
    FamilySpec spec;
    spec.kind = FamilyKind::biased_walk;
    spec.n = n;
    const Chain c = generate(spec);
    const double tsep = static_cast<double>(separation_time(c, 0.25));
    const double tmix = static_cast<double>(mixing_time(c, 0.25));
    EXPECT_LE(tsep / 8, tmix);
    EXPECT_LE(tmix, tsep);
  }
}

TEST(Properties, BinomialKernelColumnsUnimodal) {
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    const Chain c = oracle::random_chain(rng, 2 + trial % 10);
    const Distribution pi = stationary(c);
    for (double t : {0.5, 2.0, 7.0}) {
      const std::size_t m = static_cast<std::size_t>(std::ceil(2 * t)) * 4;
      for (State s = 0; s <= c.n(); ++s) {
        const Distribution row = binomial_heat_approx(c, s, t, m);
        std::vector<double> ratio(row.size());
        for (State y = 0; y < row.size(); ++y) ratio[y] = row[y] / pi[y];
        EXPECT_TRUE(is_unimodal(ratio).unimodal) << "trial " << trial << " s " << s;
      }
    }
  }
}

TEST(Properties, LikelihoodRatioStructure) {
  std::mt19937_64 rng(203);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 20;
    const std::size_t t = 1 + static_cast<std::size_t>(trial) % 25;
    const LikelihoodRatioReport lazy = likelihood_ratio_checks(oracle::random_lazy(rng, n), t);
    EXPECT_TRUE(lazy.ratios_unimodal.applicable);
    EXPECT_TRUE(lazy.ratios_unimodal.holds) << trial;
    const LikelihoodRatioReport mono = likelihood_ratio_checks(oracle::random_monotone(rng, n), t);
    EXPECT_TRUE(mono.column_zero_decreasing.applicable);
    EXPECT_TRUE(mono.column_zero_decreasing.holds) << trial;
    EXPECT_TRUE(mono.ratio_from_zero_decreasing.holds) << trial;
  }
}

TEST(Properties, LazyDistanceProfileIsMonotone) {
  std::mt19937_64 rng(204);
  for (int trial = 0; trial < 50; ++trial) {
    const Chain c = oracle::random_lazy(rng, 1 + trial % 20);
    const DistanceProfile p = distance_profile(c);
    for (std::size_t i = 1; i < p.d_tv.size(); ++i) EXPECT_LE(p.d_tv[i], p.d_tv[i - 1] + 1e-12);
    for (double v : p.d_tv) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Properties, HeatKernelLazyIdentityUpToFifty) {
  std::mt19937_64 rng(205);
  for (int trial = 0; trial < 20; ++trial) {
    const Chain c = oracle::random_chain(rng, 1 + (trial * 13) % 50);
    for (double t : {0.5, 1.0, 5.0}) {
      const auto a = heat_kernel_row(c, 0, t).distribution;
      const auto b = heat_kernel_row(lazy_version(c), 0, 2 * t).distribution;
      for (State y = 0; y <= c.n(); ++y) EXPECT_NEAR(a[y], b[y], 1e-10);
    }
  }
}
