#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bdmix/errors.hpp"
#include "bdmix/families.hpp"
#include "bdmix/hitting.hpp"
#include "bdmix/spectral.hpp"
#include "oracle.hpp"

using namespace bdmix;

namespace {

Chain pure_birth_half() { return Chain::create({0.5, 0.5, 0.0}, {0.0, 0.0, 0.0}, {0.5, 0.5, 1.0}); }

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  const std::size_t m = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i) {
    d = std::max(d, std::abs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0)));
  }
  return d;
}

}  // namespace

TEST(Hitting, AbsorbingVariant) {
  const Chain a = absorbing_variant(oracle::c2(), 1);
  EXPECT_EQ(a.death(1), 0.0);
  EXPECT_EQ(a.hold(1), 1.0);
  EXPECT_EQ(a.birth(0), 0.5);
  const Chain c = oracle::c4();
  const Chain b = absorbing_variant(c, 3);
  EXPECT_EQ(b.hold(3), 1.0);
  for (State i = 0; i < 3; ++i) {
    EXPECT_EQ(b.birth(i), c.birth(i));
    EXPECT_EQ(b.death(i), c.death(i));
  }
  EXPECT_EQ(absorbing_variant(b, 3), b);
}

TEST(Hitting, GeometricLaw) {
  const HittingLaw h = hitting_pmf(oracle::c2(), 0, 1);
  EXPECT_EQ(h.pmf[0], 0.0);
  for (std::size_t t = 1; t < h.pmf.size(); ++t) EXPECT_NEAR(h.pmf[t], std::ldexp(1.0, -static_cast<int>(t)), 1e-16);
  EXPECT_NEAR(h.expectation, 2.0, 1e-10);
  EXPECT_NEAR(h.variance, 2.0, 1e-9);
  EXPECT_LE(std::abs(h.expectation - 2.0), h.expectation_error + 1e-14);
  EXPECT_LE(std::abs(h.variance - 2.0), h.variance_error + 1e-12);
}

TEST(Hitting, NegativeBinomialLaw) {
  const HittingLaw h = hitting_pmf(pure_birth_half(), 0, 2);
  EXPECT_EQ(h.pmf[1], 0.0);
  for (std::size_t t = 2; t < h.pmf.size(); ++t) {
    EXPECT_NEAR(h.pmf[t], static_cast<double>(t - 1) * std::ldexp(1.0, -static_cast<int>(t)), 1e-16);
  }
  EXPECT_NEAR(h.expectation, 4.0, 1e-9);
  EXPECT_NEAR(h.variance, 4.0, 1e-8);
}

TEST(Hitting, C4ExpectationMatchesLinearSolve) {
  const Chain c = oracle::c4();
  const HittingLaw h = hitting_pmf(c, 0, 3);
  EXPECT_NEAR(h.expectation, oracle::expected_hitting(c, 3)[0], 1e-9);
  EXPECT_NEAR(expected_hitting_time(c, 0, 3), oracle::expected_hitting(c, 3)[0], 1e-9);
  EXPECT_NEAR(expected_hitting_time(c, 3, 0), oracle::expected_hitting(c, 0)[3], 1e-9);
  const HittingLaw down = hitting_pmf(c, 3, 1);
  EXPECT_NEAR(down.expectation, oracle::expected_hitting(c, 1)[3], 1e-9);
}

TEST(Hitting, PmfMatchesBruteForce) {
  const Chain c = lazy_version(oracle::c4());
  const HittingLaw h = hitting_pmf(c, 0, 3);
  const auto want = oracle::hitting_pmf(c, 0, 3, h.pmf.size() - 1);
  EXPECT_LE(sup_diff(h.pmf, want), 1e-13);
  double mass = h.tail;
  for (double v : h.pmf) mass += v;
  EXPECT_NEAR(mass, 1.0, 1e-10);
}

TEST(Hitting, StartAtTargetAndUnreachable) {
  const HittingLaw h = hitting_pmf(oracle::c4(), 2, 2);
  EXPECT_EQ(h.pmf, std::vector<double>{1.0});
  EXPECT_EQ(h.expectation, 0.0);
  EXPECT_THROW(hitting_pmf(pure_birth_half(), 2, 0), InvalidInput);
  EXPECT_THROW(expected_hitting_time(pure_birth_half(), 2, 0), InvalidInput);
}

TEST(Hitting, Spectral) {
  const HittingLaw c2 = spectral_hitting(oracle::c2(), 1);
  ASSERT_TRUE(c2.thetas.has_value());
  ASSERT_EQ(c2.thetas->size(), 1u);
  EXPECT_NEAR((*c2.thetas)[0], 0.5, 1e-15);
  EXPECT_NEAR(c2.expectation, 2.0, 1e-14);
  EXPECT_NEAR(c2.variance, 2.0, 1e-14);

  const HittingLaw pb = spectral_hitting(pure_birth_half(), 2);
  ASSERT_TRUE(pb.thetas.has_value());
  EXPECT_NEAR((*pb.thetas)[0], 0.5, 1e-15);
  EXPECT_NEAR((*pb.thetas)[1], 0.5, 1e-15);
  EXPECT_NEAR(pb.expectation, 4.0, 1e-14);
  EXPECT_NEAR(pb.variance, 4.0, 1e-14);

  const Chain lc4 = lazy_version(oracle::c4());
  EXPECT_LE(sup_diff(spectral_hitting(lc4, 3).pmf, hitting_pmf(lc4, 0, 3).pmf), 1e-10);
}

TEST(Hitting, SpectralRefusesPmfForNegativeEigenvalues) {
  // Non-lazy: the block {0, 1} of C4 has a negative eigenvalue.
  const Chain c = oracle::c4();
  const HittingLaw h = spectral_hitting(c, 2);
  ASSERT_TRUE(h.thetas.has_value());
  EXPECT_LT(h.thetas->back(), 0.0);
  EXPECT_TRUE(h.pmf.empty());
  EXPECT_FALSE(h.diagnostics.empty());
  EXPECT_NEAR(h.expectation, oracle::expected_hitting(c, 2)[0], 1e-10);
  EXPECT_NEAR(h.variance, hitting_pmf(c, 0, 2).variance, 1e-8);
}

TEST(Hitting, Pgf) {
  const std::vector<double> one{0.5}, two{0.5, 0.5}, none{};
  EXPECT_EQ(hitting_pgf(one, 1.0), 1.0);
  EXPECT_NEAR(hitting_pgf(two, 0.5), 1.0 / 9, 1e-16);
  EXPECT_EQ(hitting_pgf(none, 0.3), 1.0);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(hitting_pgf(bad, 0.5), InvalidInput);
  EXPECT_THROW(hitting_pgf(one, 1.5), InvalidInput);
  const std::vector<double> flip{-1.0};
  EXPECT_THROW(hitting_pgf(flip, -1.0), InvalidInput);
}

TEST(Hitting, PgfSeriesMatchesPmf) {
  const Chain lc4 = lazy_version(oracle::c4());
  const HittingLaw s = spectral_hitting(lc4, 3);
  const auto series = hitting_pgf_series(*s.thetas, 60);
  const auto dp = hitting_pmf(lc4, 0, 3).pmf;
  for (std::size_t k = 0; k <= 60; ++k) EXPECT_NEAR(series[k], k < dp.size() ? dp[k] : 0.0, 1e-10);
}

TEST(Hitting, SurvivalFunction) {
  std::mt19937_64 rng(2);
  const Chain c = oracle::random_lazy(rng, 6);
  SurvivalFunction s(c, 4);
  s.advance(9);
  EXPECT_EQ(s.time(), 9u);
  EXPECT_EQ(s.at(4), 0.0);
  for (State x = 0; x <= c.n(); ++x) {
    if (x == 4) continue;
    double tail = 1.0;
    for (double v : oracle::hitting_pmf(c, x, 4, 9)) tail -= v;
    EXPECT_NEAR(s.at(x), tail, 1e-13);
  }
}

TEST(Hitting, MomentBounds) {
  const MomentBoundsReport r = hitting_moment_bounds(oracle::c2(), 0.3);
  EXPECT_EQ(r.quantile, 1u);
  EXPECT_NEAR(r.variance, 2.0, 1e-9);
  EXPECT_NEAR(r.restricted_gap, 0.5, 1e-15);
  EXPECT_NEAR(r.restricted_bound, 4.0, 1e-9);
  EXPECT_TRUE(r.restricted_bound_holds);
  EXPECT_TRUE(r.global_bound_holds);

  const MomentBoundsReport degenerate = hitting_moment_bounds(oracle::c2(), 0.9);
  EXPECT_EQ(degenerate.quantile, 0u);
  EXPECT_EQ(degenerate.expectation, 0.0);
  EXPECT_EQ(degenerate.variance, 0.0);
  EXPECT_TRUE(degenerate.restricted_bound_holds);
  EXPECT_TRUE(degenerate.global_bound_holds);

  EXPECT_THROW(hitting_moment_bounds(oracle::c4(), 0.3), InvalidInput);
}

TEST(HittingProperties, DpAndSpectralAgree) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const Chain c = oracle::random_lazy(rng, n);
    const HittingLaw dp = hitting_pmf(c, 0, n);
    const HittingLaw sp = spectral_hitting(c, n);
    EXPECT_LE(sup_diff(dp.pmf, sp.pmf), 1e-10);
    EXPECT_NEAR(dp.expectation, sp.expectation, 1e-8 * sp.expectation);
    EXPECT_NEAR(dp.variance, sp.variance, 1e-8 * sp.variance);
    double e = 0.0, v = 0.0;
    for (double th : *sp.thetas) {
      e += 1.0 / (1.0 - th);
      v += th / ((1.0 - th) * (1.0 - th));
    }
    EXPECT_NEAR(sp.expectation, e, 1e-12 * e);
    EXPECT_NEAR(sp.variance, v, 1e-12 * v);
  }
}

TEST(HittingProperties, ExpectationDecomposes) {
  std::mt19937_64 rng(102);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const Chain c = trial % 2 ? oracle::random_lazy(rng, n) : oracle::random_chain(rng, n);
    const State b = n;
    const State a = 1 + static_cast<State>(trial) % (n - 1);
    const double whole = expected_hitting_time(c, 0, b);
    EXPECT_NEAR(whole, expected_hitting_time(c, 0, a) + expected_hitting_time(c, a, b), 1e-9 * whole);
    EXPECT_NEAR(whole, oracle::expected_hitting(c, b)[0], 1e-9 * whole);
  }
}

TEST(HittingProperties, VarianceBoundsOnRandomLazyChains) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 500; ++trial) {
    const Chain c = oracle::random_lazy(rng, 1 + trial % 30);
    for (double eps : {0.1, 0.3}) {
      const MomentBoundsReport r = hitting_moment_bounds(c, eps);
      EXPECT_TRUE(r.restricted_bound_holds) << trial;
      EXPECT_TRUE(r.global_bound_holds) << trial;
      if (r.quantile > 0) EXPECT_GE(r.restricted_gap, eps * r.gap - 1e-12);
    }
  }
}
