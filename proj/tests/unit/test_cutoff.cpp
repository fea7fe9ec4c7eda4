#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bdmix/cutoff.hpp"
#include "bdmix/errors.hpp"
#include "bdmix/evolve.hpp"
#include "bdmix/spectral.hpp"
#include "oracle.hpp"

using namespace bdmix;

namespace {

Chain family(FamilyKind kind, std::size_t n) {
  FamilySpec s;
  s.kind = kind;
  s.n = n;
  return generate(s);
}

}  // namespace

TEST(Cutoff, AnalyzeTwoState) {
  const std::vector<double> grid{0.25, 0.1};
  const FamilyRow r = analyze_chain(oracle::c2(), grid);
  EXPECT_EQ(r.t_mix, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(r.t_mix_quarter, 1u);
  EXPECT_NEAR(r.t_rel, 1.0, 1e-15);
  EXPECT_NEAR(r.product, 1.0, 1e-15);
  EXPECT_THROW(analyze_chain(oracle::c2(), std::vector<double>{0.7}), InvalidInput);
}

TEST(Cutoff, AnalyzeBiasedMatchesIndependentOracles) {
  const Chain c = family(FamilyKind::biased_walk, 64);
  const std::vector<double> grid{0.25, 0.1};
  const FamilyRow r = analyze_chain(c, grid);
  const auto ev = oracle::eigenvalues(c);
  const double gap = 1.0 - std::max(std::abs(ev[1]), std::abs(ev.back()));
  EXPECT_NEAR(r.gap, gap, 1e-10);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(r.t_mix[k], oracle::linear_mixing_time(c, grid[k]));
    EXPECT_EQ(r.t_mix_complement[k], oracle::linear_mixing_time(c, 1 - grid[k]));
    EXPECT_EQ(r.window[k], static_cast<double>(r.t_mix[k]) - static_cast<double>(r.t_mix_complement[k]));
    EXPECT_GE(r.ratio[k], 1.0);
  }
  EXPECT_GE(r.t_mix[1], r.t_mix[0]);
  EXPECT_NEAR(r.product, r.gap * static_cast<double>(r.t_mix_quarter), 1e-12);
}

TEST(Cutoff, FamilyScanSmallSizes) {
  FamilySpec spec;
  spec.kind = FamilyKind::biased_walk;
  spec.name = "biased";
  const std::vector<std::size_t> sizes{16, 32, 64};
  const std::vector<double> grid{0.1, 0.25};
  const FamilyReport rep = family_scan(spec, sizes, grid);
  ASSERT_EQ(rep.rows.size(), 3u);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    EXPECT_EQ(rep.rows[i].n, sizes[i]);
    EXPECT_TRUE(rep.rows[i].ok);
    EXPECT_EQ(rep.rows[i].t_mix, analyze_chain(family(FamilyKind::biased_walk, sizes[i]), grid).t_mix);
  }
  EXPECT_TRUE(rep.product_strictly_increasing);
  ASSERT_EQ(rep.trends.size(), 2u);
  EXPECT_TRUE(rep.trends[0].ratio_strictly_decreasing);
}

TEST(Cutoff, FamilyScanRecordsFailingRows) {
  FamilySpec spec;
  spec.kind = FamilyKind::custom;
  spec.custom = [](std::size_t n) {
    if (n == 3) throw InvalidInput("boom");
    return oracle::c2();
  };
  const std::vector<std::size_t> sizes{1, 3};
  const std::vector<double> grid{0.25};
  const FamilyReport rep = family_scan(spec, sizes, grid);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_TRUE(rep.rows[0].ok);
  EXPECT_FALSE(rep.rows[1].ok);
  EXPECT_NE(rep.rows[1].error.find("boom"), std::string::npos);
}

TEST(Cutoff, WindowBound) {
  const WindowVerdict c2 = window_bound_check(oracle::c2(), 0.1);
  // d(0) = 1/2 is already below 0.9, so t_mix(0.9) = 0 while t_mix(0.1) = 1.
  EXPECT_EQ(c2.t_mix_eps, 1u);
  EXPECT_EQ(c2.t_mix_complement, 0u);
  EXPECT_EQ(c2.lhs, 1.0);
  EXPECT_TRUE(c2.holds);
  EXPECT_DOUBLE_EQ(c2.c1, 24 * 64);
  EXPECT_DOUBLE_EQ(c2.c2, std::log2(10.0) / std::pow(0.1, 2.5));
  EXPECT_DOUBLE_EQ(c2.c_eps_used, std::max(c2.c1, c2.c2));

  for (FamilyKind k : {FamilyKind::biased_walk, FamilyKind::lazy_srw}) {
    const WindowVerdict v = window_bound_check(family(k, 256), 0.1);
    EXPECT_TRUE(v.holds);
    EXPECT_GT(v.lhs, 0.0);
    EXPECT_NEAR(v.rhs, v.c_eps_used * std::sqrt(v.t_rel * static_cast<double>(v.t_mix_quarter)), 1e-9 * v.rhs);
  }
  EXPECT_THROW(window_bound_check(oracle::c2(), 0.5), InvalidInput);
  EXPECT_THROW(window_bound_check(oracle::c4(), 0.1), InvalidInput);
}

TEST(Cutoff, LemmaSuiteTwoState) {
  const LemmaSuiteReport r = lemma_suite(oracle::c2(), 0.05);
  for (const char* id : {"a", "b", "c", "e"}) EXPECT_EQ(r.at(id).status, CheckStatus::holds) << id;
  EXPECT_EQ(r.at("d").status, CheckStatus::not_applicable);
  EXPECT_FALSE(r.at("d").note.empty());
  EXPECT_FALSE(r.theorem_violation());
  EXPECT_THROW(r.at("z"), InvalidInput);
}

TEST(Cutoff, LemmaSuiteBiased) {
  const LemmaSuiteReport r = lemma_suite(family(FamilyKind::biased_walk, 128), 0.05);
  EXPECT_FALSE(r.theorem_violation());
  for (const auto& c : r.checks) {
    if (c.theorem_backed) EXPECT_NE(c.status, CheckStatus::violated) << c.id << ": " << c.note;
  }
}

TEST(CutoffProperties, RandomLazyChainsHaveNoTheoremViolations) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const Chain c = oracle::random_lazy(rng, 1 + trial % 24);
    const double eps = trial % 2 ? 0.05 : 0.01;
    const LemmaSuiteReport r = lemma_suite(c, eps);
    for (const auto& chk : r.checks) {
      if (chk.theorem_backed) {
        EXPECT_NE(chk.status, CheckStatus::violated) << "trial " << trial << " check " << chk.id << " " << chk.note;
      }
    }
    EXPECT_TRUE(window_bound_check(c, eps).holds) << trial;
  }
}
