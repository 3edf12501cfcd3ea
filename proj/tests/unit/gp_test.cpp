#include <gtest/gtest.h>

#include "hvacsr/core/error.hpp"
#include "hvacsr/sr/gp.hpp"
#include "support.hpp"

using namespace hvacsr;
using namespace hvacsr::sr;

namespace {

GPConfig small_config() {
  GPConfig c;
  c.population_size = 120;
  c.generations = 12;
  c.restarts = 1;
  c.rng_seed = 5;
  return c;
}

FeatureMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  testing_support::Gen g(seed);
  FeatureMatrix fm;
  fm.x.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) fm.x(i, j) = g.uniform(-5, 5);
  }
  for (int j = 0; j < cols; ++j) fm.columns.push_back({"T_in", j * 12});
  fm.target = Eigen::VectorXd::Zero(rows);
  return fm;
}

}  // namespace

TEST(ParetoFront, KeepsOnlyNonDominated) {
  ParetoFront f;
  f.merge({5, 1.0, Expr::constant(1)});
  f.merge({3, 2.0, Expr::constant(2)});
  f.merge({7, 1.5, Expr::constant(3)});  // dominated by (5, 1.0)
  f.merge({9, 0.5, Expr::constant(4)});
  f.merge({5, 0.9, Expr::constant(5)});  // replaces (5, 1.0)
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f.entries()[0].complexity, 3);
  EXPECT_EQ(f.entries()[1].mse, 0.9);
  EXPECT_EQ(f.entries()[2].complexity, 9);
}

TEST(SelectBest, SingletonFront) {
  ParetoFront f;
  f.merge({1, 0.25, Expr::feature(0)});
  const auto s = select_best({f}, 1.05, {{"T_in", 0}});
  EXPECT_EQ(s.model.complexity, 1);
  EXPECT_DOUBLE_EQ(s.model.coefficient("T_in[t]"), 1.0);
}

TEST(SelectBest, ParsimonyPrefersTheSimplerEntry) {
  // 1.0 * 1.05^3 = 1.158 against 0.99 * 1.05^10 = 1.613.
  EXPECT_NEAR(selection_score(1.0, 3, 1.05), 1.157625, 1e-12);
  EXPECT_NEAR(selection_score(0.99, 10, 1.05), 1.6126, 1e-4);
  ParetoFront f;
  f.merge({3, 1.0, Expr::add(Expr::feature(0), Expr::constant(1))});
  f.merge({10, 0.99, Expr::add(Expr::feature(0), Expr::constant(2))});
  EXPECT_EQ(select_best({f}, 1.05, {{"T_in", 0}}).model.complexity, 3);
}

TEST(SelectBest, EqualScoresGoToLowerComplexity) {
  ParetoFront c, d;
  c.merge({5, 1.0, Expr::add(Expr::feature(0), Expr::constant(1))});
  d.merge({3, 1.0, Expr::constant(2)});
  const auto s = select_best({c, d}, 1.0, {{"T_in", 0}});
  EXPECT_EQ(s.model.complexity, 3);
  EXPECT_EQ(s.front_index, 1u);
}

TEST(SelectBest, EmptyFrontsAreAnError) {
  EXPECT_THROW(select_best({ParetoFront{}}, 1.05, {}), DataError);
}

TEST(Variation, PruneOfALeafIsIdentity) {
  Rng rng(1);
  const VariationContext ctx{3, 25, 1.0};
  const auto leaf = Expr::feature(2);
  EXPECT_EQ(mutate(leaf, rng, ctx, MutationKind::Prune), leaf);
}

TEST(Variation, ConstantPerturbationIsLocal) {
  Rng rng(2);
  const VariationContext ctx{3, 25, 1.0};
  const auto e = Expr::add(Expr::mul(Expr::constant(2.0), Expr::feature(0)), Expr::constant(5.0));
  const auto m = mutate(e, rng, ctx, MutationKind::PerturbConstant);
  ASSERT_EQ(m.size(), e.size());
  int changed = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!(m.nodes()[i] == e.nodes()[i])) {
      ++changed;
      EXPECT_EQ(e.nodes()[i].op, Op::Constant);
    }
  }
  EXPECT_EQ(changed, 1);
}

TEST(Variation, CrossoverOfIdenticalParents) {
  Rng rng(3);
  const VariationContext ctx{3, 25, 1.0};
  const auto x = Expr::sub(Expr::mul(Expr::constant(0.5), Expr::feature(1)), Expr::feature(0));
  for (int k = 0; k < 20; ++k) {
    const auto [a, b] = crossover(x, x, rng, ctx);
    EXPECT_LE(a.complexity(), 25);
    EXPECT_TRUE(a.is_affine_admissible());
    EXPECT_TRUE(b.is_affine_admissible());
  }
}

TEST(Variation, RepairReplacesFeatureProducts) {
  // (x0 * x1) + 3 built by hand, as if x1 had just been inserted at node 3.
  const auto bad = Expr::add(Expr::mul(Expr::feature(0), Expr::feature(1)), Expr::constant(3));
  const auto fixed = repair_offspring(bad, 3, 25);
  EXPECT_TRUE(fixed.is_affine_admissible());
  EXPECT_EQ(fixed, Expr::add(Expr::constant(1.0), Expr::constant(3)));
}

TEST(Variation, RepairEnforcesTheComplexityCap) {
  auto big = Expr::feature(0);
  for (int k = 0; k < 10; ++k) big = Expr::add(big, Expr::feature(k % 3));
  const auto e = Expr::add(Expr::constant(1), big);
  const auto fixed = repair_offspring(e, 2, 9);
  EXPECT_EQ(fixed, Expr::add(Expr::constant(1), Expr::constant(1.0)));
}

TEST(RunGp, RecoversAnIdentityTarget) {
  auto fm = random_matrix(200, 4, 11);
  fm.target = fm.x.col(2);
  const auto front = run_gp(fm, small_config());
  bool found = false;
  for (const auto& e : front.entries()) found |= e.mse < 1e-12 && e.complexity <= 3;
  EXPECT_TRUE(found);
}

TEST(RunGp, ConstantTargetGivesItsValue) {
  auto fm = random_matrix(50, 3, 12);
  fm.target.setConstant(20.0);
  const auto fronts = run_gp_restarts(fm, small_config());
  const auto s = select_best(fronts, 1.05, fm.columns);
  EXPECT_DOUBLE_EQ(s.model.intercept, 20.0);
  EXPECT_TRUE(s.model.terms.empty());
}

TEST(RunGp, RestartCountAndSeeds) {
  auto fm = random_matrix(80, 3, 13);
  fm.target = 2.0 * fm.x.col(0) - fm.x.col(1);
  auto cfg = small_config();
  cfg.restarts = 3;
  cfg.generations = 3;
  const auto fronts = run_gp_restarts(fm, cfg);
  ASSERT_EQ(fronts.size(), 3u);
  cfg.restarts = 1;
  cfg.rng_seed += 2;
  const auto third = run_gp(fm, cfg);
  ASSERT_EQ(third.size(), fronts[2].size());
  for (std::size_t i = 0; i < third.size(); ++i) EXPECT_EQ(third.entries()[i].expr, fronts[2].entries()[i].expr);
}

TEST(GPConfig, Validation) {
  GPConfig c;
  c.population_size = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = GPConfig{};
  c.parsimony = 0.9;
  EXPECT_THROW(c.validate(), ConfigError);
  c = GPConfig{};
  c.workers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}
