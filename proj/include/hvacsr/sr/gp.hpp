#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "hvacsr/core/lag_features.hpp"
#include "hvacsr/sr/affine_model.hpp"
#include "hvacsr/sr/expr.hpp"

namespace hvacsr::sr {

struct GPConfig {
  int population_size = 1000;
  int generations = 60;
  int tournament_size = 5;
  double crossover_prob = 0.7;
  double mutation_prob = 0.3;
  int max_complexity = 25;
  double parsimony = 1.05;
  int restarts = 5;
  std::uint64_t rng_seed = 42;
  int workers = 1;  // fitness-evaluation threads; results do not depend on it
  int init_max_depth = 4;
  int elite = 5;

  void validate() const;
};

struct FrontEntry {
  int complexity = 0;
  double mse = 0.0;
  Expr expr;
};

/// Non-dominated (complexity, mse) set: complexity strictly increasing, mse strictly decreasing.
class ParetoFront {
 public:
  /// Order-independent: exact (complexity, mse) ties keep the lexicographically smaller expression.
  void merge(FrontEntry entry);
  void merge(const ParetoFront& other);

  const std::vector<FrontEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<FrontEntry> entries_;
};

using Rng = std::mt19937_64;

/// Independent stream for (run seed, generation, individual).
Rng derive_stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t individual);

struct VariationContext {
  int n_features = 1;
  int max_complexity = 25;
  double constant_scale = 1.0;
};

enum class MutationKind { PointOperator, PerturbConstant, SwapFeature, Grow, Prune };

/// Random admissible tree ("full" fills every branch to max_depth).
Expr random_tree(Rng& rng, const VariationContext& ctx, int max_depth, bool full);

/// Random mutation; output is admissible and within max_complexity, or the input unchanged.
Expr mutate(const Expr& expr, Rng& rng, const VariationContext& ctx);
Expr mutate(const Expr& expr, Rng& rng, const VariationContext& ctx, MutationKind kind);

/// Subtree exchange followed by repair_offspring on both children.
std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, Rng& rng, const VariationContext& ctx);

/// Replaces the subtree inserted at `inserted_at` by a constant when the child exceeds
/// max_complexity, then every feature-by-feature product by a constant.
Expr repair_offspring(Expr child, std::size_t inserted_at, int max_complexity);

double selection_score(double mse, int complexity, double parsimony);

ParetoFront run_gp(const FeatureMatrix& data, const GPConfig& config);

/// `config.restarts` independent runs seeded from rng_seed + restart index.
std::vector<ParetoFront> run_gp_restarts(const FeatureMatrix& data, const GPConfig& config);

struct Selection {
  AffineModel model;
  Expr expr;
  std::size_t front_index = 0;
  double score = 0.0;
};

/// Minimizes mse * parsimony^complexity across all fronts; ties go to lower complexity,
/// then to the lexicographically smaller support.
Selection select_best(const std::vector<ParetoFront>& fronts, double parsimony,
                      const std::vector<FeatureColumn>& columns);

}  // namespace hvacsr::sr
