#include "hvacsr/sr/gp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "hvacsr/core/error.hpp"
#include "hvacsr/sr/fit.hpp"

namespace hvacsr::sr {

void GPConfig::validate() const {
  if (population_size < 2) throw ConfigError("gp population_size must be at least 2");
  if (generations < 0) throw ConfigError("gp generations must be non-negative");
  if (tournament_size < 1) throw ConfigError("gp tournament_size must be positive");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("gp crossover_prob must lie in [0,1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ConfigError("gp mutation_prob must lie in [0,1]");
  if (max_complexity < 1) throw ConfigError("gp max_complexity must be positive");
  if (!(parsimony > 1.0)) throw ConfigError("gp parsimony must exceed 1");
  if (restarts < 1) throw ConfigError("gp restarts must be at least 1");
  if (workers < 1) throw ConfigError("gp workers must be at least 1");
  if (init_max_depth < 1) throw ConfigError("gp init_max_depth must be positive");
  if (elite < 0 || elite >= population_size) throw ConfigError("gp elite must lie in [0, population_size)");
}

namespace {

bool entry_less(const FrontEntry& a, const FrontEntry& b) {
  if (a.complexity != b.complexity) return a.complexity < b.complexity;
  if (a.mse != b.mse) return a.mse < b.mse;
  return a.expr.to_string() < b.expr.to_string();
}

}  // namespace

void ParetoFront::merge(FrontEntry entry) {
  if (!std::isfinite(entry.mse)) return;
  for (const auto& e : entries_) {
    const bool weakly_dominates = e.complexity <= entry.complexity && e.mse <= entry.mse;
    if (weakly_dominates && !(e.complexity == entry.complexity && e.mse == entry.mse && entry_less(entry, e))) {
      return;
    }
  }
  std::erase_if(entries_, [&](const FrontEntry& e) {
    return entry.complexity <= e.complexity && entry.mse <= e.mse;
  });
  const auto pos = std::lower_bound(entries_.begin(), entries_.end(), entry,
                                    [](const FrontEntry& a, const FrontEntry& b) { return a.complexity < b.complexity; });
  entries_.insert(pos, std::move(entry));
}

void ParetoFront::merge(const ParetoFront& other) {
  for (const auto& e : other.entries_) merge(e);
}

Rng derive_stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t individual) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  h = mix(h ^ mix(generation + 0x1234567ULL));
  h = mix(h ^ mix(individual + 0x89abcdefULL));
  return Rng(h);
}

namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double random_constant(Rng& rng, const VariationContext& ctx) {
  return std::normal_distribution<double>(0.0, 1.0)(rng) * ctx.constant_scale;
}

Expr random_leaf(Rng& rng, const VariationContext& ctx) {
  if (ctx.n_features > 0 && uniform01(rng) < 0.7) return Expr::feature(uniform_int(rng, 0, ctx.n_features - 1));
  return Expr::constant(random_constant(rng, ctx));
}

Expr grow_tree(Rng& rng, const VariationContext& ctx, int depth, int max_depth, bool full) {
  const bool leaf = depth >= max_depth || (!full && depth > 0 && uniform01(rng) < 0.35);
  if (leaf) return random_leaf(rng, ctx);
  const int op = uniform_int(rng, 0, 2);
  if (op == 2) {
    Expr c = Expr::constant(random_constant(rng, ctx));
    Expr other = grow_tree(rng, ctx, depth + 1, max_depth, full);
    return uniform01(rng) < 0.5 ? Expr::mul(c, other) : Expr::mul(other, c);
  }
  Expr a = grow_tree(rng, ctx, depth + 1, max_depth, full);
  Expr b = grow_tree(rng, ctx, depth + 1, max_depth, full);
  return op == 0 ? Expr::add(a, b) : Expr::sub(a, b);
}

bool valid(const Expr& e, const VariationContext& ctx) {
  return e.complexity() <= ctx.max_complexity && e.is_affine_admissible();
}

std::vector<std::size_t> positions_where(const Expr& e, auto pred) {
  std::vector<std::size_t> out;
  const auto nodes = e.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (pred(nodes[i])) out.push_back(i);
  }
  return out;
}

std::size_t pick(Rng& rng, const std::vector<std::size_t>& v) {
  return v[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(v.size()) - 1))];
}

}  // namespace

Expr random_tree(Rng& rng, const VariationContext& ctx, int max_depth, bool full) {
  for (int depth = max_depth; depth >= 0; --depth) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Expr e = grow_tree(rng, ctx, 0, depth, full);
      if (e.complexity() <= ctx.max_complexity) return e;
    }
  }
  return random_leaf(rng, ctx);
}

Expr mutate(const Expr& expr, Rng& rng, const VariationContext& ctx, MutationKind kind) {
  Expr out = expr;
  switch (kind) {
    case MutationKind::PointOperator: {
      const auto internal = positions_where(expr, [](const Node& n) { return !n.is_leaf(); });
      if (internal.empty()) return expr;
      const auto i = pick(rng, internal);
      Node n = expr.nodes()[i];
      const Op choices[] = {Op::Add, Op::Sub, Op::Mul};
      Op next = n.op;
      while (next == n.op) next = choices[uniform_int(rng, 0, 2)];
      n.op = next;
      out.set_node(i, n);
      break;
    }
    case MutationKind::PerturbConstant: {
      const auto consts = expr.constant_positions();
      if (consts.empty()) return expr;
      const auto i = pick(rng, consts);
      Node n = expr.nodes()[i];
      const double scale = 0.1 * std::max(std::abs(n.value), ctx.constant_scale);
      n.value += std::normal_distribution<double>(0.0, 1.0)(rng) * scale;
      out.set_node(i, n);
      break;
    }
    case MutationKind::SwapFeature: {
      const auto feats = positions_where(expr, [](const Node& n) { return n.op == Op::Feature; });
      if (feats.empty() || ctx.n_features < 2) return expr;
      const auto i = pick(rng, feats);
      Node n = expr.nodes()[i];
      int next = n.feature;
      while (next == n.feature) next = uniform_int(rng, 0, ctx.n_features - 1);
      n.feature = next;
      out.set_node(i, n);
      break;
    }
    case MutationKind::Grow: {
      const auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(expr.size()) - 1));
      Expr replacement;
      if (ctx.n_features > 0 && uniform01(rng) < 0.5) {
        Expr term = Expr::mul(Expr::constant(random_constant(rng, ctx)),
                              Expr::feature(uniform_int(rng, 0, ctx.n_features - 1)));
        replacement = uniform01(rng) < 0.5 ? Expr::add(expr.subtree(i), term) : Expr::sub(expr.subtree(i), term);
      } else {
        replacement = random_tree(rng, ctx, 2, false);
      }
      out = expr.replace_subtree(i, replacement);
      break;
    }
    case MutationKind::Prune: {
      const auto internal = positions_where(expr, [](const Node& n) { return !n.is_leaf(); });
      if (internal.empty()) return expr;
      const auto i = pick(rng, internal);
      const auto left = i + 1;
      const auto right = expr.subtree_end(left);
      const int choice = uniform_int(rng, 0, 2);
      Expr replacement = choice == 0   ? expr.subtree(left)
                         : choice == 1 ? expr.subtree(right)
                                       : Expr::constant(random_constant(rng, ctx));
      out = expr.replace_subtree(i, replacement);
      break;
    }
  }
  return valid(out, ctx) ? out : expr;
}

Expr mutate(const Expr& expr, Rng& rng, const VariationContext& ctx) {
  for (int attempt = 0; attempt < 10; ++attempt) {
    const auto kind = static_cast<MutationKind>(uniform_int(rng, 0, 4));
    Expr out = mutate(expr, rng, ctx, kind);
    if (!(out == expr)) return out;
  }
  return expr;
}

Expr repair_offspring(Expr child, std::size_t inserted_at, int max_complexity) {
  if (child.complexity() > max_complexity) child = child.replace_subtree(inserted_at, Expr::constant(1.0));
  for (auto k = child.first_nonaffine_mul(); k != Expr::npos; k = child.first_nonaffine_mul()) {
    child = child.replace_subtree(k, Expr::constant(1.0));
  }
  return child;
}

std::pair<Expr, Expr> crossover(const Expr& a, const Expr& b, Rng& rng, const VariationContext& ctx) {
  const auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(a.size()) - 1));
  const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(b.size()) - 1));
  Expr c1 = a.replace_subtree(i, b.subtree(j));
  Expr c2 = b.replace_subtree(j, a.subtree(i));
  return {repair_offspring(std::move(c1), i, ctx.max_complexity),
          repair_offspring(std::move(c2), j, ctx.max_complexity)};
}

double selection_score(double mse, int complexity, double parsimony) {
  return mse * std::pow(parsimony, complexity);
}

namespace {

struct Individual {
  Expr expr;
  double mse = std::numeric_limits<double>::infinity();
  double score = std::numeric_limits<double>::infinity();
};

template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, int workers, Fn&& fn) {
  if (workers <= 1 || end - begin < 2) {
    for (auto i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (auto i = next.fetch_add(1); i < end; i = next.fetch_add(1)) fn(i);
    });
  }
}

bool better(const Individual& a, std::size_t ia, const Individual& b, std::size_t ib) {
  if (a.score != b.score) return a.score < b.score;
  if (a.expr.complexity() != b.expr.complexity()) return a.expr.complexity() < b.expr.complexity();
  return ia < ib;
}

}  // namespace

ParetoFront run_gp(const FeatureMatrix& data, const GPConfig& config) {
  config.validate();
  if (data.rows() == 0) throw DataError("run_gp requires a non-empty feature matrix");
  const LeastSquaresCache cache(data);
  ParetoFront front;

  const double spread = data.target.maxCoeff() - data.target.minCoeff();
  if (spread == 0.0) {
    front.merge({1, 0.0, Expr::constant(data.target[0])});
    return front;
  }

  const VariationContext ctx{static_cast<int>(data.cols()), config.max_complexity,
                             std::max(cache.target_std(), 1e-6)};
  const auto n = static_cast<std::size_t>(config.population_size);

  auto evaluate_all = [&](std::vector<Individual>& pop, std::size_t from) {
    parallel_for(from, pop.size(), config.workers, [&](std::size_t i) {
      auto fit = fit_constants(pop[i].expr, cache);
      pop[i].expr = std::move(fit.expr);
      pop[i].mse = std::isfinite(fit.mse) ? std::max(fit.mse, 0.0) : std::numeric_limits<double>::infinity();
      pop[i].score = selection_score(pop[i].mse, pop[i].expr.complexity(), config.parsimony);
    });
    for (std::size_t i = 0; i < pop.size(); ++i) front.merge({pop[i].expr.complexity(), pop[i].mse, pop[i].expr});
  };

  std::vector<Individual> pop(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = derive_stream(config.rng_seed, 0, i);
    if (i < static_cast<std::size_t>(ctx.n_features) && i < n / 4) {
      pop[i].expr = Expr::feature(static_cast<int>(i));
    } else {
      const int depth = 1 + static_cast<int>(i % static_cast<std::size_t>(config.init_max_depth));
      pop[i].expr = random_tree(rng, ctx, depth, i % 2 == 0);
    }
  }
  evaluate_all(pop, 0);

  const auto elite = static_cast<std::size_t>(config.elite);
  for (int g = 1; g <= config.generations; ++g) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(elite), order.end(),
                      [&](std::size_t a, std::size_t b) { return better(pop[a], a, pop[b], b); });

    std::vector<Individual> next(n);
    for (std::size_t i = 0; i < elite; ++i) next[i] = pop[order[i]];
    for (std::size_t i = elite; i < n; ++i) {
      Rng rng = derive_stream(config.rng_seed, static_cast<std::uint64_t>(g), i);
      auto tournament = [&]() -> const Individual& {
        auto best = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
        for (int k = 1; k < config.tournament_size; ++k) {
          const auto c = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
          if (better(pop[c], c, pop[best], best)) best = c;
        }
        return pop[best];
      };
      Expr child = tournament().expr;
      if (uniform01(rng) < config.crossover_prob) {
        const Expr& other = tournament().expr;
        auto [c1, c2] = crossover(child, other, rng, ctx);
        child = uniform01(rng) < 0.5 ? std::move(c1) : std::move(c2);
      }
      if (uniform01(rng) < config.mutation_prob) child = mutate(child, rng, ctx);
      next[i].expr = std::move(child);
    }
    pop = std::move(next);
    evaluate_all(pop, elite);
  }
  return front;
}

std::vector<ParetoFront> run_gp_restarts(const FeatureMatrix& data, const GPConfig& config) {
  config.validate();
  std::vector<ParetoFront> fronts;
  for (int r = 0; r < config.restarts; ++r) {
    GPConfig c = config;
    c.rng_seed = config.rng_seed + static_cast<std::uint64_t>(r);
    fronts.push_back(run_gp(data, c));
  }
  return fronts;
}

Selection select_best(const std::vector<ParetoFront>& fronts, double parsimony,
                      const std::vector<FeatureColumn>& columns) {
  const FrontEntry* best = nullptr;
  std::size_t best_front = 0;
  double best_score = std::numeric_limits<double>::infinity();
  std::string best_support;
  auto support_key = [&](const Expr& e) {
    std::string key;
    for (const auto& name : to_affine(e, columns).support()) key += name + ",";
    return key;
  };
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    for (const auto& e : fronts[f].entries()) {
      const double s = selection_score(e.mse, e.complexity, parsimony);
      bool take = best == nullptr || s < best_score;
      if (!take && s == best_score) {
        if (e.complexity != best->complexity) {
          take = e.complexity < best->complexity;
        } else {
          take = support_key(e.expr) < best_support;
        }
      }
      if (take) {
        best = &e;
        best_front = f;
        best_score = s;
        best_support = support_key(e.expr);
      }
    }
  }
  if (best == nullptr) throw DataError("select_best requires at least one non-empty front");
  Selection sel{to_affine(best->expr, columns), best->expr, best_front, best_score};
  sel.model.training_mse = best->mse;
  sel.model.complexity = best->complexity;
  return sel;
}

}  // namespace hvacsr::sr
