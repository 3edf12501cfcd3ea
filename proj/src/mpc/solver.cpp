#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "hvacsr/core/error.hpp"
#include "hvacsr/mpc/interior_point_qp.hpp"
#include "hvacsr/mpc/problem.hpp"

namespace hvacsr::mpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative IPM residuals accepted when the iteration limit is reached.
constexpr double kLooseTolerance = 1e-6;

QpSolveResult solve_states(const MPCProblem& p, const std::vector<StepState>& states) {
  p.validate();
  const auto T = static_cast<Eigen::Index>(p.horizon);
  if (static_cast<Eigen::Index>(states.size()) != T) {
    throw SolverError("on/off pattern has " + std::to_string(states.size()) + " entries for horizon " +
                      std::to_string(T));
  }

  // Column of each non-Off power in the QP, -1 when fixed at zero.
  std::vector<Eigen::Index> col(static_cast<std::size_t>(T), -1);
  Eigen::Index nd = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (states[static_cast<std::size_t>(t)] != StepState::Off) col[static_cast<std::size_t>(t)] = nd++;
  }
  const Eigen::Index s0 = nd, ri = nd + T, n = nd + T + 1;

  Eigen::MatrixXd b(T + 1, nd);  // temperature response restricted to active columns
  for (Eigen::Index t = 0; t < T; ++t) {
    if (col[static_cast<std::size_t>(t)] >= 0) b.col(col[static_cast<std::size_t>(t)]) = p.response.col(t);
  }

  QuadraticProgram<double> qp;
  qp.hessian = Eigen::MatrixXd::Zero(n, n);
  qp.gradient = Eigen::VectorXd::Zero(n);
  const double ce = p.step_hours() / p.scales.energy_scale;
  qp.gradient.head(nd).setConstant(ce);
  const double wc = 1.0 / p.scales.comfort_scale;
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(T + 1);
  for (Eigen::Index t = 1; t <= T; ++t) weights[t] = p.occupancy[t] * wc;
  const Eigen::VectorXd offset = p.free_response.array() - p.comfort_temp;
  qp.hessian.topLeftCorner(nd, nd) = 2.0 * b.transpose() * weights.asDiagonal() * b;
  qp.gradient.head(nd) += 2.0 * b.transpose() * weights.cwiseProduct(offset);
  qp.constant = weights.dot(offset.cwiseAbs2());
  qp.gradient.segment(s0, T).setConstant(p.penalties.slack_penalty / p.scales.slack_scale);
  qp.gradient[ri] = 1.0 / p.scales.ramp_scale;

  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> rhs;
  Eigen::Index row = 0;
  for (Eigen::Index t = 1; t <= T; ++t) {
    // lower_t - s_t <= T_t <= upper_t + s_t
    for (int sign : {-1, 1}) {
      for (Eigen::Index j = 0; j < nd; ++j) {
        if (b(t, j) != 0.0) trip.emplace_back(row, j, sign * b(t, j));
      }
      trip.emplace_back(row, s0 + t - 1, -1.0);
      rhs.push_back(sign < 0 ? p.free_response[t] - p.lower[t] : p.upper[t] - p.free_response[t]);
      ++row;
    }
  }
  for (Eigen::Index t = 0; t < T; ++t) {
    // gamma_t (D_t - D_{t-1}) <= r
    const double g = p.ramp_weight[t];
    double r = 0.0;
    if (col[static_cast<std::size_t>(t)] >= 0) trip.emplace_back(row, col[static_cast<std::size_t>(t)], g);
    if (t == 0) {
      r = g * p.previous_power;
    } else if (col[static_cast<std::size_t>(t - 1)] >= 0) {
      trip.emplace_back(row, col[static_cast<std::size_t>(t - 1)], -g);
    }
    trip.emplace_back(row, ri, -1.0);
    rhs.push_back(r);
    ++row;
  }
  qp.rows.resize(row, n);
  qp.rows.setFromTriplets(trip.begin(), trip.end());
  qp.rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), row);

  qp.lower = Eigen::VectorXd::Zero(n);
  qp.upper = Eigen::VectorXd::Constant(n, kInf);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto j = col[static_cast<std::size_t>(t)];
    if (j < 0) continue;
    qp.upper[j] = p.d_max[t];
    if (states[static_cast<std::size_t>(t)] == StepState::On) qp.lower[j] = p.d_min[t];
  }

  const auto res = solve_interior_point(qp);
  QpSolveResult out;
  out.iterations = res.iterations;
  if (res.status == QpStatus::Infeasible) {
    out.certificate = res.certificate;
    return out;
  }
  const bool usable = res.status == QpStatus::Optimal ||
                      (res.status == QpStatus::IterationLimit && res.primal_residual < kLooseTolerance &&
                       res.dual_residual < kLooseTolerance && res.complementarity < kLooseTolerance);
  if (!usable) {
    out.certificate = std::string("interior point ") + to_string(res.status);
    return out;
  }

  auto& s = out.solution;
  s.power = Eigen::VectorXd::Zero(T);
  s.on.assign(static_cast<std::size_t>(T), 0);
  s.capacity = Eigen::VectorXd::Zero(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto j = col[static_cast<std::size_t>(t)];
    if (j < 0) continue;
    const double lo = states[static_cast<std::size_t>(t)] == StepState::On ? p.d_min[t] : 0.0;
    const double d = std::clamp(res.x[j], lo, p.d_max[t]);
    s.power[t] = d;
    const auto& lin = p.hvac[static_cast<std::size_t>(t)];
    if (d >= lin.d_min) {
      s.on[static_cast<std::size_t>(t)] = 1;
      s.capacity[t] = lin.capacity(d);
    } else if (d > 0.0) {
      // Relaxed point inside the gap: convex hull of off and the minimum on point.
      s.on[static_cast<std::size_t>(t)] = 1;
      s.capacity[t] = lin.capacity(lin.d_min) * d / lin.d_min;
    }
  }
  s.slack = Eigen::VectorXd::Zero(T + 1);
  s.slack.tail(T) = res.x.segment(s0, T).cwiseMax(0.0);
  s.max_ramp = std::max(res.x[ri], 0.0);
  s.temperature = p.free_response + p.response * s.power;
  s.terms = evaluate_terms(p, s.power, s.slack, s.max_ramp);
  s.objective = s.terms.total();
  s.stats.qp_iterations = res.iterations;
  out.feasible = true;
  return out;
}

std::vector<StepState> states_of(const std::vector<std::uint8_t>& pattern) {
  std::vector<StepState> st;
  st.reserve(pattern.size());
  for (auto u : pattern) st.push_back(u ? StepState::On : StepState::Off);
  return st;
}

}  // namespace

QpSolveResult solve_qp(const MPCProblem& problem, const std::vector<std::uint8_t>& fixed_onoff) {
  auto r = solve_states(problem, states_of(fixed_onoff));
  if (r.feasible) {
    for (std::size_t t = 0; t < fixed_onoff.size(); ++t) r.solution.on[t] = fixed_onoff[t] ? 1 : 0;
  }
  return r;
}

QpSolveResult solve_relaxation(const MPCProblem& problem, const std::vector<StepState>& states) {
  return solve_states(problem, states);
}

namespace {

struct Node {
  std::vector<StepState> states;
  ScheduleSolution relaxed;
};

}  // namespace

ScheduleSolution branch_and_bound(const MPCProblem& p, const BranchAndBoundSettings& settings,
                                  const std::vector<std::uint8_t>* warm_start) {
  const auto started = std::chrono::steady_clock::now();
  const auto T = static_cast<std::size_t>(p.horizon);
  int nodes = 0, iterations = 0;
  std::optional<ScheduleSolution> incumbent;

  auto offer = [&](const std::vector<std::uint8_t>& pattern) {
    auto r = solve_qp(p, pattern);
    iterations += r.iterations;
    if (r.feasible && (!incumbent || r.solution.objective < incumbent->objective)) incumbent = std::move(r.solution);
  };
  auto relax = [&](const std::vector<StepState>& states) -> std::optional<Node> {
    ++nodes;
    auto r = solve_relaxation(p, states);
    iterations += r.iterations;
    if (!r.feasible) return std::nullopt;
    return Node{states, std::move(r.solution)};
  };
  auto pruned = [&](double bound) {
    if (!incumbent) return false;
    const double tol = std::max(settings.absolute_gap, settings.mip_gap * std::abs(incumbent->objective));
    return bound >= incumbent->objective - tol;
  };
  // Step deepest inside the gap, or T when the relaxed point is already on/off feasible.
  auto branch_step = [&](const Node& node) {
    std::size_t best = T;
    double depth = settings.gap_tolerance;
    for (std::size_t t = 0; t < T; ++t) {
      if (node.states[t] != StepState::Free) continue;
      const double d = node.relaxed.power[static_cast<Eigen::Index>(t)];
      const double dd = std::min(d, p.d_min[static_cast<Eigen::Index>(t)] - d);
      if (dd > depth) {
        depth = dd;
        best = t;
      }
    }
    return best;
  };
  auto pattern_of = [&](const Node& node) {
    std::vector<std::uint8_t> pat(T, 0);
    for (std::size_t t = 0; t < T; ++t) {
      if (node.states[t] == StepState::On) {
        pat[t] = 1;
      } else if (node.states[t] == StepState::Free) {
        pat[t] = node.relaxed.power[static_cast<Eigen::Index>(t)] > 0.5 * p.d_min[static_cast<Eigen::Index>(t)];
      }
    }
    return pat;
  };

  auto root = relax(std::vector<StepState>(T, StepState::Free));
  if (!root) throw SolverError("root relaxation failed");
  if (warm_start && warm_start->size() == T) offer(*warm_start);

  std::vector<Node> stack;
  bool limit_hit = false;
  if (branch_step(*root) == T) {
    offer(pattern_of(*root));
  } else {
    offer(pattern_of(*root));  // rounding heuristic
    stack.push_back(std::move(*root));
  }

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (pruned(node.relaxed.objective)) continue;
    const std::size_t k = branch_step(node);
    if (k == T) {
      offer(pattern_of(node));
      continue;
    }
    if (nodes + 2 > settings.node_limit) {
      limit_hit = true;
      break;
    }
    std::vector<Node> children;
    for (StepState s : {StepState::Off, StepState::On}) {
      auto states = node.states;
      states[k] = s;
      auto child = relax(states);
      if (!child || pruned(child->relaxed.objective)) continue;
      if (branch_step(*child) == T) {
        offer(pattern_of(*child));
        continue;
      }
      children.push_back(std::move(*child));
    }
    // Worse child first so the better one is explored next.
    std::sort(children.begin(), children.end(), [](const Node& a, const Node& b) {
      return a.relaxed.objective > b.relaxed.objective;
    });
    for (auto& c : children) stack.push_back(std::move(c));
  }

  if (!incumbent) throw SolverError("branch and bound found no feasible on/off pattern");
  ScheduleSolution out = std::move(*incumbent);
  out.stats.nodes = nodes;
  out.stats.qp_iterations = iterations;
  out.stats.node_limit_hit = limit_hit;
  out.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return out;
}

}  // namespace hvacsr::mpc
