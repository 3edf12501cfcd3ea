#include "hvacsr/sr/expr.hpp"

#include <cstdio>
#include <functional>

#include "hvacsr/core/error.hpp"

namespace hvacsr::sr {

Expr Expr::constant(double v) { return Expr({Node{Op::Constant, -1, v}}); }

Expr Expr::feature(int index) {
  if (index < 0) throw DataError("feature index must be non-negative");
  return Expr({Node{Op::Feature, index, 0.0}});
}

Expr Expr::binary(Op op, const Expr& a, const Expr& b) {
  std::vector<Node> nodes;
  nodes.reserve(1 + a.size() + b.size());
  nodes.push_back(Node{op, -1, 0.0});
  nodes.insert(nodes.end(), a.nodes_.begin(), a.nodes_.end());
  nodes.insert(nodes.end(), b.nodes_.begin(), b.nodes_.end());
  return Expr(std::move(nodes));
}

std::size_t Expr::subtree_end(std::size_t i) const {
  std::size_t pending = 1;
  while (pending > 0) {
    pending += nodes_[i].is_leaf() ? 0 : 2;
    --pending;
    ++i;
  }
  return i;
}

Expr Expr::subtree(std::size_t i) const {
  const auto end = subtree_end(i);
  return Expr(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                nodes_.begin() + static_cast<std::ptrdiff_t>(end)));
}

Expr Expr::replace_subtree(std::size_t i, const Expr& replacement) const {
  const auto end = subtree_end(i);
  std::vector<Node> nodes;
  nodes.reserve(nodes_.size() - (end - i) + replacement.size());
  nodes.insert(nodes.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
  nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
  nodes.insert(nodes.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
  return Expr(std::move(nodes));
}

bool Expr::is_constant_only(std::size_t i) const {
  const auto end = subtree_end(i);
  for (auto k = i; k < end; ++k) {
    if (nodes_[k].op == Op::Feature) return false;
  }
  return true;
}

std::size_t Expr::first_nonaffine_mul() const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op != Op::Mul) continue;
    const auto left = i + 1;
    const auto right = subtree_end(left);
    if (!is_constant_only(left) && !is_constant_only(right)) return i;
  }
  return npos;
}

bool Expr::is_affine_admissible() const { return first_nonaffine_mul() == npos; }

int Expr::max_feature() const {
  int m = -1;
  for (const auto& n : nodes_) {
    if (n.op == Op::Feature) m = std::max(m, n.feature);
  }
  return m;
}

std::vector<std::size_t> Expr::constant_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].op == Op::Constant) out.push_back(i);
  }
  return out;
}

std::vector<double> Expr::constants() const {
  std::vector<double> out;
  for (const auto& n : nodes_) {
    if (n.op == Op::Constant) out.push_back(n.value);
  }
  return out;
}

void Expr::set_constants(std::span<const double> values) {
  std::size_t k = 0;
  for (auto& n : nodes_) {
    if (n.op != Op::Constant) continue;
    if (k >= values.size()) throw DataError("too few constants supplied");
    n.value = values[k++];
  }
  if (k != values.size()) throw DataError("too many constants supplied");
}

std::string Expr::to_string(const std::vector<std::string>& names) const {
  std::function<std::string(std::size_t&)> render = [&](std::size_t& i) -> std::string {
    const Node n = nodes_[i++];
    switch (n.op) {
      case Op::Constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        return buf;
      }
      case Op::Feature:
        if (static_cast<std::size_t>(n.feature) < names.size()) return names[static_cast<std::size_t>(n.feature)];
        return "x" + std::to_string(n.feature);
      default: {
        auto a = render(i);
        auto b = render(i);
        const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : " * ";
        return "(" + a + sym + b + ")";
      }
    }
  };
  std::size_t i = 0;
  return render(i);
}

namespace {

double eval_at(std::span<const Node> nodes, std::size_t& i, std::span<const double> row) {
  const Node& n = nodes[i++];
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Feature:
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= row.size()) {
        throw DataError("feature index " + std::to_string(n.feature) + " out of range for row of length " +
                        std::to_string(row.size()));
      }
      return row[static_cast<std::size_t>(n.feature)];
    case Op::Add: {
      const double a = eval_at(nodes, i, row);
      return a + eval_at(nodes, i, row);
    }
    case Op::Sub: {
      const double a = eval_at(nodes, i, row);
      return a - eval_at(nodes, i, row);
    }
    case Op::Mul: {
      const double a = eval_at(nodes, i, row);
      return a * eval_at(nodes, i, row);
    }
  }
  return 0.0;
}

}  // namespace

double evaluate(const Expr& expr, std::span<const double> row) {
  std::size_t i = 0;
  return eval_at(expr.nodes(), i, row);
}

double evaluate(const Expr& expr, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::RowVectorXd copy = row;
  return evaluate(expr, std::span<const double>(copy.data(), static_cast<std::size_t>(copy.size())));
}

}  // namespace hvacsr::sr
