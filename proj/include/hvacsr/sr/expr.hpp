#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hvacsr::sr {

/// Node kinds. The operator set is closed: add, sub, mul over feature and constant leaves.
enum class Op : std::uint8_t { Add, Sub, Mul, Feature, Constant };

struct Node {
  Op op = Op::Constant;
  int feature = -1;
  double value = 0.0;

  bool is_leaf() const { return op == Op::Feature || op == Op::Constant; }
  friend bool operator==(const Node&, const Node&) = default;
};

/// Expression tree stored in prefix order; a subtree is a contiguous node range.
class Expr {
 public:
  Expr() : nodes_{Node{}} {}

  static Expr constant(double v);
  static Expr feature(int index);
  static Expr add(const Expr& a, const Expr& b) { return binary(Op::Add, a, b); }
  static Expr sub(const Expr& a, const Expr& b) { return binary(Op::Sub, a, b); }
  static Expr mul(const Expr& a, const Expr& b) { return binary(Op::Mul, a, b); }

  std::span<const Node> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  int complexity() const { return static_cast<int>(nodes_.size()); }

  /// One past the last node of the subtree rooted at `i`.
  std::size_t subtree_end(std::size_t i) const;
  Expr subtree(std::size_t i) const;
  /// Copy with the subtree at `i` replaced by `replacement`.
  Expr replace_subtree(std::size_t i, const Expr& replacement) const;

  bool is_constant_only(std::size_t i = 0) const;
  bool has_features() const { return !is_constant_only(0); }
  /// Every mul node has at least one constant-only operand.
  bool is_affine_admissible() const;
  /// Index of the first mul node whose operands both carry features, or npos.
  std::size_t first_nonaffine_mul() const;

  int max_feature() const;
  std::vector<std::size_t> constant_positions() const;
  std::vector<double> constants() const;
  void set_constants(std::span<const double> values);
  void set_node(std::size_t i, const Node& n) { nodes_[i] = n; }

  /// Infix rendering; `names` may be empty, then features print as x<i>.
  std::string to_string(const std::vector<std::string>& names = {}) const;

  friend bool operator==(const Expr&, const Expr&) = default;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  explicit Expr(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}
  static Expr binary(Op op, const Expr& a, const Expr& b);

  std::vector<Node> nodes_;
};

/// Recursive evaluation on one feature row. Throws DataError on an out-of-range feature.
double evaluate(const Expr& expr, std::span<const double> row);
double evaluate(const Expr& expr, const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace hvacsr::sr
