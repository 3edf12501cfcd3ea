#include "hvacsr/sr/affine_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hvacsr/core/error.hpp"

namespace hvacsr::sr {

double AffineModel::coefficient(std::string_view column_name) const {
  for (const auto& t : terms) {
    if (t.column.name() == column_name) return t.coefficient;
  }
  return 0.0;
}

bool AffineModel::uses_channel(std::string_view channel) const { return max_lag(channel) >= 0; }

int AffineModel::max_lag(std::string_view channel) const {
  int m = -1;
  for (const auto& t : terms) {
    if (t.column.channel == channel) m = std::max(m, t.column.lag);
  }
  return m;
}

std::vector<std::string> AffineModel::support() const {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.column.name());
  return out;
}

Eigen::VectorXd AffineModel::predict(const FeatureMatrix& data) const {
  Eigen::VectorXd out = Eigen::VectorXd::Constant(data.rows(), intercept);
  for (const auto& t : terms) {
    const auto j = data.column_index(t.column.name());
    if (j < 0) throw DataError("feature matrix lacks model column " + t.column.name());
    out += t.coefficient * data.x.col(j);
  }
  return out;
}

std::string AffineModel::equation(int decimals) const {
  auto fmt = [decimals](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return std::string(buf);
  };
  std::string out = "T_in[t+1] =";
  bool first = true;
  for (const auto& t : terms) {
    const double c = t.coefficient;
    if (first) {
      out += c < 0 ? " -" : " ";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    out += fmt(std::abs(c)) + "*" + t.column.name();
    first = false;
  }
  if (first) {
    out += " " + fmt(intercept);
  } else {
    out += (intercept < 0 ? " - " : " + ") + fmt(std::abs(intercept));
  }
  return out;
}

namespace {

struct Expander {
  std::span<const Node> nodes;
  Eigen::Index p;  // n_features + 1
  Eigen::Index m;  // number of constants
  bool with_jacobian;
  std::size_t pos = 0;
  Eigen::Index next_constant = 0;

  void run(Eigen::VectorXd& coef, Eigen::MatrixXd& jac) {
    const Node& n = nodes[pos++];
    switch (n.op) {
      case Op::Constant:
        coef = Eigen::VectorXd::Zero(p);
        coef[0] = n.value;
        if (with_jacobian) {
          jac = Eigen::MatrixXd::Zero(p, m);
          jac(0, next_constant) = 1.0;
        }
        ++next_constant;
        return;
      case Op::Feature:
        if (n.feature < 0 || n.feature + 1 >= p) {
          throw DataError("feature index " + std::to_string(n.feature) + " out of range");
        }
        coef = Eigen::VectorXd::Zero(p);
        coef[n.feature + 1] = 1.0;
        if (with_jacobian) jac = Eigen::MatrixXd::Zero(p, m);
        return;
      default:
        break;
    }
    const std::size_t left_start = pos;
    Eigen::VectorXd a, b;
    Eigen::MatrixXd ja, jb;
    run(a, ja);
    const std::size_t right_start = pos;
    run(b, jb);
    switch (n.op) {
      case Op::Add:
        coef = a + b;
        if (with_jacobian) jac = ja + jb;
        return;
      case Op::Sub:
        coef = a - b;
        if (with_jacobian) jac = ja - jb;
        return;
      case Op::Mul: {
        const bool a_const = constant_only(left_start, right_start);
        const bool b_const = constant_only(right_start, pos);
        if (!a_const && !b_const) {
          throw DataError("non-affine expression: product of two feature-bearing subtrees");
        }
        if (a_const) {
          coef = a[0] * b;
          if (with_jacobian) jac = a[0] * jb + b * ja.row(0);
        } else {
          coef = b[0] * a;
          if (with_jacobian) jac = b[0] * ja + a * jb.row(0);
        }
        return;
      }
      default:
        return;
    }
  }

  bool constant_only(std::size_t begin, std::size_t end) const {
    for (auto k = begin; k < end; ++k) {
      if (nodes[k].op == Op::Feature) return false;
    }
    return true;
  }
};

}  // namespace

Eigen::VectorXd expand_affine(const Expr& expr, Eigen::Index n_features, Eigen::MatrixXd* jacobian) {
  const auto m = static_cast<Eigen::Index>(expr.constant_positions().size());
  Expander ex{expr.nodes(), n_features + 1, m, jacobian != nullptr};
  Eigen::VectorXd coef;
  Eigen::MatrixXd jac;
  ex.run(coef, jac);
  if (jacobian) *jacobian = std::move(jac);
  return coef;
}

AffineModel to_affine(const Expr& expr, const std::vector<FeatureColumn>& columns) {
  const auto coef = expand_affine(expr, static_cast<Eigen::Index>(columns.size()));
  AffineModel model;
  model.intercept = coef[0];
  model.complexity = expr.complexity();
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const double c = coef[static_cast<Eigen::Index>(j) + 1];
    if (c != 0.0) model.terms.push_back({columns[j], c});
  }
  return model;
}

}  // namespace hvacsr::sr
