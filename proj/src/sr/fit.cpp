#include "hvacsr/sr/fit.hpp"

#include <cmath>

#include "hvacsr/core/error.hpp"
#include "hvacsr/sr/affine_model.hpp"

namespace hvacsr::sr {

LeastSquaresCache::LeastSquaresCache(const FeatureMatrix& data) : rows_(data.rows()) {
  if (rows_ == 0) throw DataError("feature matrix has no rows");
  const Eigen::Index p = data.cols() + 1;
  Eigen::MatrixXd a(rows_, p);
  a.col(0).setOnes();
  a.rightCols(data.cols()) = data.x;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index k = std::min(rows_, p);
  r_ = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Eigen::VectorXd qty = qr.householderQ().transpose() * data.target;
  qty_ = qty.head(k);
  tail_ = qty.tail(rows_ - k).squaredNorm();
  target_mean_ = data.target.mean();
  target_std_ = std::sqrt((data.target.array() - target_mean_).square().mean());
}

double LeastSquaresCache::sse(const Eigen::VectorXd& b) const { return (r_ * b - qty_).squaredNorm() + tail_; }

namespace {

struct Evaluation {
  Eigen::VectorXd coef;
  Eigen::MatrixXd jac;
  Eigen::VectorXd residual;
  double sse = 0.0;
};

Evaluation evaluate_at(Expr& expr, const std::vector<double>& theta, const LeastSquaresCache& cache) {
  expr.set_constants(theta);
  Evaluation e;
  e.coef = expand_affine(expr, cache.n_features(), &e.jac);
  e.residual = cache.r() * e.coef - cache.qty();
  e.sse = e.residual.squaredNorm() + cache.tail();
  return e;
}

}  // namespace

FitResult fit_constants(const Expr& structure, const LeastSquaresCache& cache) {
  if (!structure.is_affine_admissible()) throw DataError("fit_constants requires an affine-admissible structure");
  Expr work = structure;
  std::vector<double> theta = structure.constants();
  const auto m = static_cast<Eigen::Index>(theta.size());
  const double n = static_cast<double>(cache.rows());
  if (m > cache.rows()) throw DataError("fewer data rows than free constants");

  Evaluation cur = evaluate_at(work, theta, cache);
  FitResult result{structure, cur.sse / n, false, 0};
  if (m == 0 || !std::isfinite(cur.sse)) return result;

  constexpr int kMaxIterations = 30;
  bool converged = false;
  for (int it = 0; it < kMaxIterations && !converged; ++it) {
    result.iterations = it + 1;
    const Eigen::MatrixXd jr = cache.r() * cur.jac;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jr);
    result.rank_deficient = cod.rank() < m;
    Eigen::VectorXd step = cod.solve(-cur.residual);

    auto try_step = [&](const Eigen::VectorXd& d) -> bool {
      std::vector<double> cand(theta);
      for (Eigen::Index k = 0; k < m; ++k) cand[static_cast<std::size_t>(k)] += d[k];
      Evaluation e = evaluate_at(work, cand, cache);
      if (!(std::isfinite(e.sse) && e.sse < cur.sse)) return false;
      const double gain = cur.sse - e.sse;
      converged = gain <= 1e-13 * cur.sse || d.norm() <= 1e-14 * (1.0 + Eigen::Map<const Eigen::VectorXd>(cand.data(), m).norm());
      theta = std::move(cand);
      cur = std::move(e);
      return true;
    };

    if (step.allFinite() && try_step(step)) continue;

    const Eigen::MatrixXd jtj = jr.transpose() * jr;
    const Eigen::VectorXd grad = jr.transpose() * cur.residual;
    double lambda = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-12);
    bool improved = false;
    for (int k = 0; k < 12 && !improved; ++k, lambda *= 10.0) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += lambda;
      const Eigen::VectorXd d = a.ldlt().solve(-grad);
      improved = d.allFinite() && try_step(d);
    }
    if (!improved) break;
  }

  work.set_constants(theta);
  if (cur.sse / n <= result.mse) {
    result.expr = std::move(work);
    result.mse = cur.sse / n;
  }
  return result;
}

FitResult fit_constants(const Expr& structure, const FeatureMatrix& data) {
  return fit_constants(structure, LeastSquaresCache(data));
}

double mean_squared_error(const Expr& expr, const FeatureMatrix& data) {
  if (data.rows() == 0) throw DataError("feature matrix has no rows");
  double acc = 0.0;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const double e = evaluate(expr, data.x.row(r)) - data.target[r];
    acc += e * e;
  }
  return acc / static_cast<double>(data.rows());
}

}  // namespace hvacsr::sr
