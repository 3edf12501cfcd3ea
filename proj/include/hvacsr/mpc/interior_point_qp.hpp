#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hvacsr::mpc {

/// min 1/2 x'Hx + g'x + constant  s.t.  A x <= b,  lower <= x <= upper  (bounds may be infinite).
template <typename Scalar>
struct QuadraticProgram {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using SparseRows = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

  Matrix hessian;
  Vector gradient;
  Scalar constant = 0;
  SparseRows rows;
  Vector rhs;
  Vector lower;
  Vector upper;

  Eigen::Index variables() const { return gradient.size(); }
  Scalar objective(const Vector& x) const { return Scalar(0.5) * x.dot(hessian * x) + gradient.dot(x) + constant; }
};

enum class QpStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::IterationLimit: return "iteration-limit";
    case QpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

template <typename Scalar>
struct QpResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  QpStatus status = QpStatus::NumericalFailure;
  Vector x;
  Vector row_duals;
  Scalar objective = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar primal_residual = 0;
  Scalar dual_residual = 0;
  Scalar complementarity = 0;
  int iterations = 0;
  std::string certificate;  // names the violated constraint set when infeasible
};

struct InteriorPointSettings {
  double tolerance = 1e-10;
  int max_iterations = 200;
  double step_fraction = 0.995;
};

/// Mehrotra predictor-corrector primal-dual interior point method on the normal equations.
/// Handles positive-semidefinite Hessians as long as every variable is bounded or
/// constrained; the normal matrix gets a small diagonal shift if factorization fails.
template <typename Scalar>
QpResult<Scalar> solve_interior_point(const QuadraticProgram<Scalar>& qp, const InteriorPointSettings& settings = {}) {
  using Vector = typename QuadraticProgram<Scalar>::Vector;
  using Matrix = typename QuadraticProgram<Scalar>::Matrix;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
  using Triplet = Eigen::Triplet<Scalar>;

  const Eigen::Index n = qp.variables();
  QpResult<Scalar> res;

  for (Eigen::Index i = 0; i < n; ++i) {
    if (qp.lower[i] > qp.upper[i]) {
      res.status = QpStatus::Infeasible;
      res.certificate = "variable bounds (lower > upper at index " + std::to_string(i) + ")";
      return res;
    }
  }

  // Stack general rows and finite bounds into C x <= d.
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(qp.rows.nonZeros() + 2 * n));
  for (Eigen::Index r = 0; r < qp.rows.outerSize(); ++r) {
    for (typename Sparse::InnerIterator it(qp.rows, r); it; ++it) trip.emplace_back(r, it.col(), it.value());
  }
  std::vector<Scalar> dvals(qp.rhs.data(), qp.rhs.data() + qp.rhs.size());
  Eigen::Index m = qp.rows.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(qp.lower[i])) {
      trip.emplace_back(m++, i, Scalar(-1));
      dvals.push_back(-qp.lower[i]);
    }
    if (std::isfinite(qp.upper[i])) {
      trip.emplace_back(m++, i, Scalar(1));
      dvals.push_back(qp.upper[i]);
    }
  }
  Sparse c(m, n);
  c.setFromTriplets(trip.begin(), trip.end());
  const Eigen::SparseMatrix<Scalar> ct = c.transpose();
  const Vector d = Eigen::Map<const Vector>(dvals.data(), m);

  Vector x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar lo = qp.lower[i], hi = qp.upper[i];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      x[i] = Scalar(0.5) * (lo + hi);
    } else if (std::isfinite(lo)) {
      x[i] = std::max(lo + Scalar(1), Scalar(0));
    } else if (std::isfinite(hi)) {
      x[i] = std::min(hi - Scalar(1), Scalar(0));
    }
  }
  Vector w = (d - c * x).cwiseMax(Scalar(1));
  Vector z = Vector::Ones(m);

  const Scalar g_scale = Scalar(1) + (qp.gradient.size() ? qp.gradient.template lpNorm<Eigen::Infinity>() : Scalar(0));
  const Scalar d_scale = Scalar(1) + (m ? d.template lpNorm<Eigen::Infinity>() : Scalar(0));
  const Scalar tol = Scalar(settings.tolerance);

  auto max_step = [](const Vector& v, const Vector& dv) {
    Scalar a = Scalar(1);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
    }
    return a;
  };

  Eigen::LLT<Matrix> llt;
  for (int it = 0; it < settings.max_iterations; ++it) {
    const Vector r_d = qp.hessian * x + qp.gradient + ct * z;
    const Vector r_p = c * x + w - d;
    const Scalar mu = m > 0 ? w.dot(z) / Scalar(m) : Scalar(0);
    res.primal_residual = m ? r_p.template lpNorm<Eigen::Infinity>() : Scalar(0);
    res.dual_residual = n ? r_d.template lpNorm<Eigen::Infinity>() : Scalar(0);
    res.complementarity = mu;
    res.iterations = it;
    if (res.dual_residual <= tol * g_scale && res.primal_residual <= tol * d_scale && mu <= tol) {
      res.status = QpStatus::Optimal;
      break;
    }
    if (!x.allFinite() || !w.allFinite() || !z.allFinite()) {
      res.status = QpStatus::NumericalFailure;
      break;
    }

    const Vector dd = z.cwiseQuotient(w);
    Matrix normal = qp.hessian;
    normal += Matrix(ct * dd.asDiagonal() * c);
    llt.compute(normal);
    Scalar shift = Scalar(1e-14) * (Scalar(1) + normal.diagonal().cwiseAbs().maxCoeff());
    while (llt.info() != Eigen::Success && shift < Scalar(1)) {
      Matrix shifted = normal;
      shifted.diagonal().array() += shift;
      llt.compute(shifted);
      shift *= Scalar(100);
    }
    if (llt.info() != Eigen::Success) {
      res.status = QpStatus::NumericalFailure;
      break;
    }

    auto newton = [&](const Vector& r_c, Vector& dx, Vector& dw, Vector& dz) {
      const Vector tmp = (r_c - z.cwiseProduct(r_p)).cwiseQuotient(w);
      dx = llt.solve(-r_d + ct * tmp);
      dw = -r_p - c * dx;
      dz = (-r_c - z.cwiseProduct(dw)).cwiseQuotient(w);
    };

    Vector dx, dw, dz;
    newton(w.cwiseProduct(z), dx, dw, dz);
    const Scalar a_aff = std::min(max_step(w, dw), max_step(z, dz));
    const Scalar mu_aff = m > 0 ? (w + a_aff * dw).dot(z + a_aff * dz) / Scalar(m) : Scalar(0);
    const Scalar sigma = mu > 0 ? std::pow(mu_aff / mu, Scalar(3)) : Scalar(0);

    const Vector r_c = w.cwiseProduct(z) + dw.cwiseProduct(dz) - Vector::Constant(m, sigma * mu);
    newton(r_c, dx, dw, dz);
    auto step_length = [&] {
      return std::min(Scalar(1), Scalar(settings.step_fraction) * std::min(max_step(w, dw), max_step(z, dz)));
    };
    Scalar alpha = step_length();
    // The second-order term can push complementarity up on badly centered iterates and the
    // method then cycles; fall back to a plain centering direction when it does not pay off.
    if (m > 0 && (w + alpha * dw).dot(z + alpha * dz) / Scalar(m) > (Scalar(1) - Scalar(0.01) * alpha) * mu) {
      newton(w.cwiseProduct(z) - Vector::Constant(m, Scalar(0.3) * mu), dx, dw, dz);
      alpha = step_length();
    }
    x += alpha * dx;
    w += alpha * dw;
    z += alpha * dz;
    res.iterations = it + 1;
    if (it + 1 == settings.max_iterations) res.status = QpStatus::IterationLimit;
  }

  res.x = x;
  res.row_duals = z.head(qp.rows.rows());
  res.objective = qp.objective(x);
  return res;
}

}  // namespace hvacsr::mpc
