#include "pbec/fitting.hpp"

#include <cmath>
#include <stdexcept>

namespace pbec::fit {

LmResult levenberg_marquardt(
    const std::function<double(double, const Eigen::VectorXd&)>& model,
    const std::vector<double>& xs, const std::vector<double>& ys,
    Eigen::VectorXd p0, int max_iter, double tol) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("lm: data size mismatch");
  const int m = static_cast<int>(xs.size());
  const int np = static_cast<int>(p0.size());

  auto residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r[i] = model(xs[i], p) - ys[i];
    return r;
  };

  Eigen::VectorXd p = p0;
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  LmResult out;

  for (int it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd J(m, np);
    for (int j = 0; j < np; ++j) {
      const double h = std::max(1e-8 * std::abs(p[j]), 1e-12);
      Eigen::VectorXd ph = p;
      ph[j] += h;
      J.col(j) = (residuals(ph) - r) / h;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;

    bool stepped = false;
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-30);
      const Eigen::VectorXd dp = A.ldlt().solve(g);
      const Eigen::VectorXd pn = p - dp;
      const Eigen::VectorXd rn = residuals(pn);
      const double cn = rn.squaredNorm();
      if (cn < cost) {
        const double drop = (cost - cn) / std::max(cost, 1e-300);
        p = pn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (drop < tol) {
          out.converged = true;
          it = max_iter;
        }
        break;
      }
      lambda *= 10.0;
    }
    out.iterations++;
    if (!stepped) {
      out.converged = true;  // stationary within float resolution
      break;
    }
  }

  double ynorm = 0.0;
  for (double y : ys) ynorm += y * y;
  out.params = p;
  out.rel_residual = std::sqrt(cost / std::max(ynorm, 1e-300));
  return out;
}

LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate xs");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace pbec::fit
