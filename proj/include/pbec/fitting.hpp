#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace pbec::fit {

// Damped least squares (Levenberg-Marquardt) with a forward-difference
// Jacobian. model(x, p) -> y; p is small (3..5 parameters).
struct LmResult {
  Eigen::VectorXd params;
  double rel_residual = 0.0;  // ||r|| / ||y||
  int iterations = 0;
  bool converged = false;
};

LmResult levenberg_marquardt(
    const std::function<double(double, const Eigen::VectorXd&)>& model,
    const std::vector<double>& xs, const std::vector<double>& ys,
    Eigen::VectorXd p0, int max_iter = 200, double tol = 1e-12);

// y = slope*x + intercept by ordinary least squares.
struct LinearFit {
  double slope = 0.0, intercept = 0.0;
};
LinearFit linear_fit(const std::vector<double>& xs,
                     const std::vector<double>& ys);

}  // namespace pbec::fit
