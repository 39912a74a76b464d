#pragma once

#include <functional>

#include <Eigen/Core>

namespace dbound {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

/// Nelder-Mead minimisation (reflect 1, expand 2, contract 1/2, shrink 1/2)
/// from the simplex x0, x0 + steps_i e_i. Stops after max_evals evaluations
/// or when the spread of simplex values falls below tolerance.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& steps, int max_evals, double tolerance = 1e-12);

}  // namespace dbound
