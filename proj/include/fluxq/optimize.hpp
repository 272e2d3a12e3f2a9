#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace fluxq {

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;  // best value after each iteration
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Deterministic start: vertices x0 and x0 + scale_i e_i. Non-finite
// objective values away from x0 are treated as +inf.
SimplexResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& scale,
                          double tol, int max_iter);

}  // namespace fluxq
