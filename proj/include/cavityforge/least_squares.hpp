#ifndef CAVITYFORGE_LEAST_SQUARES_HPP
#define CAVITYFORGE_LEAST_SQUARES_HPP

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace cavityforge
{

struct LeastSquaresProblem
{
    // Weighted residuals r(p); the objective is sum r^2.
    std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residuals)> residuals;
    Eigen::Index residual_count = 0;
    // Optional box bounds; empty vectors mean unbounded.
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    // Typical magnitude of each parameter, used for finite-difference steps.
    Eigen::VectorXd scale;
};

struct LeastSquaresOptions
{
    int max_iterations = 500;
    double relative_tolerance = 1e-10;
};

struct LeastSquaresResult
{
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // scaled by the reduced chi^2
    Eigen::VectorXd residuals;
    double cost = 0.0;           // sum of squared residuals
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
    bool singular = false;
    std::string message;
};

// Levenberg-Marquardt with Marquardt diagonal scaling and a central-difference
// Jacobian. Only steps that lower the objective are accepted; bounds are
// enforced by clamping.
LeastSquaresResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd initial,
                                       const LeastSquaresOptions& options = {});

} // namespace cavityforge

#endif // CAVITYFORGE_LEAST_SQUARES_HPP
