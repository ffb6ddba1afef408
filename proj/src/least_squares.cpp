#include "cavityforge/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cavityforge/errors.hpp"

namespace cavityforge
{

namespace
{

struct Bounds
{
    const Eigen::VectorXd& lower;
    const Eigen::VectorXd& upper;

    double lo(Eigen::Index i) const
    {
        return lower.size() ? lower[i] : -std::numeric_limits<double>::infinity();
    }
    double hi(Eigen::Index i) const
    {
        return upper.size() ? upper[i] : std::numeric_limits<double>::infinity();
    }
    void clamp(Eigen::VectorXd& p) const
    {
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            p[i] = std::clamp(p[i], lo(i), hi(i));
        }
    }
};

double evaluate(const LeastSquaresProblem& problem, const Eigen::VectorXd& p, Eigen::VectorXd& r)
{
    r.resize(problem.residual_count);
    problem.residuals(p, r);
    const double cost = r.squaredNorm();
    return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd jacobian(const LeastSquaresProblem& problem, const Bounds& bounds, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& r0)
{
    const Eigen::Index n = p.size();
    Eigen::MatrixXd j(problem.residual_count, n);
    Eigen::VectorXd rp;
    Eigen::VectorXd rm;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double typical = problem.scale.size() ? std::abs(problem.scale[k]) : 0.0;
        double magnitude = std::max(std::abs(p[k]), typical);
        if (magnitude == 0.0) {
            magnitude = 1.0;
        }
        const double h = 1e-6 * magnitude;
        Eigen::VectorXd pp = p;
        Eigen::VectorXd pm = p;
        const bool up = p[k] + h <= bounds.hi(k);
        const bool down = p[k] - h >= bounds.lo(k);
        if (up && down) {
            pp[k] += h;
            pm[k] -= h;
            evaluate(problem, pp, rp);
            evaluate(problem, pm, rm);
            j.col(k) = (rp - rm) / (2.0 * h);
        } else if (up) {
            pp[k] += h;
            evaluate(problem, pp, rp);
            j.col(k) = (rp - r0) / h;
        } else {
            pm[k] -= h;
            evaluate(problem, pm, rm);
            j.col(k) = (r0 - rm) / h;
        }
    }
    return j;
}

} // namespace

LeastSquaresResult levenberg_marquardt(const LeastSquaresProblem& problem, Eigen::VectorXd p,
                                       const LeastSquaresOptions& options)
{
    const Eigen::Index n = p.size();
    if (problem.residual_count < n) {
        throw InputError("fewer data points than free parameters");
    }
    const Bounds bounds{problem.lower, problem.upper};
    bounds.clamp(p);

    LeastSquaresResult out;
    Eigen::VectorXd r;
    double cost = evaluate(problem, p, r);
    if (!std::isfinite(cost)) {
        throw InputError("objective is not finite at the initial parameters");
    }

    double lambda = 1e-3;
    Eigen::MatrixXd j = jacobian(problem, bounds, p, r);
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd grad = j.transpose() * r;
        if (cost == 0.0 || grad.lpNorm<Eigen::Infinity>() == 0.0) {
            out.converged = true;
            out.message = "zero gradient";
            break;
        }
        Eigen::VectorXd diag = jtj.diagonal();
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!(diag[k] > 0.0)) {
                diag[k] = 1e-300;
            }
        }

        bool accepted = false;
        Eigen::VectorXd trial;
        Eigen::VectorXd r_trial;
        double cost_trial = cost;
        double step_norm = 0.0;
        while (lambda < 1e16) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd step = a.ldlt().solve(-grad);
            trial = p + step;
            bounds.clamp(trial);
            step_norm = (trial - p).norm();
            cost_trial = evaluate(problem, trial, r_trial);
            if (cost_trial < cost) {
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            out.converged = true;
            out.message = "no further decrease possible";
            break;
        }
        const double decrease = cost - cost_trial;
        p = trial;
        r = r_trial;
        cost = cost_trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        if (decrease <= options.relative_tolerance * cost ||
            step_norm <= options.relative_tolerance * (p.norm() + options.relative_tolerance)) {
            out.converged = true;
            out.message = "relative tolerance reached";
            ++it;
            break;
        }
        j = jacobian(problem, bounds, p, r);
    }
    if (!out.converged) {
        out.message = "iteration limit reached";
    }

    out.params = p;
    out.residuals = r;
    out.cost = cost;
    out.iterations = it;
    const auto dof = static_cast<double>(problem.residual_count - n);
    out.reduced_chi2 = dof > 0.0 ? cost / dof : 0.0;

    j = jacobian(problem, bounds, p, r);
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
        out.covariance = lu.inverse() * out.reduced_chi2;
    } else {
        // Flat directions (e.g. a width pinned at its bound) get a
        // pseudo-inverse instead of an undefined covariance.
        out.singular = true;
        out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse() * out.reduced_chi2;
    }
    return out;
}

} // namespace cavityforge
