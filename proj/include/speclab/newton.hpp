#pragma once
// Damped Newton for square systems F(x) = 0 with a central-difference
// Jacobian, Armijo backtracking on |F|^2/2 and deterministic multi-start.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/parallel.hpp"

namespace speclab {

struct NewtonOptions {
    double tolerance = 1e-8;     // accept when |F| <= tolerance
    double target = 1e-14;       // keep iterating towards this while progress is made
    double fd_step = 1e-6;       // absolute finite-difference step
    int max_iterations = 100;
    int max_backtracks = 40;
    double armijo = 1e-4;
};

struct NewtonResult {
    Eigen::VectorXd x;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::size_t start_index = 0;
};

// Returns nullopt when the map cannot be evaluated at x (e.g. hits a singularity).
using Residual = std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)>;
using Projection = std::function<Eigen::VectorXd(Eigen::VectorXd)>;

inline NewtonResult damped_newton(const Residual& f, Eigen::VectorXd x, const NewtonOptions& opt,
                                  const Projection& project = {}) {
    if (project) x = project(std::move(x));
    NewtonResult best;
    auto fx = f(x);
    if (!fx) return best;
    double norm = fx->norm();
    best = {x, norm, 0, norm <= opt.tolerance, 0};
    const Eigen::Index n = x.size();

    for (int it = 1; it <= opt.max_iterations && norm > opt.target; ++it) {
        Eigen::MatrixXd jac(fx->size(), n);
        bool ok = true;
        for (Eigen::Index j = 0; j < n && ok; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp[j] += opt.fd_step;
            xm[j] -= opt.fd_step;
            const auto fp = f(xp), fm = f(xm);
            if (!fp || !fm) {
                ok = false;
                break;
            }
            jac.col(j) = (*fp - *fm) / (2.0 * opt.fd_step);
        }
        if (!ok || !jac.allFinite()) break;

        Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-*fx);
        if (!step.allFinite()) step = -jac.transpose() * *fx; // steepest descent fallback

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < opt.max_backtracks; ++bt, t *= 0.5) {
            Eigen::VectorXd trial = x + t * step;
            if (project) trial = project(std::move(trial));
            const auto ft = f(trial);
            if (!ft) continue;
            const double tn = ft->norm();
            if (0.5 * tn * tn <= 0.5 * norm * norm * (1.0 - 2.0 * opt.armijo * t)) {
                x = std::move(trial);
                fx = ft;
                norm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        if (norm < best.residual) best = {x, norm, it, norm <= opt.tolerance, 0};
    }
    return best;
}

/// Runs Newton from every start and returns the lowest residual; ties go to
/// the lower start index.
inline NewtonResult multistart_newton(const Residual& f, const std::vector<Eigen::VectorXd>& starts,
                                      const NewtonOptions& opt, const Projection& project = {}) {
    if (starts.empty()) fail(ErrorKind::InvalidParameter, "multi-start needs at least one start");
    std::vector<NewtonResult> results(starts.size());
    parallel_for_indexed(starts.size(), [&](std::size_t i) {
        results[i] = damped_newton(f, starts[i], opt, project);
        results[i].start_index = i;
    });
    std::size_t pick = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].residual < results[pick].residual) pick = i;
    return results[pick];
}

} // namespace speclab
