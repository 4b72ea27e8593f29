#pragma once
// Trial-function geometry: the equator map x/|x|, hyperplane reflections and
// fold maps, and the centering maps whose zeros make the equator-map
// coordinates orthogonal to constants (and to a first eigenfunction).

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "speclab/ball_sampling.hpp"
#include "speclab/error.hpp"
#include "speclab/geometry.hpp"
#include "speclab/newton.hpp"

namespace speclab {

/// Evaluations closer than this to an atom are rejected.
inline constexpr double collision_distance = 1e-12;

inline Point equator_map(const Point& x) {
    const double n = x.norm();
    if (!(n > 0.0)) fail(ErrorKind::SingularPoint, "equator map is undefined at the origin");
    return x / n;
}

/// sum_i |grad (x_i/|x|)|^2 by central differences; equals (d-1)/|x|^2.
inline double equator_energy_density_fd(const Point& x, double h = 1e-5) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Point xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        total += ((equator_map(xp) - equator_map(xm)) / (2.0 * h)).squaredNorm();
    }
    return total;
}

/// Half-space H = {y : <y, p> < t |p|}.
struct HalfSpaceParams {
    Point p;
    double t = 0.0;

    HalfSpaceParams(Point direction, double offset) : p(std::move(direction)), t(offset) {
        if (!(p.norm() > 0.0)) fail(ErrorKind::InvalidParameter, "half-space direction must be nonzero");
        if (!(t >= 0.0)) fail(ErrorKind::InvalidParameter, "half-space offset must be >= 0");
    }

    Point unit() const { return p / p.norm(); }
    bool contains(const Point& y) const { return y.dot(unit()) < t; }
};

/// Reflection across the boundary hyperplane of H_{p,t}.
inline Point reflection(const HalfSpaceParams& h, const Point& y) {
    const Point n = h.unit();
    return y + 2.0 * (h.t - y.dot(n)) * n;
}

/// Identity on H_{p,t}, reflection on the complement.
inline Point fold(const HalfSpaceParams& h, const Point& y) { return h.contains(y) ? y : reflection(h, y); }

/// Fold parameters in the (p, t = R - |p|) convention; p = 0 gives the
/// identity fold (nullopt).
inline std::optional<HalfSpaceParams> fold_for_offset(const Point& p, double radius) {
    const double n = p.norm();
    if (n == 0.0) return std::nullopt;
    if (n > radius * (1.0 + 1e-12)) fail(ErrorKind::InvalidParameter, "fold offset must satisfy |p| <= R");
    return HalfSpaceParams(p, std::max(0.0, radius - n));
}

inline Point apply_fold(const std::optional<HalfSpaceParams>& h, const Point& y) { return h ? fold(*h, y) : y; }

namespace detail {

inline Point unit_difference(const Point& c, const Point& x) {
    const Point diff = c - x;
    const double n = diff.norm();
    if (n <= collision_distance) fail(ErrorKind::SingularEvaluation, "evaluation point collides with an atom");
    return diff / n;
}

} // namespace detail

/// Phi(c) = mean over mu of (c - x)/|c - x|.
inline Point centering_map(const PointMeasure& mu, const Point& c) {
    if (c.size() != mu.dimension()) fail(ErrorKind::InvalidParameter, "point dimension mismatch");
    Point sum = Point::Zero(mu.dimension());
    for (const auto& a : mu.atoms()) sum += a.mass * detail::unit_difference(c, a.position);
    return sum / mu.total_mass();
}

struct CenteringResult {
    Point c;
    double residual;
    std::size_t start_index;
};

namespace detail {

inline Point clamp_to_ball(Point x, double radius) {
    const double n = x.norm();
    if (n > radius) x *= radius / n;
    return x;
}

} // namespace detail

/// Zero of the centering map inside B_R. Starts: 0 and +-R/2 e_i.
inline CenteringResult solve_centering(const PointMeasure& mu, double radius, double tolerance = 1e-8) {
    if (!(radius > 0.0)) fail(ErrorKind::InvalidParameter, "radius must be positive");
    if (!mu.inside_ball(radius, true)) fail(ErrorKind::InvalidParameter, "atoms must lie in the open ball of radius R");
    const int dim = mu.dimension();

    const Residual f = [&](const Eigen::VectorXd& c) -> std::optional<Eigen::VectorXd> {
        try {
            return centering_map(mu, c);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    std::vector<Eigen::VectorXd> starts{Point::Zero(dim)};
    for (int i = 0; i < dim; ++i) {
        starts.push_back(0.5 * radius * Point::Unit(dim, i));
        starts.push_back(-0.5 * radius * Point::Unit(dim, i));
    }
    NewtonOptions opt;
    opt.tolerance = tolerance;
    opt.fd_step = 1e-6 * radius;
    const auto best = multistart_newton(f, starts, opt, [radius](Eigen::VectorXd x) { return detail::clamp_to_ball(std::move(x), radius); });
    if (!best.converged)
        fail(ErrorKind::NoConvergence, "centering did not converge; best residual " + std::to_string(best.residual));
    return {best.x, best.residual, best.start_index};
}

/// Measure, bounding radius R and an optional first eigenfunction sampled at
/// the atoms (mu-orthogonal to constants; the caller enforces this).
struct CenteringProblem {
    PointMeasure mu;
    double radius;
    std::optional<std::vector<double>> phi1;

    void validate() const {
        if (!(radius > 0.0)) fail(ErrorKind::InvalidParameter, "radius must be positive");
        if (!mu.inside_ball(radius)) fail(ErrorKind::InvalidParameter, "atoms must lie in the closed ball of radius R");
        if (phi1 && phi1->size() != mu.size()) fail(ErrorKind::InvalidParameter, "phi1 needs one value per atom");
    }
};

namespace detail {

inline Eigen::VectorXd fold_map_unchecked(const CenteringProblem& problem, const Point& c, const std::optional<HalfSpaceParams>& h) {
    const int dim = problem.mu.dimension();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * dim);
    const auto& atoms = problem.mu.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const Point u = unit_difference(c, apply_fold(h, atoms[i].position));
        out.head(dim) += atoms[i].mass * u;
        if (problem.phi1) out.tail(dim) += atoms[i].mass * (*problem.phi1)[i] * u;
    }
    return out / problem.mu.total_mass();
}

} // namespace detail

/// Phi(c, p) = (mean of u, mean of u * phi1) with u = (c - F(x))/|c - F(x)| and
/// F the fold with t = R - |p| (identity for p = 0).
inline Eigen::VectorXd centering_fold_map(const CenteringProblem& problem, const Point& c, const Point& p) {
    const int dim = problem.mu.dimension();
    if (c.size() != dim || p.size() != dim) fail(ErrorKind::InvalidParameter, "point dimension mismatch");
    return detail::fold_map_unchecked(problem, c, fold_for_offset(p, problem.radius));
}

struct FoldCenteringResult {
    Point c;
    Point p;
    double residual;
    std::size_t start_index;
};

/// Zero of Phi(c, p) over the closed B_R x B_R by multi-start Newton. Finite
/// differences may step past |p| = R, where the fold is frozen at t = 0.
inline FoldCenteringResult solve_centering_fold(const CenteringProblem& problem, double tolerance = 1e-6) {
    problem.validate();
    const int dim = problem.mu.dimension();
    const double radius = problem.radius;

    const Residual f = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::VectorXd> {
        try {
            const Point p = x.tail(dim);
            const double n = p.norm();
            if (n == 0.0) return detail::fold_map_unchecked(problem, x.head(dim), std::nullopt);
            return detail::fold_map_unchecked(problem, x.head(dim), HalfSpaceParams(p, std::max(0.0, radius - n)));
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    std::vector<Point> centers{Point::Zero(dim)}, offsets{Point::Zero(dim)};
    for (int i = 0; i < dim; ++i) {
        for (double s : {0.4, -0.4}) centers.push_back(s * radius * Point::Unit(dim, i));
        for (double s : {0.5, -0.5, 0.9, -0.9, 1.0, -1.0}) offsets.push_back(s * radius * Point::Unit(dim, i));
    }
    std::vector<Eigen::VectorXd> starts;
    for (const auto& p : offsets) {
        for (const auto& c : centers) {
            Eigen::VectorXd x(2 * dim);
            x << c, p;
            starts.push_back(std::move(x));
        }
    }
    NewtonOptions opt;
    opt.tolerance = tolerance;
    opt.target = 1e-13;
    opt.fd_step = 1e-6 * radius;
    const auto project = [radius, dim](Eigen::VectorXd x) {
        x.head(dim) = detail::clamp_to_ball(x.head(dim), radius);
        x.tail(dim) = detail::clamp_to_ball(x.tail(dim), radius);
        return x;
    };
    const auto best = multistart_newton(f, starts, opt, project);
    if (!best.converged)
        fail(ErrorKind::NoConvergence, "fold centering did not converge; best residual " + std::to_string(best.residual));
    return {best.x.head(dim), best.x.tail(dim), best.residual, best.start_index};
}

struct CoordinateBoundReport {
    double lambda_bar;
    std::vector<double> coordinate_energies; // int |d(x_i/|x|)|^2 over the domain
    double energy_total;                     // = int (d-1)/|x|^2
    double standard_error;
    double centering_residual;               // |Phi(0)|
    bool centered;
    bool holds;
    double margin() const { return energy_total - lambda_bar; }
};

/// Evaluates lambda_bar <= sum_i int_Omega |d(x_i/|x|)|^2 for a measure already
/// centered at the origin; Omega is given by a volume sample cloud.
inline CoordinateBoundReport coordinate_quotient_bound(const PointMeasure& mu, double lambda_bar, const VolumeSamples& omega) {
    const int dim = mu.dimension();
    if (omega.dim != dim) fail(ErrorKind::InvalidParameter, "sample dimension mismatch");
    CoordinateBoundReport rep{};
    rep.lambda_bar = lambda_bar;
    rep.centering_residual = centering_map(mu, Point::Zero(dim)).norm();
    rep.centered = rep.centering_residual <= 1e-6;
    rep.coordinate_energies.assign(dim, 0.0);
    for (std::size_t s = 0; s < omega.points.size(); ++s) {
        const Point& x = omega.points[s];
        const double r2 = x.squaredNorm();
        if (!(r2 > 0.0)) continue;
        for (int i = 0; i < dim; ++i) rep.coordinate_energies[i] += omega.weights[s] * (1.0 - x[i] * x[i] / r2) / r2;
    }
    rep.energy_total = 0.0;
    for (double e : rep.coordinate_energies) rep.energy_total += e;
    rep.standard_error = omega.standard_error([dim](const Point& x) { return (dim - 1.0) / x.squaredNorm(); });
    rep.holds = lambda_bar <= rep.energy_total + 3.0 * rep.standard_error + 1e-9 * rep.energy_total;
    return rep;
}

struct TwoBallComparison {
    double lhs;            // int_{Omega cap H} g + int_{R(Omega \ H)} g, g = (d-1)/|x|^2
    double rhs;            // 2 int_B g
    double standard_error; // of lhs
    bool holds(double tolerance) const { return lhs <= rhs * (1.0 + tolerance); }
};

/// Folded equator energy of Omega against twice the unit-ball energy.
inline TwoBallComparison two_ball_comparison(const VolumeSamples& omega, const std::optional<HalfSpaceParams>& params) {
    const int dim = omega.dim;
    const Dimension d{dim};
    d.require_at_least_3();
    const auto g = [&](const Point& x) { return (dim - 1.0) / apply_fold(params, x).squaredNorm(); };
    return {omega.integrate(g), 2.0 * equator_energy(dim), omega.standard_error(g)};
}

} // namespace speclab
