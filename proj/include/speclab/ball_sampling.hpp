#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/geometry.hpp"

namespace speclab {

inline constexpr std::uint64_t default_seed = 0x5EED;

/// Weighted point cloud approximating Lebesgue measure on a domain.
struct VolumeSamples {
    int dim = 0;
    std::vector<Point> points;
    std::vector<double> weights;

    double volume() const {
        double v = 0.0;
        for (double w : weights) v += w;
        return v;
    }

    template <class F>
    double integrate(F&& g) const {
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * g(points[i]);
        return s;
    }

    /// Standard error of integrate(g), treating w_i g(x_i) as i.i.d. draws.
    template <class F>
    double standard_error(F&& g) const {
        const double n = static_cast<double>(points.size());
        double mean = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double v = n * weights[i] * g(points[i]);
            mean += v;
            sq += v * v;
        }
        mean /= n;
        const double var = std::max(0.0, sq / n - mean * mean);
        return std::sqrt(var / n);
    }

    void append(const VolumeSamples& other) {
        if (dim != 0 && other.dim != dim) fail(ErrorKind::InvalidParameter, "sample dimension mismatch");
        dim = other.dim;
        points.insert(points.end(), other.points.begin(), other.points.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }
};

/// Monte Carlo cloud for the ball B_radius(center), stratified in the radius
/// with antithetic pairs x, 2 center - x. Radial integrands about the center
/// are integrated almost exactly; the cloud is symmetric about the center.
inline VolumeSamples stratified_ball_samples(int dim, const Point& center, double radius, std::size_t count,
                                             std::uint64_t seed = default_seed) {
    const Dimension d{dim};
    if (center.size() != dim) fail(ErrorKind::InvalidParameter, "center dimension mismatch");
    if (!(radius > 0.0)) fail(ErrorKind::InvalidParameter, "radius must be positive");
    if (count < 2) fail(ErrorKind::InvalidParameter, "need at least two samples");
    const std::size_t strata = count / 2;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double area = sphere_area(d);
    const double width = radius / static_cast<double>(strata);

    VolumeSamples out;
    out.dim = dim;
    out.points.reserve(2 * strata);
    out.weights.reserve(2 * strata);
    Point dir(dim);
    for (std::size_t i = 0; i < strata; ++i) {
        const double r = (static_cast<double>(i) + unit(rng)) * width;
        double norm = 0.0;
        do {
            for (int k = 0; k < dim; ++k) dir[k] = normal(rng);
            norm = dir.norm();
        } while (norm < 1e-12);
        dir /= norm;
        const double w = 0.5 * area * std::pow(r, dim - 1) * width;
        out.points.push_back(center + r * dir);
        out.weights.push_back(w);
        out.points.push_back(center - r * dir);
        out.weights.push_back(w);
    }
    return out;
}

/// Atoms at the sample points with mass w_i * density(x_i).
template <class Density>
PointMeasure measure_from_samples(const VolumeSamples& samples, Density&& density) {
    std::vector<Atom> atoms;
    atoms.reserve(samples.points.size());
    for (std::size_t i = 0; i < samples.points.size(); ++i) {
        const double m = samples.weights[i] * density(samples.points[i]);
        if (m > 0.0) atoms.push_back({samples.points[i], m});
    }
    return PointMeasure(samples.dim, std::move(atoms));
}

} // namespace speclab
