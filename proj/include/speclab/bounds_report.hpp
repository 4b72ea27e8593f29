#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "speclab/disk_steklov.hpp"
#include "speclab/error.hpp"
#include "speclab/geometry.hpp"
#include "speclab/radial_spectrum.hpp"

namespace speclab {

struct BoundReport {
    double quantity = 0.0;
    double bound = 0.0;
    double margin = 0.0;   // bound - quantity
    bool sharp = false;    // the bound is attained (in the limit) in this dimension
    bool equality = false; // |margin| <= 1e-6 bound
    int k = 0;
    int d = 0;
};

inline BoundReport make_report(double quantity, double bound, bool sharp, int k, int d) {
    BoundReport r;
    r.quantity = quantity;
    r.bound = bound;
    r.margin = bound - quantity;
    r.sharp = sharp;
    r.equality = std::abs(r.margin) <= 1e-6 * std::abs(bound);
    r.k = k;
    r.d = d;
    return r;
}

namespace detail {
inline void require_k_1_or_2(int k) {
    if (k != 1 && k != 2) fail(ErrorKind::UnsupportedIndex, "sharp constants exist for k = 1, 2 only");
}
} // namespace detail

/// sup of sigma_k |dOmega| |Omega|^{(2-d)/d} for k = 1, 2: the k-ball Neumann
/// bound k (d-1)/(d-2) |S^{d-1}| rescaled by (k |B^d|)^{(2-d)/d}, i.e.
/// (d-1)/(d-2) (k |S^{d-1}|)^{2/d} d^{(d-2)/d}.
inline double sharp_constant(Dimension d, int k) {
    d.require_at_least_3();
    detail::require_k_1_or_2(k);
    const double dd = d.value();
    return (dd - 1.0) / (dd - 2.0) * std::pow(k * sphere_area(d), 2.0 / dd) * std::pow(dd, (dd - 2.0) / dd);
}

/// (d-1)/(d-2) (k |S^{d-1}|)^{2/d} without the d^{(d-2)/d} volume factor. Kept
/// for comparison; the unit ball already exceeds it for d >= 4.
inline double sharp_constant_without_volume_factor(Dimension d, int k) {
    d.require_at_least_3();
    detail::require_k_1_or_2(k);
    const double dd = d.value();
    return (dd - 1.0) / (dd - 2.0) * std::pow(k * sphere_area(d), 2.0 / dd);
}

/// mass * lambda_k against k * (equator energy); the spectrum must be computed
/// on a domain of volume k |B^d|.
inline BoundReport neumann_bound_check(Dimension d, const Spectrum& spectrum, int k) {
    d.require_at_least_3();
    detail::require_k_1_or_2(k);
    return make_report(spectrum.normalized(static_cast<std::uint64_t>(k)), k * equator_energy(d.value()), d.value() >= 7, k, d.value());
}

/// Planar simply connected case: sigma_bar_k < 2 pi k, equality only for k = 1 on disks.
inline BoundReport steklov_bound_check(const SteklovSpectrum& spectrum, int k) {
    if (k < 1 || static_cast<std::size_t>(k) >= spectrum.values.size())
        fail(ErrorKind::UnsupportedIndex, "spectrum does not contain sigma_k");
    return make_report(spectrum.values[k] * spectrum.mass, 2.0 * std::numbers::pi * k, true, k, 2);
}

struct SteklovTriple {
    double sigma;          // sigma_k
    double boundary_area;  // |dOmega|
    double volume;         // |Omega|
};

/// sigma_1(B) = 1 (coordinate functions), |dB| = |S^{d-1}|, |B| = |S^{d-1}|/d.
inline SteklovTriple unit_ball_triple(Dimension d) { return {1.0, sphere_area(d), ball_volume(d)}; }

inline BoundReport steklov_bound_check(Dimension d, const SteklovTriple& triple, int k) {
    d.require_at_least_3();
    detail::require_k_1_or_2(k);
    if (!(triple.boundary_area > 0.0 && triple.volume > 0.0 && triple.sigma >= 0.0))
        fail(ErrorKind::InvalidParameter, "Steklov triple needs positive areas and sigma >= 0");
    const double dd = d.value();
    const double q = triple.sigma * triple.boundary_area * std::pow(triple.volume, (2.0 - dd) / dd);
    return make_report(q, sharp_constant(d, k), d.value() >= 7, k, d.value());
}

struct ConstantRow {
    int d;
    int k;
    double constant;
};

inline std::vector<ConstantRow> sharp_constant_table(int d_min, int d_max) {
    if (d_min < 3 || d_max < d_min) fail(ErrorKind::InvalidDimension, "table needs 3 <= dmin <= dmax");
    std::vector<ConstantRow> rows;
    for (int d = d_min; d <= d_max; ++d)
        for (int k = 1; k <= 2; ++k) rows.push_back({d, k, sharp_constant(Dimension{d}, k)});
    return rows;
}

} // namespace speclab
