#pragma once
// Weighted Neumann spectrum of the unit ball for radial weights.
//
// A sector is one spherical-harmonic degree l. Its radial problem on [delta, 1]
// is discretized with piecewise-linear elements:
//
//   stiffness  int phi' psi' r^{d-1} dr
//   mass       int phi psi f(r) r^{d-1} dr
//   angular    int phi psi r^{d-3} dr      (carries the nu_l term)
//
// For f = c/r^2 the angular form equals mass/c, so the sector eigenvalues are
// the l = 0 eigenvalues shifted by nu_l / c. Other weights fold nu_l * angular
// into the stiffness before solving.

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "speclab/error.hpp"
#include "speclab/geometry.hpp"
#include "speclab/parallel.hpp"
#include "speclab/quadrature.hpp"
#include "speclab/tridiagonal.hpp"

namespace speclab {

/// Graded mesh r_i = delta + (1 - delta) (i/n)^gamma, i = 0..n.
struct GridSpec {
    int n = 2048;
    double delta = 1e-6;
    double gamma = 2.0;

    void validate() const {
        if (n < 16) fail(ErrorKind::InvalidGrid, "grid needs n >= 16");
        if (!(delta > 0.0 && delta <= 0.1)) fail(ErrorKind::InvalidGrid, "delta must lie in (0, 0.1]");
        if (!(gamma >= 1.0) || !std::isfinite(gamma)) fail(ErrorKind::InvalidGrid, "grading exponent must be >= 1");
    }

    std::vector<double> nodes() const {
        validate();
        std::vector<double> r(n + 1);
        for (int i = 0; i <= n; ++i) r[i] = delta + (1.0 - delta) * std::pow(static_cast<double>(i) / n, gamma);
        r[n] = 1.0;
        for (int i = 0; i < n; ++i)
            if (!(r[i + 1] > r[i])) fail(ErrorKind::InvalidGrid, "grid nodes are not strictly increasing");
        return r;
    }

    /// Weighted mass below this radius marks an eigenfunction as living near the cut-off.
    double localization_radius() const { return std::pow(delta, 0.25); }
};

/// Laplace-Beltrami eigenvalue l (d - 2 + l) of degree-l harmonics on S^{d-1}.
inline double harmonic_eigenvalue(Dimension d, int ell) {
    if (ell < 0) fail(ErrorKind::InvalidParameter, "harmonic degree must be >= 0");
    return static_cast<double>(ell) * (d.value() - 2 + ell);
}

namespace detail {
inline std::uint64_t binomial(long long n, long long k) {
    if (k < 0 || n < k) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (long long i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return result;
}
} // namespace detail

/// Dimension of the space of degree-l spherical harmonics on S^{d-1}.
inline std::uint64_t harmonic_multiplicity(Dimension d, int ell) {
    if (ell < 0) fail(ErrorKind::InvalidParameter, "harmonic degree must be >= 0");
    const long long dd = d.value();
    return detail::binomial(ell + dd - 1, dd - 1) - detail::binomial(ell + dd - 3, dd - 1);
}

struct SectorProblem {
    Dimension d;
    int ell;
    RadialWeight weight;
    GridSpec grid;

    double nu() const { return harmonic_eigenvalue(d, ell); }
};

struct SectorMatrices {
    SymTridiagonal stiffness;
    SymTridiagonal mass;
    SymTridiagonal angular;
    std::vector<double> nodes;
    // element-local mass entries (m00, m01, m11), for localization diagnostics
    std::vector<std::array<double, 3>> mass_elements;
};

namespace detail {

inline std::array<double, 3> hat_products(const GaussRule& rule, double a, double b, auto&& density) {
    const double h = b - a;
    auto n0 = [&](double r) { return (b - r) / h; };
    auto n1 = [&](double r) { return (r - a) / h; };
    return {rule.integrate([&](double r) { return density(r) * n0(r) * n0(r); }, a, b),
            rule.integrate([&](double r) { return density(r) * n0(r) * n1(r); }, a, b),
            rule.integrate([&](double r) { return density(r) * n1(r) * n1(r); }, a, b)};
}

inline std::array<double, 3> hat_products_adaptive(double a, double b, auto&& density) {
    using boost::math::quadrature::gauss_kronrod;
    const double h = b - a;
    auto integrate = [&](auto&& g) {
        double err = 0.0;
        return gauss_kronrod<double, 31>::integrate(g, a, b, 12, 1e-10, &err);
    };
    return {integrate([&](double r) { return density(r) * ((b - r) / h) * ((b - r) / h); }),
            integrate([&](double r) { return density(r) * ((b - r) / h) * ((r - a) / h); }),
            integrate([&](double r) { return density(r) * ((r - a) / h) * ((r - a) / h); })};
}

} // namespace detail

/// Piecewise-linear matrices for one sector; natural boundary conditions at
/// both ends of [delta, 1].
inline SectorMatrices assemble_sector(const SectorProblem& problem) {
    problem.d.require_at_least_3();
    const int d = problem.d.value();
    if (d > 200) fail(ErrorKind::InvalidDimension, "radial solver supports d <= 200");
    const auto r = problem.grid.nodes();
    const std::size_t n = r.size();

    SectorMatrices out{SymTridiagonal(n), SymTridiagonal(n), SymTridiagonal(n), r, {}};
    out.mass_elements.reserve(n - 1);

    // polynomial integrands of degree <= d+1 are integrated exactly
    const GaussRule rule(d / 2 + 2);
    const RadialWeight& w = problem.weight;

    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double a = r[e], b = r[e + 1], h = b - a;
        const double k = rule.integrate([d](double x) { return std::pow(x, d - 1); }, a, b) / (h * h);
        out.stiffness.add_element(e, k, -k, k);

        const auto ang = detail::hat_products(rule, a, b, [d](double x) { return std::pow(x, d - 3); });
        out.angular.add_element(e, ang[0], ang[1], ang[2]);

        std::array<double, 3> m{};
        switch (w.kind()) {
        case WeightKind::InvSquare:
            m = {w.scale() * ang[0], w.scale() * ang[1], w.scale() * ang[2]};
            break;
        case WeightKind::Constant:
            m = detail::hat_products(rule, a, b, [&](double x) { return w.scale() * std::pow(x, d - 1); });
            break;
        case WeightKind::Custom:
            m = detail::hat_products_adaptive(a, b, [&](double x) { return w(x) * std::pow(x, d - 1); });
            break;
        }
        for (double v : m)
            if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::DegenerateWeight, "weight is negative or not finite on the grid");
        out.mass.add_element(e, m[0], m[1], m[2]);
        out.mass_elements.push_back(m);
    }
    double trace = 0.0;
    for (double v : out.mass.diag) trace += v;
    if (!(trace > 0.0)) fail(ErrorKind::DegenerateWeight, "weight vanishes on the whole grid");
    return out;
}

struct SectorEigenpair {
    double value;
    int radial_index;
    double near_cutoff_fraction; // weighted L2 mass below the localization radius
};

namespace detail {

inline double near_cutoff_fraction(const SectorMatrices& mats, const std::vector<double>& phi, double radius) {
    double below = 0.0;
    for (std::size_t e = 0; e < mats.mass_elements.size(); ++e) {
        if (mats.nodes[e + 1] > radius) break;
        const auto& m = mats.mass_elements[e];
        below += m[0] * phi[e] * phi[e] + 2.0 * m[1] * phi[e] * phi[e + 1] + m[2] * phi[e + 1] * phi[e + 1];
    }
    const double total = mats.mass.bilinear(phi, phi);
    return total > 0.0 ? below / total : 0.0;
}

inline double clamp_floor(double v) {
    if (v < -1e-9) fail(ErrorKind::NumericBreakdown, "negative eigenvalue " + std::to_string(v));
    return std::max(v, 0.0);
}

} // namespace detail

/// Lowest `count` eigenpairs of one sector, nu_l included.
inline std::vector<SectorEigenpair> solve_sector(const SectorProblem& problem, int count, bool diagnostics = true) {
    if (count < 1) fail(ErrorKind::InvalidParameter, "count must be positive");
    const SectorMatrices mats = assemble_sector(problem);
    if (static_cast<std::size_t>(count) > mats.nodes.size())
        fail(ErrorKind::InvalidParameter, "more eigenvalues requested than grid nodes");

    const double nu = problem.nu();
    const bool shift_only = problem.weight.kind() == WeightKind::InvSquare;
    SymTridiagonal stiffness = mats.stiffness;
    if (!shift_only && nu != 0.0) {
        for (std::size_t i = 0; i < stiffness.diag.size(); ++i) stiffness.diag[i] += nu * mats.angular.diag[i];
        for (std::size_t i = 0; i < stiffness.off.size(); ++i) stiffness.off[i] += nu * mats.angular.off[i];
    }
    const TridiagonalPencil pencil(std::move(stiffness), mats.mass);
    const double shift = shift_only ? nu / problem.weight.scale() : 0.0;
    const double radius = problem.grid.localization_radius();

    std::vector<SectorEigenpair> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double raw = detail::clamp_floor(pencil.eigenvalue(static_cast<std::size_t>(k)));
        double frac = 0.0;
        if (diagnostics) frac = detail::near_cutoff_fraction(mats, pencil.eigenvector(raw), radius);
        out.push_back({raw + shift, k, frac});
    }
    return out;
}

inline std::vector<double> sector_eigenvalues(const SectorProblem& problem, int count) {
    std::vector<double> values;
    for (const auto& p : solve_sector(problem, count, false)) values.push_back(p.value);
    return values;
}

struct SpectrumEntry {
    double value;
    int sector_ell;
    int radial_index;
    std::uint64_t multiplicity;
    bool localized; // eigenfunction concentrates near the inner cut-off
};

struct Spectrum {
    std::vector<SpectrumEntry> entries;
    double mass = 0.0;
    bool essential_flag = false;
    std::optional<double> essential_estimate;

    /// lambda_k counted with multiplicity, k = 0, 1, ...
    const SpectrumEntry& entry_for(std::uint64_t k) const {
        std::uint64_t seen = 0;
        for (const auto& e : entries) {
            seen += e.multiplicity;
            if (k < seen) return e;
        }
        fail(ErrorKind::TruncationError, "spectrum does not reach index " + std::to_string(k));
    }
    double eigenvalue(std::uint64_t k) const { return entry_for(k).value; }
    double normalized(std::uint64_t k) const { return mass * eigenvalue(k); }

    /// Index of the first copy of each entry, counting multiplicity.
    std::vector<std::uint64_t> first_indices() const {
        std::vector<std::uint64_t> out;
        std::uint64_t seen = 0;
        for (const auto& e : entries) {
            out.push_back(seen);
            seen += e.multiplicity;
        }
        return out;
    }
};

/// Spectrum of a disjoint union: union of spectra, masses add.
inline Spectrum disjoint_union(const Spectrum& a, const Spectrum& b) {
    Spectrum out;
    out.entries = a.entries;
    out.entries.insert(out.entries.end(), b.entries.begin(), b.entries.end());
    std::stable_sort(out.entries.begin(), out.entries.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
        if (x.value != y.value) return x.value < y.value;
        if (x.sector_ell != y.sector_ell) return x.sector_ell < y.sector_ell;
        return x.radial_index < y.radial_index;
    });
    out.mass = a.mass + b.mass;
    out.essential_flag = a.essential_flag || b.essential_flag;
    if (a.essential_estimate && b.essential_estimate)
        out.essential_estimate = std::min(*a.essential_estimate, *b.essential_estimate);
    else
        out.essential_estimate = a.essential_estimate ? a.essential_estimate : b.essential_estimate;
    return out;
}

/// Closed-form first eigenvalue for the 1/|x|^2 weight: min(d-1, ((d-2)/2)^2).
inline double lambda1_theory(Dimension d) {
    d.require_at_least_3();
    const double half = (d.value() - 2) / 2.0;
    return std::min(d.value() - 1.0, half * half);
}

/// Larger root of beta^2 + (d-2) beta + lambda = 0: r^beta solves the radial equation.
inline std::complex<double> beta_plus(Dimension d, double lambda) {
    d.require_at_least_3();
    const double half = (d.value() - 2) / 2.0;
    const std::complex<double> disc(half * half - lambda, 0.0);
    return -half + std::sqrt(disc);
}

namespace detail {

// Lower bound of every eigenvalue in sector l, used to certify truncation.
inline double sector_lower_bound(const RadialWeight& w, Dimension d, int ell, const GridSpec& grid) {
    const double nu = harmonic_eigenvalue(d, ell);
    switch (w.kind()) {
    case WeightKind::InvSquare:
    case WeightKind::Constant: return nu / w.scale();
    case WeightKind::Custom: {
        double ratio = std::numeric_limits<double>::infinity();
        const auto r = grid.nodes();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double f = w(r[i]);
            if (f > 0.0) ratio = std::min(ratio, 1.0 / (r[i] * r[i] * f));
        }
        return nu * ratio;
    }
    }
    return nu;
}

} // namespace detail

/// Weighted Neumann spectrum of the unit ball: merge of sectors 0..ell_max,
/// each degree-l value repeated harmonic_multiplicity(d, l) times.
inline Spectrum ball_weighted_neumann(Dimension d, const RadialWeight& weight, int k_max, const GridSpec& grid, int ell_max) {
    d.require_at_least_3();
    grid.validate();
    if (k_max < 0) fail(ErrorKind::InvalidParameter, "k must be >= 0");
    if (ell_max < 0) fail(ErrorKind::InvalidParameter, "lmax must be >= 0");

    const int per_sector = k_max + 1;
    std::vector<std::vector<SectorEigenpair>> sectors(ell_max + 1);
    if (weight.kind() == WeightKind::InvSquare) {
        // one radial solve serves every sector
        const auto base = solve_sector({d, 0, weight, grid}, per_sector);
        for (int ell = 0; ell <= ell_max; ++ell) {
            const double shift = harmonic_eigenvalue(d, ell) / weight.scale();
            for (auto p : base) {
                p.value += shift;
                sectors[ell].push_back(p);
            }
        }
    } else {
        parallel_for_indexed(sectors.size(), [&](std::size_t ell) {
            sectors[ell] = solve_sector({d, static_cast<int>(ell), weight, grid}, per_sector);
        });
    }

    const double threshold = 0.5;
    Spectrum spec;
    for (int ell = 0; ell <= ell_max; ++ell) {
        const auto mult = harmonic_multiplicity(d, ell);
        for (const auto& p : sectors[ell])
            spec.entries.push_back({p.value, ell, p.radial_index, mult, p.near_cutoff_fraction >= threshold});
    }
    std::stable_sort(spec.entries.begin(), spec.entries.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
        if (x.value != y.value) return x.value < y.value;
        if (x.sector_ell != y.sector_ell) return x.sector_ell < y.sector_ell;
        return x.radial_index < y.radial_index;
    });

    // keep entries up to and including the one holding index k_max
    std::uint64_t seen = 0;
    std::size_t keep = 0;
    while (keep < spec.entries.size() && seen <= static_cast<std::uint64_t>(k_max)) seen += spec.entries[keep++].multiplicity;
    spec.entries.resize(keep);

    const double candidate = spec.entries.back().value;
    const double bound = detail::sector_lower_bound(weight, d, ell_max + 1, grid);
    if (bound < candidate)
        fail(ErrorKind::TruncationError, "lmax = " + std::to_string(ell_max) + " cannot certify lambda_" +
                                             std::to_string(k_max) + "; increase lmax");

    spec.mass = weight.ball_mass(d);
    if (weight.kind() == WeightKind::InvSquare && d.value() < 7) {
        spec.essential_flag = true;
        const double half = (d.value() - 2) / 2.0;
        spec.essential_estimate = half * half / weight.scale();
    }
    return spec;
}

} // namespace speclab
