#pragma once
// Dimensional constants, radial weights and discrete measures shared by all
// solvers. Everything is scale-normalized to the unit ball.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <functional>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "speclab/error.hpp"

namespace speclab {

using Point = Eigen::VectorXd;

/// Ambient dimension, d >= 2.
class Dimension {
public:
    explicit Dimension(int d) : d_(d) {
        if (d < 2) fail(ErrorKind::InvalidDimension, "dimension must be >= 2, got " + std::to_string(d));
    }
    int value() const noexcept { return d_; }
    operator int() const noexcept { return d_; }

    /// Rejects d = 2 for operations that only make sense for d >= 3.
    Dimension require_at_least_3() const {
        if (d_ < 3) fail(ErrorKind::InvalidDimension, "operation requires d >= 3, got " + std::to_string(d_));
        return *this;
    }

private:
    int d_;
};

/// Area of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
inline double sphere_area(Dimension d) {
    const double half = 0.5 * d.value();
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

/// Volume of the unit ball in R^d.
inline double ball_volume(Dimension d) { return sphere_area(d) / d.value(); }

/// Dirichlet energy of the equator map x/|x| on the unit ball,
/// (d-1)/(d-2) * |S^{d-1}|. Diverges for d = 2.
inline double equator_energy(int d) {
    if (d == 2) fail(ErrorKind::DivergentEnergy, "equator map energy diverges for d = 2");
    const Dimension dim{d};
    return (d - 1.0) / (d - 2.0) * sphere_area(dim);
}

/// Same quantity by adaptive Gauss-Kronrod on the radial integral
/// |S^{d-1}| * int_0^1 (d-1)/r^2 r^{d-1} dr.
inline double equator_energy_quadrature(int d) {
    if (d == 2) fail(ErrorKind::DivergentEnergy, "equator map energy diverges for d = 2");
    const Dimension dim{d};
    auto integrand = [d](double r) { return (d - 1.0) * std::pow(r, d - 1) / (r * r); };
    double error = 0.0;
    const double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, 1.0, 15, 1e-14, &error);
    return sphere_area(dim) * radial;
}

enum class WeightKind { InvSquare, Constant, Custom };

/// Radial density f(r) on (0,1], defining d mu = f(|x|) dx.
class RadialWeight {
public:
    static RadialWeight inv_square(double scale = 1.0) {
        return RadialWeight(WeightKind::InvSquare, scale, 2.0, {});
    }
    static RadialWeight constant(double scale = 1.0) {
        return RadialWeight(WeightKind::Constant, scale, 0.0, {});
    }
    /// f must be nonnegative on (0,1] with f(r) ~ r^{-singularity_order} near 0.
    static RadialWeight custom(std::function<double(double)> f, double singularity_order) {
        if (!f) fail(ErrorKind::InvalidParameter, "custom weight needs an evaluator");
        return RadialWeight(WeightKind::Custom, 1.0, singularity_order, std::move(f));
    }

    WeightKind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }
    double singularity_order() const noexcept { return order_; }

    double operator()(double r) const {
        switch (kind_) {
        case WeightKind::InvSquare: return scale_ / (r * r);
        case WeightKind::Constant: return scale_;
        case WeightKind::Custom: return scale_ * custom_(r);
        }
        return 0.0;
    }

    /// The same weight multiplied by c > 0.
    RadialWeight scaled(double c) const {
        if (!(c > 0.0)) fail(ErrorKind::InvalidParameter, "weight scale must be positive");
        RadialWeight w = *this;
        w.scale_ *= c;
        return w;
    }

    /// Total mass |S^{d-1}| int_0^1 f(r) r^{d-1} dr; finite iff order < d.
    double ball_mass(Dimension d) const {
        if (order_ >= d.value())
            fail(ErrorKind::InvalidParameter, "weight singularity order must be below the dimension");
        const int dd = d.value();
        switch (kind_) {
        case WeightKind::InvSquare: return scale_ * sphere_area(d) / (dd - 2.0);
        case WeightKind::Constant: return scale_ * sphere_area(d) / dd;
        case WeightKind::Custom: {
            boost::math::quadrature::tanh_sinh<double> integrator;
            auto integrand = [&](double r) { return (*this)(r) * std::pow(r, dd - 1); };
            return sphere_area(d) * integrator.integrate(integrand, 0.0, 1.0, 1e-13);
        }
        }
        return 0.0;
    }

private:
    RadialWeight(WeightKind kind, double scale, double order, std::function<double(double)> f)
        : kind_(kind), scale_(scale), order_(order), custom_(std::move(f)) {
        if (!(scale_ > 0.0)) fail(ErrorKind::InvalidParameter, "weight scale must be positive");
    }

    WeightKind kind_;
    double scale_;
    double order_;
    std::function<double(double)> custom_;
};

struct Atom {
    Point position;
    double mass;
};

/// Finite atomic measure; the discrete stand-in for a Radon measure on the
/// closure of a domain.
class PointMeasure {
public:
    PointMeasure(int dim, std::vector<Atom> atoms) : dim_(dim), atoms_(std::move(atoms)) {
        if (dim_ < 1) fail(ErrorKind::InvalidDimension, "measure dimension must be positive");
        if (atoms_.empty()) fail(ErrorKind::InvalidParameter, "measure has no atoms");
        for (const auto& a : atoms_) {
            if (a.position.size() != dim_) fail(ErrorKind::InvalidParameter, "atom dimension mismatch");
            if (!(a.mass > 0.0) || !std::isfinite(a.mass))
                fail(ErrorKind::InvalidParameter, "atom masses must be positive");
            if (!a.position.allFinite()) fail(ErrorKind::InvalidParameter, "atom position not finite");
        }
    }

    int dimension() const noexcept { return dim_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms_) m += a.mass;
        return m;
    }

    double max_radius() const {
        double r = 0.0;
        for (const auto& a : atoms_) r = std::max(r, a.position.norm());
        return r;
    }

    bool inside_ball(double radius, bool strict = false) const {
        for (const auto& a : atoms_) {
            const double n = a.position.norm();
            if (strict ? !(n < radius) : n > radius) return false;
        }
        return true;
    }

    PointMeasure scaled(double c) const {
        auto copy = atoms_;
        for (auto& a : copy) a.mass *= c;
        return PointMeasure(dim_, std::move(copy));
    }

    PointMeasure translated(const Point& v) const {
        auto copy = atoms_;
        for (auto& a : copy) a.position += v;
        return PointMeasure(dim_, std::move(copy));
    }

    /// Integral of g against the measure.
    template <class F>
    double integrate(F&& g) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += a.mass * g(a.position);
        return s;
    }

private:
    int dim_;
    std::vector<Atom> atoms_;
};

namespace detail {

inline double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
    return value;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

} // namespace detail

/// Reads the `x1,...,xd,mass` CSV format.
inline PointMeasure read_point_measure_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::ParseError, "empty measure file");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // BOM
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split(line, ',');
    const int dim = static_cast<int>(header.size()) - 1;
    if (dim < 1 || header.back() != "mass") fail(ErrorKind::ParseError, "header must be x1,...,xd,mass");
    for (int i = 0; i < dim; ++i)
        if (header[i] != "x" + std::to_string(i + 1)) fail(ErrorKind::ParseError, "bad header column " + header[i]);

    std::vector<Atom> atoms;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split(line, ',');
        if (static_cast<int>(cells.size()) != dim + 1)
            fail(ErrorKind::ParseError, "row " + std::to_string(row) + " has wrong column count");
        Atom a{Point(dim), detail::parse_double(cells.back())};
        for (int i = 0; i < dim; ++i) a.position[i] = detail::parse_double(cells[i]);
        atoms.push_back(std::move(a));
    }
    return PointMeasure(dim, std::move(atoms));
}

inline void write_point_measure_csv(std::ostream& out, const PointMeasure& mu) {
    for (int i = 0; i < mu.dimension(); ++i) out << 'x' << (i + 1) << ',';
    out << "mass\n";
    char buf[32];
    for (const auto& a : mu.atoms()) {
        for (int i = 0; i < mu.dimension(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", a.position[i]);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", a.mass);
        out << buf << '\n';
    }
}

} // namespace speclab
