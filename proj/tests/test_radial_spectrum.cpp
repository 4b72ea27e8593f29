#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "speclab/radial_spectrum.hpp"
#include "speclab/tridiagonal.hpp"

using namespace speclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::ParseError;
}

// u'' + (d-1)/r u' + (lambda - nu/r^2) u = 0 from u ~ r^l; returns u'(1).
double shoot(int d, int ell, double lambda) {
    const double nu = ell * (d - 2.0 + ell);
    const int steps = 20000;
    double r = 1e-4;
    const double h = (1.0 - r) / steps;
    double u = std::pow(r, ell), v = ell * std::pow(r, ell - 1);
    auto rhs = [&](double rr, double uu, double vv) { return -(d - 1.0) / rr * vv - (lambda - nu / (rr * rr)) * uu; };
    for (int i = 0; i < steps; ++i) {
        const double k1u = v, k1v = rhs(r, u, v);
        const double k2u = v + 0.5 * h * k1v, k2v = rhs(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        const double k3u = v + 0.5 * h * k2v, k3v = rhs(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        const double k4u = v + h * k3v, k4v = rhs(r + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += h;
    }
    return v;
}

double shooting_eigenvalue(int d, int ell, double lo, double hi) {
    double flo = shoot(d, ell, lo);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = shoot(d, ell, mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("harmonic eigenvalues and multiplicities") {
    CHECK(harmonic_eigenvalue(Dimension{3}, 2) == 6.0);
    CHECK(harmonic_eigenvalue(Dimension{7}, 1) == 6.0);
    for (int ell = 0; ell <= 10; ++ell) {
        CHECK(harmonic_multiplicity(Dimension{3}, ell) == static_cast<std::uint64_t>(2 * ell + 1));
        CHECK(harmonic_multiplicity(Dimension{4}, ell) == static_cast<std::uint64_t>((ell + 1) * (ell + 1)));
        CHECK(harmonic_multiplicity(Dimension{2}, ell) == (ell == 0 ? 1u : 2u));
    }
    CHECK(harmonic_multiplicity(Dimension{7}, 1) == 7);
    CHECK(harmonic_multiplicity(Dimension{7}, 2) == 27);
}

TEST_CASE("closed-form lowest eigenvalue") {
    CHECK(lambda1_theory(Dimension{7}) == 6.0);
    CHECK(lambda1_theory(Dimension{6}) == 4.0);
    CHECK(lambda1_theory(Dimension{3}) == 0.25);
    CHECK(lambda1_theory(Dimension{12}) == 11.0);
    CHECK(kind_of([] { lambda1_theory(Dimension{2}); }) == ErrorKind::InvalidDimension);
}

TEST_CASE("beta_plus roots") {
    CHECK(std::abs(beta_plus(Dimension{7}, 0.0)) < 1e-15);
    CHECK(std::abs(beta_plus(Dimension{3}, 0.25) - std::complex<double>(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(beta_plus(Dimension{4}, 2.0) - std::complex<double>(-1.0, 1.0)) < 1e-15);

    // r^beta solves -(r^{d-1} phi')' r^{1-d} = lambda phi / r^2: check by finite differences at r = 0.7
    for (int d : {3, 4, 7, 10}) {
        for (double lambda : {0.1, 0.25, 2.0, 6.0, 30.0}) {
            const auto beta = beta_plus(Dimension{d}, lambda);
            auto phi = [&](double r) { return std::pow(std::complex<double>(r, 0.0), beta); };
            auto flux = [&](double r) {
                const double h = 1e-5;
                return std::pow(r, d - 1) * (phi(r + h) - phi(r - h)) / (2.0 * h);
            };
            const double r = 0.7, h = 1e-3;
            const auto lhs = -(flux(r + h) - flux(r - h)) / (2.0 * h) / std::pow(r, d - 1);
            const auto rhs = lambda * phi(r) / (r * r);
            INFO("d = " << d << ", lambda = " << lambda);
            CHECK(std::abs(lhs - rhs) < 1e-4 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST_CASE("grid validation") {
    CHECK(kind_of([] { GridSpec{8, 1e-6, 2.0}.validate(); }) == ErrorKind::InvalidGrid);
    CHECK(kind_of([] { GridSpec{64, 0.0, 2.0}.validate(); }) == ErrorKind::InvalidGrid);
    CHECK(kind_of([] { GridSpec{64, 0.5, 2.0}.validate(); }) == ErrorKind::InvalidGrid);
    CHECK(kind_of([] { GridSpec{64, 1e-6, 0.5}.validate(); }) == ErrorKind::InvalidGrid);
    const auto r = GridSpec{64, 1e-3, 3.0}.nodes();
    CHECK(r.front() == 1e-3);
    CHECK(r.back() == 1.0);
}

TEST_CASE("tridiagonal pencil against a dense reference") {
    // A = tridiag(-1, 2, -1), B = I: eigenvalues 2 - 2 cos(k pi / (n + 1))
    const int n = 50;
    SymTridiagonal a(n), b(n);
    a.diag.assign(n, 2.0);
    a.off.assign(n - 1, -1.0);
    b.diag.assign(n, 1.0);
    const TridiagonalPencil pencil(a, b);
    for (int k = 0; k < 10; ++k) {
        const double exact = 2.0 - 2.0 * std::cos((k + 1) * pi / (n + 1));
        CHECK_THAT(pencil.eigenvalue(k), WithinRel(exact, 1e-12));
        const auto v = pencil.eigenvector(pencil.eigenvalue(k));
        const auto av = a.multiply(v);
        double res = 0.0;
        for (int i = 0; i < n; ++i) res = std::max(res, std::abs(av[i] - exact * v[i]));
        CHECK(res < 1e-9);
    }
}

TEST_CASE("truncated inverse-square spectrum matches the closed form") {
    // On [delta, 1] with natural boundary conditions the l = 0 eigenvalues are
    // a^2 + (k pi / ln(1/delta))^2, a = (d - 2)/2, for k >= 1.
    for (int d : {3, 4, 5}) {
        const double delta = 1e-4, a = (d - 2) / 2.0, len = std::log(1.0 / delta);
        const auto values = sector_eigenvalues({Dimension{d}, 0, RadialWeight::inv_square(), GridSpec{4096, delta, 2.0}}, 4);
        CHECK_THAT(values[0], WithinAbs(0.0, 1e-9));
        for (int k = 1; k <= 3; ++k) {
            INFO("d = " << d << ", k = " << k);
            CHECK_THAT(values[k], WithinRel(a * a + std::pow(k * pi / len, 2), 2e-3));
        }
    }
}

TEST_CASE("constant weight matches the shooting oracle") {
    // classical Neumann eigenvalues of the unit ball
    const auto spec = ball_weighted_neumann(Dimension{3}, RadialWeight::constant(), 4, GridSpec{2048, 1e-6, 2.0}, 4);
    const double oracle = shooting_eigenvalue(3, 1, 3.0, 6.0);
    CHECK_THAT(oracle, WithinRel(4.3329589, 1e-6));
    CHECK_THAT(spec.eigenvalue(1), WithinRel(oracle, 1e-4));
    CHECK(spec.entry_for(1).sector_ell == 1);
    CHECK(spec.entry_for(1).multiplicity == 3);
    CHECK_THAT(spec.mass, WithinRel(4.0 * pi / 3.0, 1e-14));

    const auto sector2 = sector_eigenvalues({Dimension{3}, 2, RadialWeight::constant(), GridSpec{2048, 1e-6, 2.0}}, 1);
    CHECK_THAT(sector2[0], WithinRel(shooting_eigenvalue(3, 2, 6.0, 12.0), 1e-4));
    const auto radial = sector_eigenvalues({Dimension{4}, 0, RadialWeight::constant(), GridSpec{2048, 1e-6, 2.0}}, 2);
    CHECK_THAT(radial[1], WithinRel(shooting_eigenvalue(4, 0, 20.0, 30.0), 1e-4));
}

TEST_CASE("nested refinement never raises sector eigenvalues") {
    for (int d : {3, 5, 8}) {
        for (const auto& w : {RadialWeight::inv_square(), RadialWeight::constant()}) {
            std::vector<double> previous;
            for (int n : {128, 256, 512, 1024, 2048}) {
                const auto values = sector_eigenvalues({Dimension{d}, 1, w, GridSpec{n, 1e-6, 2.0}}, 4);
                if (!previous.empty())
                    for (int k = 0; k < 4; ++k) CHECK(values[k] <= previous[k] * (1.0 + 1e-10) + 1e-10);
                previous = values;
            }
        }
    }
}

TEST_CASE("sector shift") {
    const GridSpec grid{512, 1e-5, 2.0};
    for (int d : {3, 6, 9}) {
        const auto base = sector_eigenvalues({Dimension{d}, 0, RadialWeight::inv_square(), grid}, 5);
        for (int ell = 1; ell <= 4; ++ell) {
            const double nu = harmonic_eigenvalue(Dimension{d}, ell);
            const auto shifted = sector_eigenvalues({Dimension{d}, ell, RadialWeight::inv_square(), grid}, 5);
            for (int k = 0; k < 5; ++k) CHECK_THAT(shifted[k], WithinAbs(base[k] + nu, 1e-10 * (1.0 + base[k] + nu)));

            // same weight through the general path, angular term folded into the stiffness
            const auto custom = RadialWeight::custom([](double r) { return 1.0 / (r * r); }, 2.0);
            const auto folded = sector_eigenvalues({Dimension{d}, ell, custom, grid}, 5);
            for (int k = 0; k < 5; ++k) CHECK_THAT(folded[k], WithinRel(base[k] + nu, 1e-8));
        }
    }
}

TEST_CASE("weight scaling") {
    const GridSpec grid{512, 1e-6, 2.0};
    for (int d : {3, 7}) {
        for (double c : {0.25, 3.0}) {
            for (const auto& w : {RadialWeight::inv_square(), RadialWeight::constant()}) {
                const auto base = ball_weighted_neumann(Dimension{d}, w, 6, grid, 4);
                const auto scaled = ball_weighted_neumann(Dimension{d}, w.scaled(c), 6, grid, 4);
                for (std::uint64_t k = 0; k <= 6; ++k) {
                    CHECK_THAT(scaled.eigenvalue(k), WithinAbs(base.eigenvalue(k) / c, 1e-10 * (1.0 + base.eigenvalue(k))));
                    CHECK_THAT(scaled.normalized(k), WithinAbs(base.normalized(k), 1e-10 * (1.0 + base.normalized(k))));
                }
            }
        }
    }
}

TEST_CASE("ball spectrum structure") {
    for (int d = 3; d <= 12; ++d) {
        const auto spec = ball_weighted_neumann(Dimension{d}, RadialWeight::inv_square(), 3, GridSpec{1024, 1e-6, 2.0}, 4);
        INFO("d = " << d);
        CHECK(spec.entries.front().sector_ell == 0);
        CHECK(spec.entries.front().multiplicity == 1);
        CHECK_THAT(spec.entries.front().value, WithinAbs(0.0, 1e-9));
        CHECK(spec.essential_flag == (d < 7));
        if (d < 7) {
            const double bottom = std::pow((d - 2) / 2.0, 2);
            REQUIRE(spec.essential_estimate);
            CHECK(*spec.essential_estimate == bottom);
            for (std::size_t i = 1; i < spec.entries.size(); ++i) CHECK(spec.entries[i].value >= bottom - 1e-6);
        } else {
            CHECK_THAT(spec.eigenvalue(1), WithinRel(d - 1.0, 1e-9));
            CHECK(spec.entry_for(1).sector_ell == 1);
            CHECK(spec.entry_for(1).multiplicity == static_cast<std::uint64_t>(d));
            CHECK_FALSE(spec.entry_for(1).localized);
        }
        for (std::size_t i = 1; i < spec.entries.size(); ++i) CHECK(spec.entries[i - 1].value <= spec.entries[i].value);
    }
}

TEST_CASE("essential approximants localize near the cut-off") {
    const auto spec = ball_weighted_neumann(Dimension{3}, RadialWeight::inv_square(), 1, GridSpec{4096, 1e-20, 5.0}, 4);
    CHECK(spec.entry_for(1).localized);
    CHECK(spec.entry_for(1).sector_ell == 0);
    const auto constant = ball_weighted_neumann(Dimension{3}, RadialWeight::constant(), 1, GridSpec{1024, 1e-6, 2.0}, 4);
    CHECK_FALSE(constant.entry_for(1).localized);
}

TEST_CASE("delta refinement lowers the essential approximant") {
    double previous = 1e300;
    for (double delta : {1e-4, 1e-5, 1e-6}) {
        const auto spec = ball_weighted_neumann(Dimension{3}, RadialWeight::inv_square(), 1, GridSpec{4096, delta, 3.0}, 4);
        const double exact = 0.25 + std::pow(pi / std::log(1.0 / delta), 2);
        CHECK_THAT(spec.eigenvalue(1), WithinRel(exact, 5e-3));
        CHECK(spec.eigenvalue(1) < previous);
        previous = spec.eigenvalue(1);
    }
}

TEST_CASE("disjoint union") {
    const auto ball = ball_weighted_neumann(Dimension{7}, RadialWeight::inv_square(), 2, GridSpec{1024, 1e-6, 2.0}, 4);
    const auto two = disjoint_union(ball, ball);
    CHECK(two.eigenvalue(0) == 0.0);
    CHECK(two.eigenvalue(1) == 0.0);
    CHECK_THAT(two.eigenvalue(2), WithinRel(6.0, 1e-9));
    CHECK_THAT(two.mass, WithinRel(2.0 * ball.mass, 1e-15));
    CHECK_THAT(two.normalized(2), WithinRel(2.0 * equator_energy(7), 1e-3));
}

TEST_CASE("radial spectrum errors") {
    const GridSpec grid{256, 1e-6, 2.0};
    CHECK(kind_of([&] { ball_weighted_neumann(Dimension{2}, RadialWeight::inv_square(), 1, grid, 4); }) ==
          ErrorKind::InvalidDimension);
    CHECK(kind_of([&] { ball_weighted_neumann(Dimension{7}, RadialWeight::inv_square(), 1, grid, 0); }) ==
          ErrorKind::TruncationError);
    CHECK(kind_of([&] { ball_weighted_neumann(Dimension{3}, RadialWeight::inv_square(), 1, GridSpec{4, 1e-6, 2.0}, 4); }) ==
          ErrorKind::InvalidGrid);
    const auto negative = RadialWeight::custom([](double) { return -1.0; }, 0.0);
    CHECK(kind_of([&] { assemble_sector({Dimension{3}, 0, negative, grid}); }) == ErrorKind::DegenerateWeight);
    const auto zero = RadialWeight::custom([](double) { return 0.0; }, 0.0);
    CHECK(kind_of([&] { assemble_sector({Dimension{3}, 0, zero, grid}); }) == ErrorKind::DegenerateWeight);
    CHECK(kind_of([&] { solve_sector({Dimension{3}, 0, RadialWeight::inv_square(), grid}, 0); }) ==
          ErrorKind::InvalidParameter);
    const Spectrum empty;
    CHECK(kind_of([&] { empty.eigenvalue(0); }) == ErrorKind::TruncationError);
}
