#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "speclab/disk_steklov.hpp"

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

FourierDensity unit_density() { return FourierDensity::from_coefficients({{1.0, 0.0}}); }

double basis(int index, int modes, double theta) {
    if (index == 0) return 1.0;
    if (index <= modes) return std::cos(index * theta);
    return std::sin((index - modes) * theta);
}

} // namespace

TEST_CASE("Dirichlet energies of harmonic extensions") {
    const auto e = dtn_energy_matrix(5);
    REQUIRE(e.size() == 11);
    CHECK(e[0] == 0.0);
    // oracle: |grad u|^2 = u_r^2 + (u_t / r)^2 for u = r^n cos(n t), integrated in polar coordinates
    for (int n = 1; n <= 5; ++n) {
        double integral = 0.0;
        const int nr = 20000, nt = 64;
        for (int i = 0; i < nr; ++i) {
            const double r = (i + 0.5) / nr;
            for (int j = 0; j < nt; ++j) {
                const double t = 2.0 * pi * j / nt;
                const double ur = n * std::pow(r, n - 1) * std::cos(n * t);
                const double ut = -n * std::pow(r, n - 1) * std::sin(n * t);
                integral += (ur * ur + ut * ut) * r * (1.0 / nr) * (2.0 * pi / nt);
            }
        }
        CHECK_THAT(e[n], WithinRel(integral, 1e-6));
        CHECK(e[5 + n] == e[n]);
    }
    CHECK_THAT(e[3], WithinRel(3.0 * pi, 1e-15));
    CHECK(kind_of([] { dtn_energy_matrix(0); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("mass matrix for the uniform density") {
    const auto b = boundary_mass_matrix(unit_density(), 6);
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(13, pi);
    diag[0] = 2.0 * pi;
    CHECK((b - Eigen::MatrixXd(diag.asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mass matrix entries against direct quadrature") {
    const auto cosine = FourierDensity::from_coefficients({{1.0, 0.0}, {0.5, 0.0}}); // 1 + cos
    CHECK_THAT(boundary_mass_matrix(cosine, 3)(0, 1), WithinRel(pi, 1e-14));

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho = random_positive_density(rng, 6, 0.8);
        const int modes = 8;
        const auto b = boundary_mass_matrix(rho, modes);
        // trapezoid on 512 points is exact for these trigonometric polynomials
        const int pts = 512;
        for (int i = 0; i <= 2 * modes; ++i) {
            for (int j = 0; j <= 2 * modes; ++j) {
                double q = 0.0;
                for (int s = 0; s < pts; ++s) {
                    const double t = 2.0 * pi * s / pts;
                    q += basis(i, modes, t) * basis(j, modes, t) * rho(t);
                }
                q *= 2.0 * pi / pts;
                CHECK_THAT(b(i, j), WithinAbs(q, 1e-12));
            }
        }
        CHECK((boundary_mass_matrix(rho.scaled(2.0), modes) - 2.0 * b).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("uniform density reproduces the disk spectrum") {
    const auto spec = steklov_eigenvalues(unit_density(), 4, 64);
    const double expected[] = {0, 1, 1, 2, 2};
    for (int k = 0; k <= 4; ++k) CHECK_THAT(spec.values[k], WithinAbs(expected[k], 1e-10));
    CHECK_THAT(spec.mass, WithinRel(2.0 * pi, 1e-15));
    CHECK_THAT(spec.normalized()[1], WithinRel(2.0 * pi, 1e-12));
    CHECK(spec.modes == 64);
}

TEST_CASE("Mobius densities have the coefficients conj(a)^m") {
    for (auto a : {std::complex<double>(0.3, 0.0), std::complex<double>(-0.2, 0.5), std::complex<double>(0.0, -0.7)}) {
        const auto rho = density_from_mobius(a, 64);
        for (int m = 0; m <= 64; ++m) CHECK(std::abs(rho.coefficient(m) - std::pow(std::conj(a), m)) < 1e-13);
        CHECK_THAT(rho.mass(), WithinRel(2.0 * pi, 1e-14));
    }
    CHECK(kind_of([] { density_from_mobius({1.0, 0.0}, 8); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { density_from_mobius({0.6, 0.9}, 8); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("Mobius densities attain 2 pi") {
    for (double r : {0.0, 0.3, 0.6, 0.9}) {
        const auto rho = density_from_mobius({r * std::cos(1.0), r * std::sin(1.0)}, 512);
        const auto spec = steklov_eigenvalues(rho, 2, 256);
        INFO("|a| = " << r);
        CHECK_THAT(spec.normalized()[1], WithinAbs(2.0 * pi, 1e-6));
        CHECK_THAT(spec.normalized()[2], WithinAbs(2.0 * pi, 1e-6));
    }
}

TEST_CASE("spectra are invariant under rotation and normalized spectra under scaling") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_positive_density(rng, 5, 0.9);
        const auto base = steklov_eigenvalues(rho, 4, 48);
        const auto turned = steklov_eigenvalues(rho.rotated(0.37 + trial), 4, 48);
        const auto heavy = steklov_eigenvalues(rho.scaled(3.5), 4, 48);
        for (int k = 0; k <= 4; ++k) {
            CHECK_THAT(turned.values[k], WithinAbs(base.values[k], 1e-10));
            CHECK_THAT(heavy.values[k], WithinAbs(base.values[k] / 3.5, 1e-10));
            CHECK_THAT(heavy.normalized()[k], WithinAbs(base.normalized()[k], 1e-9));
        }
    }
}

TEST_CASE("spectra decrease as the trigonometric space grows") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = random_positive_density(rng, 12, 0.95);
        std::vector<double> previous;
        for (int n : {32, 64, 128, 256}) {
            const auto spec = steklov_eigenvalues(rho, 5, n);
            CHECK(spec.values[0] == 0.0);
            for (int k = 1; k <= 5; ++k) CHECK(spec.values[k - 1] <= spec.values[k]);
            if (!previous.empty())
                for (int k = 1; k <= 5; ++k) CHECK(spec.values[k] <= previous[k] * (1.0 + 1e-12));
            previous = spec.values;
        }
    }
}

TEST_CASE("random positive densities stay below 2 pi") {
    std::mt19937_64 rng(0x5EED);
    std::uniform_int_distribution<int> order(1, 8);
    std::uniform_real_distribution<double> amplitude(0.0, 0.95);
    for (int i = 0; i < 200; ++i) {
        const int m = order(rng);
        const auto rho = random_positive_density(rng, m, amplitude(rng));
        CHECK(steklov_eigenvalues(rho, 1, 64).normalized()[1] <= 2.0 * pi + 1e-8);
    }
}

TEST_CASE("density ingestion from samples") {
    const auto rho = FourierDensity::from_coefficients({{2.0, 0.0}, {0.3, -0.2}, {0.0, 0.1}});
    std::vector<double> samples(64);
    for (int j = 0; j < 64; ++j) samples[j] = rho(2.0 * pi * j / 64);
    const auto back = FourierDensity::from_samples(samples, 4);
    for (int m = 0; m <= 4; ++m) CHECK(std::abs(back.coefficient(m) - rho.coefficient(m)) < 1e-14);
    CHECK(std::abs(back.coefficient(-1) - std::conj(rho.coefficient(1))) < 1e-14);
    CHECK(back.sample_count() == 64);
    const auto grid = rho.grid_values();
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK_THAT(grid[j], WithinAbs(rho(2.0 * pi * j / grid.size()), 1e-13));
    CHECK(kind_of([] { FourierDensity::from_samples(std::vector<double>(4, 1.0), 4); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("density validation") {
    CHECK(kind_of([] { FourierDensity::from_coefficients({}); }) == ErrorKind::InvalidDensity);
    CHECK(kind_of([] { FourierDensity::from_coefficients({{0.0, 0.0}}); }) == ErrorKind::InvalidDensity);
    CHECK(kind_of([] { FourierDensity::from_coefficients({{1.0, 0.5}}); }) == ErrorKind::InvalidDensity);
    CHECK(kind_of([] { FourierDensity::from_coefficients({{1.0, 0.0}, {0.8, 0.0}}); }) == ErrorKind::InvalidDensity);
    CHECK(kind_of([] { FourierDensity::from_coefficients({{1.0, 0.0}, {NAN, 0.0}}); }) == ErrorKind::InvalidDensity);
    CHECK_NOTHROW(FourierDensity::from_coefficients({{1.0, 0.0}, {0.5, 0.0}})); // 1 + cos touches zero
    CHECK(kind_of([] { steklov_eigenvalues(unit_density(), 3, 4); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { steklov_eigenvalues(unit_density(), -1, 4); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("concentrating bumps") {
    const auto two = concentrating_density({0.0, pi}, {1.0, 1.0}, 0.1);
    CHECK_FALSE(two.overlapping);
    CHECK_THAT(two.density.mass(), WithinRel(2.0 * pi, 1e-14));
    CHECK(concentrating_density({0.0, 0.3}, {1.0, 1.0}, 0.1).overlapping);
    CHECK(kind_of([] { concentrating_density({0.0, 2.0 * pi}, {1.0, 1.0}, 0.1); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { concentrating_density({0.0}, {1.0, 1.0}, 0.1); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { concentrating_density({0.0}, {1.0}, 0.0); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([] { concentrating_density({0.0}, {-1.0}, 0.1); }) == ErrorKind::InvalidParameter);

    // a single Poisson bump is a Mobius density
    const auto one = concentrating_density({0.4}, {1.0}, 0.2);
    CHECK_THAT(steklov_eigenvalues(one.density, 1, 256).normalized()[1], WithinAbs(2.0 * pi, 1e-8));
    // a single Gaussian bump is not
    const auto gauss = concentrating_density({0.4}, {1.0}, 0.2, BumpShape::Gaussian);
    CHECK(steklov_eigenvalues(gauss.density, 1, 256).normalized()[1] < 2.0 * pi - 1e-3);

    // two antipodal bumps: sigma_bar_2 increases towards 4 pi
    double previous = 0.0;
    for (double eps : {0.4, 0.2, 0.1}) {
        const auto bump = concentrating_density({0.0, pi}, {1.0, 1.0}, eps);
        const double s2 = steklov_eigenvalues(bump.density, 2, 256).normalized()[2];
        CHECK(s2 > previous);
        CHECK(s2 < 4.0 * pi);
        previous = s2;
    }
}
