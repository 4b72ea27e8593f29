#pragma once
// Weighted Steklov eigenvalues of the unit disk,
//
//   sigma_k(D, rho) = min-max  int_D |grad u|^2 / int_{dD} u^2 rho dtheta,
//
// in the real trigonometric basis {1, cos n, sin n}_{n <= N}. The harmonic
// extension of cos n / sin n has Dirichlet energy pi n, so the energy Gram
// matrix is diagonal; all the geometry sits in the boundary mass matrix.
//
// A simply connected planar domain enters through a conformal map f from the
// disk, with rho = |f'(e^{i theta})|.

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "speclab/error.hpp"

namespace speclab {

/// Boundary density rho(theta) = sum_m c_m e^{i m theta}; stored for m >= 0,
/// with c_{-m} = conj(c_m).
class FourierDensity {
public:
    static FourierDensity from_coefficients(std::vector<std::complex<double>> coeffs, int sample_count = 0) {
        return FourierDensity(std::move(coeffs), sample_count);
    }

    /// Uniform samples rho(2 pi j / S), j = 0..S-1. Modes above `order` are dropped.
    static FourierDensity from_samples(const std::vector<double>& samples, int order) {
        const int s = static_cast<int>(samples.size());
        if (order < 0 || s < 2 * order + 1) fail(ErrorKind::InvalidParameter, "too few samples for the requested order");
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> spectrum;
        fft.fwd(spectrum, samples);
        std::vector<std::complex<double>> coeffs(order + 1);
        for (int m = 0; m <= order; ++m) coeffs[m] = spectrum[m] / static_cast<double>(s);
        coeffs[0] = {coeffs[0].real(), 0.0};
        return FourierDensity(std::move(coeffs), s);
    }

    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    int sample_count() const noexcept { return samples_; }
    const std::vector<std::complex<double>>& coefficients() const noexcept { return coeffs_; }

    /// c_m for any integer m; zero beyond the truncation order.
    std::complex<double> coefficient(int m) const {
        const int a = std::abs(m);
        if (a > order()) return {0.0, 0.0};
        return m >= 0 ? coeffs_[a] : std::conj(coeffs_[a]);
    }

    double operator()(double theta) const {
        double v = coeffs_[0].real();
        for (int m = 1; m <= order(); ++m) v += 2.0 * (coeffs_[m] * std::polar(1.0, m * theta)).real();
        return v;
    }

    /// int_0^{2 pi} rho dtheta
    double mass() const { return 2.0 * std::numbers::pi * coeffs_[0].real(); }

    FourierDensity scaled(double c) const {
        auto copy = coeffs_;
        for (auto& v : copy) v *= c;
        return FourierDensity(std::move(copy), samples_);
    }

    /// rho(theta - alpha)
    FourierDensity rotated(double alpha) const {
        auto copy = coeffs_;
        for (int m = 0; m <= order(); ++m) copy[m] *= std::polar(1.0, -m * alpha);
        return FourierDensity(std::move(copy), samples_);
    }

    /// Values on the ingestion grid.
    std::vector<double> grid_values() const {
        std::vector<std::complex<double>> full(samples_, {0.0, 0.0});
        for (int m = 0; m <= order(); ++m) {
            full[m % samples_] += coeffs_[m];
            if (m > 0) full[(samples_ - m % samples_) % samples_] += std::conj(coeffs_[m]);
        }
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> values;
        fft.inv(values, full);
        std::vector<double> out(samples_);
        for (int j = 0; j < samples_; ++j) out[j] = values[j].real() * samples_;
        return out;
    }

private:
    FourierDensity(std::vector<std::complex<double>> coeffs, int sample_count) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) fail(ErrorKind::InvalidDensity, "density needs at least the mean coefficient");
        if (std::abs(coeffs_[0].imag()) > 1e-12 * std::max(1.0, std::abs(coeffs_[0].real())))
            fail(ErrorKind::InvalidDensity, "mean coefficient must be real");
        coeffs_[0] = {coeffs_[0].real(), 0.0};
        if (!(coeffs_[0].real() > 0.0)) fail(ErrorKind::InvalidDensity, "density must have positive total mass");
        for (const auto& c : coeffs_)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) fail(ErrorKind::InvalidDensity, "non-finite coefficient");
        // 4x oversampling of the highest mode
        int minimum = 1;
        while (minimum < 8 * std::max(order(), 1)) minimum *= 2;
        samples_ = std::max(sample_count, minimum);

        const auto values = grid_values();
        const double top = *std::max_element(values.begin(), values.end());
        const double bottom = *std::min_element(values.begin(), values.end());
        if (bottom < -1e-9 * top) fail(ErrorKind::InvalidDensity, "density is negative on the sample grid (min " + std::to_string(bottom) + ")");
    }

    std::vector<std::complex<double>> coeffs_;
    int samples_ = 0;
};

/// Basis ordering: index 0 = 1, 1..N = cos n theta, N+1..2N = sin n theta.
inline Eigen::VectorXd dtn_energy_matrix(int modes) {
    if (modes < 1) fail(ErrorKind::InvalidParameter, "need at least one Fourier mode");
    Eigen::VectorXd diag(2 * modes + 1);
    diag[0] = 0.0;
    for (int n = 1; n <= modes; ++n) diag[n] = diag[modes + n] = std::numbers::pi * n;
    return diag;
}

/// Gram matrix of the trigonometric basis in L^2(rho dtheta).
inline Eigen::MatrixXd boundary_mass_matrix(const FourierDensity& rho, int modes) {
    if (modes < 1) fail(ErrorKind::InvalidParameter, "need at least one Fourier mode");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    // int cos(k t) rho dt and int sin(k t) rho dt
    auto C = [&](int k) { return two_pi * rho.coefficient(std::abs(k)).real(); };
    auto S = [&](int k) { return -two_pi * rho.coefficient(k).imag(); };

    const int dim = 2 * modes + 1;
    Eigen::MatrixXd b(dim, dim);
    b(0, 0) = C(0);
    for (int n = 1; n <= modes; ++n) {
        b(0, n) = b(n, 0) = C(n);
        b(0, modes + n) = b(modes + n, 0) = S(n);
    }
    for (int n = 1; n <= modes; ++n) {
        for (int m = 1; m <= modes; ++m) {
            b(n, m) = 0.5 * (C(n - m) + C(n + m));
            b(modes + n, modes + m) = 0.5 * (C(n - m) - C(n + m));
            b(modes + n, m) = 0.5 * (S(n + m) + S(n - m)); // sin n * cos m
        }
    }
    for (int n = 1; n <= modes; ++n)
        for (int m = 1; m <= modes; ++m) b(m, modes + n) = b(modes + n, m);

    // reject indefinite Gram matrices beyond a relative floor
    const double floor = 1e-8 * b.trace() / dim;
    Eigen::MatrixXd shifted = b;
    shifted.diagonal().array() += floor;
    if (Eigen::LLT<Eigen::MatrixXd>(shifted).info() != Eigen::Success)
        fail(ErrorKind::InvalidDensity, "boundary mass matrix is indefinite");
    return b;
}

struct SteklovSpectrum {
    std::vector<double> values; // sigma_0 <= sigma_1 <= ...
    double mass = 0.0;
    int modes = 0;

    std::vector<double> normalized() const {
        std::vector<double> out;
        for (double s : values) out.push_back(s * mass);
        return out;
    }
};

/// Lowest k_max + 1 weighted Steklov eigenvalues with N trigonometric modes.
///
/// sigma_0 = 0 belongs to the constants. Eliminating the constant direction
/// leaves D' w = sigma S w with S the Schur complement of the mass matrix; the
/// symmetric matrix D'^{-1/2} S D'^{-1/2} has eigenvalues 1/sigma, so the
/// smallest sigma come from its largest, best-conditioned eigenvalues.
inline SteklovSpectrum steklov_eigenvalues(const FourierDensity& rho, int k_max, int modes) {
    if (k_max < 0) fail(ErrorKind::InvalidParameter, "k must be >= 0");
    if (modes < k_max + 2) fail(ErrorKind::InvalidParameter, "need N >= k + 2 modes");
    const Eigen::MatrixXd b = boundary_mass_matrix(rho, modes);
    const Eigen::VectorXd energy = dtn_energy_matrix(modes);
    const int dim = 2 * modes;

    const Eigen::VectorXd coupling = b.col(0).tail(dim);
    Eigen::MatrixXd g = b.bottomRightCorner(dim, dim) - coupling * coupling.transpose() / b(0, 0);
    const Eigen::VectorXd inv_sqrt = energy.tail(dim).cwiseSqrt().cwiseInverse();
    g = inv_sqrt.asDiagonal() * g * inv_sqrt.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorKind::NumericBreakdown, "symmetric eigensolver failed");
    const Eigen::VectorXd& mu = solver.eigenvalues(); // ascending

    SteklovSpectrum out;
    out.mass = rho.mass();
    out.modes = modes;
    out.values.push_back(0.0);
    for (int k = 1; k <= k_max; ++k) {
        const double top = mu[dim - k];
        if (!(top > 0.0)) fail(ErrorKind::NumericBreakdown, "nonpositive inverse eigenvalue");
        out.values.push_back(1.0 / top);
    }
    return out;
}

inline std::vector<double> normalized_spectrum(const SteklovSpectrum& spec) { return spec.normalized(); }

/// rho = |f'| on the circle for the disk automorphism f(z) = (z - a)/(1 - conj(a) z),
/// sampled and transformed. `order` is the Fourier truncation.
inline FourierDensity density_from_mobius(std::complex<double> a, int order) {
    if (!(std::abs(a) < 1.0)) fail(ErrorKind::InvalidParameter, "Mobius parameter must satisfy |a| < 1");
    if (order < 1) fail(ErrorKind::InvalidParameter, "order must be >= 1");
    int samples = 1;
    while (samples < 8 * order) samples *= 2;
    const double scale = 1.0 - std::norm(a);
    std::vector<double> values(samples);
    for (int j = 0; j < samples; ++j) {
        const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * j / samples);
        values[j] = scale / std::norm(1.0 - std::conj(a) * z);
    }
    return FourierDensity::from_samples(values, order);
}

/// Random trigonometric density 1 + 2 Re sum_m c_m e^{i m theta} with c_m ~ N/m,
/// rescaled so that 2 sum |c_m| = amplitude; hence rho >= 1 - amplitude > 0.
inline FourierDensity random_positive_density(std::mt19937_64& rng, int order, double amplitude) {
    if (order < 1) fail(ErrorKind::InvalidParameter, "order must be >= 1");
    if (!(amplitude >= 0.0 && amplitude < 1.0)) fail(ErrorKind::InvalidParameter, "amplitude must lie in [0, 1)");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> coeffs(order + 1, {0.0, 0.0});
    double total = 0.0;
    for (int m = 1; m <= order; ++m) {
        const double re = normal(rng), im = normal(rng);
        coeffs[m] = std::complex<double>(re, im) / static_cast<double>(m);
        total += std::abs(coeffs[m]);
    }
    const double factor = total > 0.0 ? 0.5 * amplitude / total : 0.0;
    for (int m = 1; m <= order; ++m) coeffs[m] *= factor;
    coeffs[0] = 1.0;
    return FourierDensity::from_coefficients(std::move(coeffs));
}

enum class BumpShape {
    Poisson,  // wrapped Cauchy, coefficients e^{-eps |m|}: a conformal bubble
    Gaussian, // wrapped normal, coefficients e^{-eps^2 m^2 / 2}
};

struct BumpDensity {
    FourierDensity density;
    bool overlapping; // some centers closer than 4 eps
};

/// Mixture of periodized bumps of width eps at the given angles, total mass 2 pi
/// split in proportion to `masses`.
inline BumpDensity concentrating_density(const std::vector<double>& centers, const std::vector<double>& masses,
                                         double epsilon, BumpShape shape = BumpShape::Poisson) {
    if (centers.empty() || centers.size() != masses.size())
        fail(ErrorKind::InvalidParameter, "centers and masses must be nonempty and of equal length");
    if (!(epsilon > 0.0 && epsilon <= 0.5)) fail(ErrorKind::InvalidParameter, "epsilon must lie in (0, 0.5]");
    double total = 0.0;
    for (double m : masses) {
        if (!(m > 0.0)) fail(ErrorKind::InvalidParameter, "bump masses must be positive");
        total += m;
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    bool overlapping = false;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            double gap = std::fmod(std::abs(centers[i] - centers[j]), two_pi);
            gap = std::min(gap, two_pi - gap);
            if (gap == 0.0) fail(ErrorKind::InvalidParameter, "bump centers must be distinct");
            if (gap < 4.0 * epsilon) overlapping = true;
        }
    }
    // truncate where the envelope drops below 1e-17
    const int order = shape == BumpShape::Poisson ? static_cast<int>(std::ceil(39.2 / epsilon))
                                                  : static_cast<int>(std::ceil(std::sqrt(2.0 * 39.2) / epsilon));
    std::vector<std::complex<double>> coeffs(order + 1, {0.0, 0.0});
    for (int m = 0; m <= order; ++m) {
        const double envelope = shape == BumpShape::Poisson ? std::exp(-epsilon * m) : std::exp(-0.5 * epsilon * epsilon * m * m);
        for (std::size_t j = 0; j < centers.size(); ++j)
            coeffs[m] += (masses[j] / total) * envelope * std::polar(1.0, -m * centers[j]);
    }
    return {FourierDensity::from_coefficients(std::move(coeffs)), overlapping};
}

} // namespace speclab
