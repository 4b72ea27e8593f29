#pragma once
// Symmetric tridiagonal pencils (A, B) with B positive semidefinite, as
// produced by piecewise-linear elements in one dimension. Eigenvalues come
// from Sturm-count bisection on the inertia of A - lambda B, eigenvectors
// from inverse iteration with a pivoted tridiagonal solve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "speclab/error.hpp"

namespace speclab {

struct SymTridiagonal {
    std::vector<double> diag; // size n
    std::vector<double> off;  // size n-1, entry (i, i+1)

    SymTridiagonal() = default;
    explicit SymTridiagonal(std::size_t n) : diag(n, 0.0), off(n > 0 ? n - 1 : 0, 0.0) {}

    std::size_t size() const noexcept { return diag.size(); }

    void add_element(std::size_t i, double a00, double a01, double a11) {
        diag[i] += a00;
        off[i] += a01;
        diag[i + 1] += a11;
    }

    /// x^T A y
    double bilinear(std::span<const double> x, std::span<const double> y) const {
        double s = 0.0;
        for (std::size_t i = 0; i < diag.size(); ++i) s += diag[i] * x[i] * y[i];
        for (std::size_t i = 0; i + 1 < diag.size(); ++i) s += off[i] * (x[i] * y[i + 1] + x[i + 1] * y[i]);
        return s;
    }

    std::vector<double> multiply(std::span<const double> x) const {
        const std::size_t n = diag.size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += off[i - 1] * x[i - 1];
            if (i + 1 < n) s += off[i] * x[i + 1];
            y[i] = s;
        }
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : diag) m = std::max(m, std::abs(v));
        for (double v : off) m = std::max(m, std::abs(v));
        return m;
    }
};

class TridiagonalPencil {
public:
    TridiagonalPencil(SymTridiagonal a, SymTridiagonal b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.size() != b_.size() || a_.size() < 2)
            fail(ErrorKind::InvalidParameter, "pencil matrices must share a size >= 2");
        scale_ = std::max(a_.max_abs(), b_.max_abs());
        if (!(scale_ > 0.0) || !std::isfinite(scale_)) fail(ErrorKind::NumericBreakdown, "pencil has no finite scale");
    }

    const SymTridiagonal& stiffness() const noexcept { return a_; }
    const SymTridiagonal& mass() const noexcept { return b_; }
    std::size_t size() const noexcept { return a_.size(); }

    /// Number of negative pivots of A - lambda B, i.e. the number of pencil
    /// eigenvalues strictly below lambda.
    std::size_t count_below(double lambda) const {
        const std::size_t n = size();
        const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
        std::size_t negatives = 0;
        double pivot = a_.diag[0] - lambda * b_.diag[0];
        for (std::size_t i = 0;;) {
            if (pivot == 0.0) pivot = tiny;
            if (pivot < 0.0) ++negatives;
            if (++i == n) break;
            const double e = a_.off[i - 1] - lambda * b_.off[i - 1];
            pivot = (a_.diag[i] - lambda * b_.diag[i]) - e * (e / pivot);
        }
        return negatives;
    }

    /// The k-th (0-based) smallest eigenvalue by bisection.
    double eigenvalue(std::size_t k) const {
        if (k >= size()) fail(ErrorKind::InvalidParameter, "eigenvalue index exceeds pencil size");
        double lo = -1.0;
        for (int guard = 0; count_below(lo) > k; ++guard) {
            if (guard > 2000) fail(ErrorKind::NumericBreakdown, "no lower bracket for eigenvalue " + std::to_string(k));
            lo *= 2.0;
        }
        double hi = 1.0;
        for (int guard = 0; count_below(hi) <= k; ++guard) {
            if (guard > 2000 || !std::isfinite(hi))
                fail(ErrorKind::NumericBreakdown, "no upper bracket for eigenvalue " + std::to_string(k));
            hi *= 2.0;
        }
        constexpr double eps = std::numeric_limits<double>::epsilon();
        for (int it = 0; it < 400; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
            if (count_below(mid) > k)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::vector<double> lowest(std::size_t count) const {
        std::vector<double> out;
        out.reserve(count);
        for (std::size_t k = 0; k < count; ++k) out.push_back(eigenvalue(k));
        return out;
    }

    /// B-normalized eigenvector for a computed eigenvalue, by inverse iteration.
    std::vector<double> eigenvector(double lambda, int iterations = 4) const {
        const std::size_t n = size();
        std::vector<double> sub(n - 1), dia(n), sup(n - 1);
        for (std::size_t i = 0; i < n; ++i) dia[i] = a_.diag[i] - lambda * b_.diag[i];
        for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = sup[i] = a_.off[i] - lambda * b_.off[i];
        const Factorization lu = factor(sub, dia, sup);

        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + 7.0 * static_cast<double>(i));
        for (int it = 0; it < iterations; ++it) {
            std::vector<double> rhs = b_.multiply(x);
            x = lu.solve(std::move(rhs));
            const double norm2 = b_.bilinear(x, x);
            if (!(norm2 > 0.0) || !std::isfinite(norm2))
                fail(ErrorKind::NumericBreakdown, "inverse iteration lost the eigenvector");
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& v : x) v *= inv;
        }
        // fix the sign so the largest component is positive
        const auto big = std::max_element(x.begin(), x.end(), [](double p, double q) { return std::abs(p) < std::abs(q); });
        if (*big < 0.0)
            for (double& v : x) v = -v;
        return x;
    }

private:
    // LU with partial pivoting of a general tridiagonal matrix (dgttrf layout).
    struct Factorization {
        std::vector<double> dl, d, du, du2;
        std::vector<std::size_t> ipiv;

        std::vector<double> solve(std::vector<double> b) const {
            const std::size_t n = d.size();
            for (std::size_t i = 0; i + 1 < n; ++i) {
                if (ipiv[i] == i) {
                    b[i + 1] -= dl[i] * b[i];
                } else {
                    const double t = b[i];
                    b[i] = b[i + 1];
                    b[i + 1] = t - dl[i] * b[i];
                }
            }
            b[n - 1] /= d[n - 1];
            if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
            for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
            return b;
        }
    };

    Factorization factor(std::vector<double> dl, std::vector<double> d, std::vector<double> du) const {
        const std::size_t n = d.size();
        Factorization f;
        f.du2.assign(n > 2 ? n - 2 : 0, 0.0);
        f.ipiv.resize(n);
        for (std::size_t i = 0; i < n; ++i) f.ipiv[i] = i;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] != 0.0) {
                    const double fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    f.du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                f.ipiv[i] = i + 1;
            }
        }
        const double guard = std::numeric_limits<double>::epsilon() * scale_;
        for (double& v : d)
            if (std::abs(v) < guard * 1e-8) v = (v < 0.0 ? -1.0 : 1.0) * guard * 1e-8;
        f.dl = std::move(dl);
        f.d = std::move(d);
        f.du = std::move(du);
        return f;
    }

    SymTridiagonal a_;
    SymTridiagonal b_;
    double scale_ = 1.0;
};

} // namespace speclab
