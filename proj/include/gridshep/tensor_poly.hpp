#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridshep/errors.hpp"

// Local tensor-product interpolating polynomial on one node block, in a
// scaled, barycenter-shifted monomial basis:
//
//   p(x, y) = sum_{lambda=0..r} sum_{mu=0..s}
//             a_{lambda,mu} ((x - x_b)/h_x)^lambda ((y - y_b)/h_y)^mu
//
// with h_x = max_alpha |block_x[alpha] - x_b| (and analogously h_y). The
// per-node normalization (x - x_b)/(x_node - x_b) is singular whenever a
// node coincides with the barycenter, which always happens on uniform
// blocks of even degree; the extent-based scale spans the same space and
// keeps the system well conditioned for any block.

namespace gridshep {

struct LocalPolynomial {
    std::size_t r = 0;
    std::size_t s = 0;
    double center_x = 0;
    double center_y = 0;
    double h_x = 1;
    double h_y = 1;
    /// Coefficients a_{lambda,mu}, stored at [mu*(r+1) + lambda].
    std::vector<double> coeffs;

    double coeff(std::size_t lambda, std::size_t mu) const {
        if (lambda > r || mu > s)
            throw IndexOutOfRange("coefficient (" + std::to_string(lambda) + "," +
                                  std::to_string(mu) + ") out of range");
        return coeffs[mu * (r + 1) + lambda];
    }
};

/// Sup-norm bounds on f^(r+1,0), f^(0,s+1) and f^(r+1,s+1) over the domain.
struct DerivativeBounds {
    double m_x = 0;
    double m_y = 0;
    double m_xy = 0;
};

/// Evaluate by nested Horner in both variables.
inline double eval(const LocalPolynomial& p, double x, double y) {
    const double X = (x - p.center_x) / p.h_x;
    const double Y = (y - p.center_y) / p.h_y;
    double acc = 0;
    for (std::size_t mu = p.s + 1; mu-- > 0;) {
        const double* row = p.coeffs.data() + mu * (p.r + 1);
        double inner = 0;
        for (std::size_t lambda = p.r + 1; lambda-- > 0;)
            inner = inner * X + row[lambda];
        acc = acc * Y + inner;
    }
    return acc;
}

namespace detail {

// Gaussian elimination with partial pivoting on a dense t x t system,
// rows equilibrated by their max-abs entry first. Throws SingularSystem
// when a pivot falls below 1e-13 after scaling.
inline std::vector<double> solve_dense(std::vector<double>& a, std::vector<double>& b,
                                       std::size_t t) {
    constexpr double kPivotTol = 1e-13;
    for (std::size_t i = 0; i < t; ++i) {
        double row_max = 0;
        for (std::size_t j = 0; j < t; ++j)
            row_max = std::max(row_max, std::fabs(a[i * t + j]));
        if (row_max == 0)
            throw SingularSystem("zero row in interpolation system");
        for (std::size_t j = 0; j < t; ++j)
            a[i * t + j] /= row_max;
        b[i] /= row_max;
    }
    for (std::size_t col = 0; col < t; ++col) {
        std::size_t pivot = col;
        for (std::size_t i = col + 1; i < t; ++i)
            if (std::fabs(a[i * t + col]) > std::fabs(a[pivot * t + col]))
                pivot = i;
        if (std::fabs(a[pivot * t + col]) < kPivotTol)
            throw SingularSystem("pivot below 1e-13 at column " + std::to_string(col));
        if (pivot != col) {
            for (std::size_t j = 0; j < t; ++j)
                std::swap(a[col * t + j], a[pivot * t + j]);
            std::swap(b[col], b[pivot]);
        }
        const double d = a[col * t + col];
        for (std::size_t i = col + 1; i < t; ++i) {
            const double factor = a[i * t + col] / d;
            if (factor == 0)
                continue;
            for (std::size_t j = col; j < t; ++j)
                a[i * t + j] -= factor * a[col * t + j];
            b[i] -= factor * b[col];
        }
    }
    std::vector<double> x(t);
    for (std::size_t i = t; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < t; ++j)
            acc -= a[i * t + j] * x[j];
        x[i] = acc / a[i * t + i];
    }
    return x;
}

inline double factorial(std::size_t n) {
    double f = 1;
    for (std::size_t i = 2; i <= n; ++i)
        f *= static_cast<double>(i);
    return f;
}

} // namespace detail

/// Fit the interpolating polynomial of the block data. `values` is
/// (s+1) rows by (r+1) columns, row-major: values[beta*(r+1) + alpha] =
/// f(block_x[alpha], block_y[beta]).
inline LocalPolynomial fit(std::span<const double> block_x, std::span<const double> block_y,
                           std::span<const double> values) {
    const std::size_t r = block_x.size() - 1;
    const std::size_t s = block_y.size() - 1;
    if (block_x.size() < 2 || block_y.size() < 2)
        throw InvalidInput("block needs at least 2 nodes per axis");
    if (values.size() != (r + 1) * (s + 1))
        throw InvalidInput("value matrix size does not match block dimensions");
    for (std::size_t i = 0; i + 1 <= r; ++i)
        if (!(block_x[i] < block_x[i + 1]))
            throw InvalidInput("block x coordinates must be strictly increasing");
    for (std::size_t i = 0; i + 1 <= s; ++i)
        if (!(block_y[i] < block_y[i + 1]))
            throw InvalidInput("block y coordinates must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v))
            throw InvalidInput("block values must be finite");

    LocalPolynomial p;
    p.r = r;
    p.s = s;
    double cx = 0, cy = 0;
    for (double v : block_x)
        cx += v;
    for (double v : block_y)
        cy += v;
    p.center_x = cx / static_cast<double>(r + 1);
    p.center_y = cy / static_cast<double>(s + 1);
    double hx = 0, hy = 0;
    for (double v : block_x)
        hx = std::max(hx, std::fabs(v - p.center_x));
    for (double v : block_y)
        hy = std::max(hy, std::fabs(v - p.center_y));
    p.h_x = hx;
    p.h_y = hy;

    const std::size_t t = (r + 1) * (s + 1);
    std::vector<double> X(r + 1), Y(s + 1);
    for (std::size_t a = 0; a <= r; ++a)
        X[a] = (block_x[a] - p.center_x) / p.h_x;
    for (std::size_t b = 0; b <= s; ++b)
        Y[b] = (block_y[b] - p.center_y) / p.h_y;

    // Vandermonde-type system: row (alpha, beta), column (lambda, mu),
    // both with the x index running fastest, matching coeffs.
    std::vector<double> V(t * t);
    std::vector<double> rhs(values.begin(), values.end());
    for (std::size_t beta = 0; beta <= s; ++beta) {
        for (std::size_t alpha = 0; alpha <= r; ++alpha) {
            const std::size_t row = beta * (r + 1) + alpha;
            double ypow = 1;
            for (std::size_t mu = 0; mu <= s; ++mu) {
                double xpow = 1;
                for (std::size_t lambda = 0; lambda <= r; ++lambda) {
                    V[row * t + mu * (r + 1) + lambda] = xpow * ypow;
                    xpow *= X[alpha];
                }
                ypow *= Y[beta];
            }
        }
    }
    p.coeffs = detail::solve_dense(V, rhs, t);
    return p;
}

/// Node polynomials u_r(x) = prod (x - block_x[lambda]) and
/// v_s(y) = prod (y - block_y[mu]).
inline std::pair<double, double> node_polynomials(std::span<const double> block_x,
                                                  std::span<const double> block_y, double x,
                                                  double y) {
    double u = 1, v = 1;
    for (double c : block_x)
        u *= x - c;
    for (double c : block_y)
        v *= y - c;
    return {u, v};
}

/// Upper bound on |f(x,y) - p(x,y)| from the tensor-product remainder,
/// with the intermediate-point derivatives replaced by sup-norm bounds:
///   |u_r| M_x/(r+1)! + |v_s| M_y/(s+1)! + |u_r||v_s| M_xy/((r+1)!(s+1)!).
inline double stancu_bound(std::span<const double> block_x, std::span<const double> block_y,
                           double x, double y, const DerivativeBounds& bounds) {
    const std::size_t r = block_x.size() - 1;
    const std::size_t s = block_y.size() - 1;
    const auto [u, v] = node_polynomials(block_x, block_y, x, y);
    const double fr = detail::factorial(r + 1);
    const double fs = detail::factorial(s + 1);
    return std::fabs(u) * bounds.m_x / fr + std::fabs(v) * bounds.m_y / fs +
           std::fabs(u) * std::fabs(v) * bounds.m_xy / (fr * fs);
}

} // namespace gridshep
