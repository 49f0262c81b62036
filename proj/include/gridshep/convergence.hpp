#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gridshep/errors.hpp"
#include "gridshep/format.hpp"
#include "gridshep/grid.hpp"
#include "gridshep/shepard.hpp"

// Empirical order-of-convergence study: sample a test function on uniform
// m x m grids over [0,1]^2, rebuild it with the blended interpolant, and
// track the sup-norm error over a fixed dense sample as the grid refines.
// On dyadic refinements the error should decay like l_max^min{r+1, s+1}.

namespace gridshep {

/// The standard four-term Franke test function on [0,1]^2.
inline double franke(double x, double y) {
    const double a = 9 * x - 2, b = 9 * y - 2;
    const double c = 9 * x + 1, d = 9 * y + 1;
    const double e = 9 * x - 7, g = 9 * y - 3;
    const double h = 9 * x - 4, i = 9 * y - 7;
    return 0.75 * std::exp(-(a * a + b * b) / 4) +
           0.75 * std::exp(-(c * c / 49 + d / 10)) +
           0.5 * std::exp(-(e * e + g * g) / 4) -
           0.2 * std::exp(-(h * h + i * i));
}

struct ConvergenceRow {
    std::size_t m = 0, n = 0;
    double l_max = 0;
    double max_err = 0;
    /// log2(e_prev / e_curr); present only between consecutive dyadic
    /// refinements with both errors nonzero.
    std::optional<double> observed_order;
};

/// Run the study for square grids of the given sizes. A u at or below the
/// order threshold (3+r+s)/t is legal but voids the order guarantee, so it
/// only warns (to `warn`, pass nullptr to silence).
inline std::vector<ConvergenceRow> run_convergence(
    const std::function<double(double, double)>& f, std::size_t r, std::size_t s, double u,
    const std::vector<double>& sizes, std::size_t sample_density = 201,
    std::ostream* warn = &std::cerr) {
    if (sizes.empty())
        throw IncompatibleSize("at least one grid size is required");
    if (sample_density < 2)
        throw InvalidInput("sample density must be at least 2");
    std::vector<std::size_t> ms(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 2 || sizes[i] != std::floor(sizes[i]))
            throw IncompatibleSize("grid sizes must be integers >= 2");
        ms[i] = static_cast<std::size_t>(sizes[i]);
        if (ms[i] < std::max(r, s) + 1)
            throw IncompatibleSize("grid size " + std::to_string(ms[i]) +
                                   " cannot host degree (" + std::to_string(r) + "," +
                                   std::to_string(s) + ") blocks");
        if (i > 0 && ms[i] <= ms[i - 1])
            throw IncompatibleSize("grid sizes must be strictly increasing");
    }
    if (warn && u <= order_threshold(r, s))
        *warn << "warning: u = " << u << " is at or below the order threshold "
              << order_threshold(r, s) << "; the convergence-order guarantee does not apply\n";

    std::vector<double> sx(sample_density);
    for (std::size_t i = 0; i < sample_density; ++i)
        sx[i] = static_cast<double>(i) / static_cast<double>(sample_density - 1);

    std::vector<ConvergenceRow> rows;
    rows.reserve(ms.size());
    for (std::size_t idx = 0; idx < ms.size(); ++idx) {
        const std::size_t m = ms[idx];
        std::vector<double> coords(m), z(m * m);
        for (std::size_t i = 0; i < m; ++i)
            coords[i] = static_cast<double>(i) / static_cast<double>(m - 1);
        for (std::size_t nu = 0; nu < m; ++nu)
            for (std::size_t mu = 0; mu < m; ++mu)
                z[nu * m + mu] = f(coords[mu], coords[nu]);
        const CartesianGrid grid{GridAxis(coords), GridAxis(coords), std::move(z)};
        const ShepardModel model = build_model(grid, r, s, u);

        const std::vector<double> approx = model.eval_grid(sx, sx);
        double max_err = 0;
        for (std::size_t row = 0; row < sample_density; ++row)
            for (std::size_t col = 0; col < sample_density; ++col)
                max_err = std::max(max_err,
                                   std::abs(f(sx[col], sx[row]) -
                                            approx[row * sample_density + col]));

        ConvergenceRow out;
        out.m = out.n = m;
        out.l_max = model.l_max();
        out.max_err = max_err;
        if (idx > 0) {
            const ConvergenceRow& prev = rows.back();
            const double ratio = prev.l_max / out.l_max;
            if (std::abs(ratio - 2) <= 1e-9 * 2 && prev.max_err > 0 && out.max_err > 0)
                out.observed_order = std::log2(prev.max_err / out.max_err);
        }
        rows.push_back(out);
    }
    return rows;
}

inline void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
    out << "m,n,l_max,max_err,observed_order\n";
    for (const ConvergenceRow& row : rows) {
        out << row.m << ',' << row.n << ',' << detail::format_full(row.l_max) << ','
            << detail::format_full(row.max_err) << ',';
        if (row.observed_order)
            out << detail::format_full(*row.observed_order);
        out << '\n';
    }
    if (!out)
        throw IoError("failed writing convergence table");
}

} // namespace gridshep
