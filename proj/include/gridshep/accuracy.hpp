#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gridshep/errors.hpp"
#include "gridshep/format.hpp"
#include "gridshep/parallel.hpp"
#include "gridshep/raster_io.hpp"

// Accuracy metrics between co-registered rasters.
//
// Vertical: statistics of per-cell absolute elevation differences plus a
// mask of cells exceeding a threshold.
//
// Horizontal: for a set of contour elevations, the area where exactly one
// of the two rasters lies at or above the level (symmetric difference of
// the superlevel sets, measured by bilinear sub-sampling), divided by the
// mean total contour length of the two rasters,
//
//   H_d = sum_c A_c / ((sum_c C_ref,c + sum_c C_test,c) / 2).
//
// For a monotone ramp shifted horizontally by delta this quotient recovers
// delta exactly, which is the planimetric-displacement reading of the
// metric. Contour lengths come from marching squares with linear edge
// interpolation; the two ambiguous saddle cases are resolved by the
// average-of-corners rule so results are reproducible bit-for-bit.

namespace gridshep {

struct VerticalReport {
    double mean_abs = 0, sd_abs = 0, max_abs = 0;
    std::size_t count = 0;
    double threshold = 0;
    std::vector<std::uint8_t> exceed_mask;  ///< north-up, 1 where |e| > threshold
    std::size_t exceed_count = 0;
};

struct HorizontalReport {
    std::vector<double> levels;
    std::vector<double> areas;      ///< per-level symmetric-difference area
    std::vector<double> lens_ref;   ///< per-level contour length, reference
    std::vector<double> lens_test;  ///< per-level contour length, test
    double area_sum = 0, len_ref = 0, len_test = 0;
    double h_d = 0;
};

namespace detail {

// Same node lattice: equal dimensions and (within fp round-off from origin
// arithmetic) equal origin and cellsize.
inline void require_same_geometry(const Raster& a, const Raster& b) {
    a.validate();
    b.validate();
    const double tol = 1e-9 * a.cellsize;
    if (a.ncols != b.ncols || a.nrows != b.nrows ||
        std::abs(a.cellsize - b.cellsize) > 1e-12 * std::max(a.cellsize, b.cellsize) ||
        std::abs(a.xll - b.xll) > tol || std::abs(a.yll - b.yll) > tol)
        throw GridMismatch("rasters do not share dimensions, origin and cellsize");
}

inline double guarded_hd(double area, double mean_len) {
    if (mean_len > 0)
        return area / mean_len;
    return area == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

} // namespace detail

/// Mean, population standard deviation and maximum of |ref - test| per cell,
/// plus the cells exceeding the threshold.
inline VerticalReport vertical_accuracy(const Raster& ref, const Raster& test,
                                        double threshold) {
    detail::require_same_geometry(ref, test);
    if (!(threshold >= 0) || !std::isfinite(threshold))
        throw InvalidInput("threshold must be finite and non-negative");
    VerticalReport rep;
    rep.threshold = threshold;
    rep.count = ref.values.size();
    rep.exceed_mask.assign(rep.count, 0);
    double sum = 0;
    for (std::size_t i = 0; i < rep.count; ++i) {
        const double e = std::abs(ref.values[i] - test.values[i]);
        sum += e;
        rep.max_abs = std::max(rep.max_abs, e);
        if (e > threshold) {
            rep.exceed_mask[i] = 1;
            ++rep.exceed_count;
        }
    }
    rep.mean_abs = sum / static_cast<double>(rep.count);
    double ss = 0;
    for (std::size_t i = 0; i < rep.count; ++i) {
        const double e = std::abs(ref.values[i] - test.values[i]) - rep.mean_abs;
        ss += e * e;
    }
    rep.sd_abs = std::sqrt(ss / static_cast<double>(rep.count));
    return rep;
}

/// Exceedance mask as a raster sharing the reference geometry (1 with
/// |error| > threshold, else 0), for map display.
inline Raster exceed_mask_raster(const Raster& ref, const VerticalReport& rep) {
    if (rep.exceed_mask.size() != ref.values.size())
        throw GridMismatch("report mask does not match the raster dimensions");
    Raster out = ref;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = rep.exceed_mask[i];
    return out;
}

/// Total polyline length of the marching-squares iso-contour at `level`,
/// linear interpolation along cell edges, saddles split by the
/// average-of-corners rule. No crossing means length 0.
inline double contour_length(const Raster& r, double level) {
    r.validate();
    if (!std::isfinite(level))
        throw InvalidInput("contour level must be finite");
    if (r.ncols < 2 || r.nrows < 2)
        return 0;
    double total = 0;
    for (std::size_t nu = 1; nu < r.nrows; ++nu) {
        const double y_top = r.node_y(nu), y_bot = r.node_y(nu + 1);
        for (std::size_t mu = 1; mu < r.ncols; ++mu) {
            const double x0 = r.node_x(mu), x1 = r.node_x(mu + 1);
            const double z_bl = r.value(nu + 1, mu), z_br = r.value(nu + 1, mu + 1);
            const double z_tr = r.value(nu, mu + 1), z_tl = r.value(nu, mu);
            const unsigned mask = (z_bl >= level ? 1u : 0u) | (z_br >= level ? 2u : 0u) |
                                  (z_tr >= level ? 4u : 0u) | (z_tl >= level ? 8u : 0u);
            if (mask == 0 || mask == 15)
                continue;
            // Crossing points on the four edges (valid only where the two
            // edge corners straddle the level, which the case table honors).
            const auto lerp = [level](double a, double b) { return (level - a) / (b - a); };
            const auto bottom = [&] {
                return std::pair{x0 + lerp(z_bl, z_br) * (x1 - x0), y_bot};
            };
            const auto top = [&] {
                return std::pair{x0 + lerp(z_tl, z_tr) * (x1 - x0), y_top};
            };
            const auto left = [&] {
                return std::pair{x0, y_bot + lerp(z_bl, z_tl) * (y_top - y_bot)};
            };
            const auto right = [&] {
                return std::pair{x1, y_bot + lerp(z_br, z_tr) * (y_top - y_bot)};
            };
            const auto seg = [&total](std::pair<double, double> a,
                                      std::pair<double, double> b) {
                total += std::hypot(b.first - a.first, b.second - a.second);
            };
            switch (mask) {
            case 1: case 14: seg(left(), bottom()); break;
            case 2: case 13: seg(bottom(), right()); break;
            case 3: case 12: seg(left(), right()); break;
            case 4: case 11: seg(right(), top()); break;
            case 6: case 9: seg(bottom(), top()); break;
            case 7: case 8: seg(left(), top()); break;
            case 5:
                if ((z_bl + z_br + z_tr + z_tl) / 4 >= level) {
                    seg(left(), top());
                    seg(bottom(), right());
                } else {
                    seg(left(), bottom());
                    seg(right(), top());
                }
                break;
            case 10:
                if ((z_bl + z_br + z_tr + z_tl) / 4 >= level) {
                    seg(left(), bottom());
                    seg(right(), top());
                } else {
                    seg(left(), top());
                    seg(bottom(), right());
                }
                break;
            }
        }
    }
    return total;
}

/// Symmetric-difference area of the superlevel sets {z >= c} of the two
/// rasters, per level, over the cell hull; sampled on a 4x4 bilinear
/// sub-grid per cell.
inline HorizontalReport horizontal_discrepancy(const Raster& ref, const Raster& test,
                                               const std::vector<double>& levels) {
    detail::require_same_geometry(ref, test);
    if (levels.empty())
        throw EmptyLevels("at least one contour level is required");
    for (double c : levels)
        if (!std::isfinite(c))
            throw InvalidInput("contour levels must be finite");

    HorizontalReport rep;
    rep.levels = levels;
    rep.areas.resize(levels.size());
    rep.lens_ref.resize(levels.size());
    rep.lens_test.resize(levels.size());
    static constexpr double kOffsets[4] = {0.125, 0.375, 0.625, 0.875};
    const double sample_area = ref.cellsize * ref.cellsize / 16.0;

    parallel_for(levels.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t li = begin; li < end; ++li) {
            const double c = levels[li];
            std::size_t mismatched = 0;
            for (std::size_t nu = 1; nu < ref.nrows; ++nu)
                for (std::size_t mu = 1; mu < ref.ncols; ++mu) {
                    const double r_bl = ref.value(nu + 1, mu), r_br = ref.value(nu + 1, mu + 1);
                    const double r_tl = ref.value(nu, mu), r_tr = ref.value(nu, mu + 1);
                    const double t_bl = test.value(nu + 1, mu),
                                 t_br = test.value(nu + 1, mu + 1);
                    const double t_tl = test.value(nu, mu), t_tr = test.value(nu, mu + 1);
                    for (double b : kOffsets)
                        for (double a : kOffsets) {
                            const double rv = (1 - a) * (1 - b) * r_bl + a * (1 - b) * r_br +
                                              (1 - a) * b * r_tl + a * b * r_tr;
                            const double tv = (1 - a) * (1 - b) * t_bl + a * (1 - b) * t_br +
                                              (1 - a) * b * t_tl + a * b * t_tr;
                            if ((rv >= c) != (tv >= c))
                                ++mismatched;
                        }
                }
            rep.areas[li] = static_cast<double>(mismatched) * sample_area;
            rep.lens_ref[li] = contour_length(ref, c);
            rep.lens_test[li] = contour_length(test, c);
        }
    });
    for (std::size_t li = 0; li < levels.size(); ++li) {
        rep.area_sum += rep.areas[li];
        rep.len_ref += rep.lens_ref[li];
        rep.len_test += rep.lens_test[li];
    }
    rep.h_d = detail::guarded_hd(rep.area_sum, (rep.len_ref + rep.len_test) / 2);
    return rep;
}

/// Default contour levels: `count` equispaced elevations strictly between
/// the reference raster's min and max.
inline std::vector<double> default_levels(const Raster& ref, std::size_t count = 10) {
    ref.validate();
    if (count == 0)
        throw EmptyLevels("level count must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(ref.values.begin(), ref.values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo))
        throw EmptyLevels("raster is constant; no levels strictly between min and max exist");
    std::vector<double> levels(count);
    for (std::size_t i = 0; i < count; ++i)
        levels[i] = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(count + 1);
    return levels;
}

inline void write_vertical_csv(const VerticalReport& rep, std::ostream& out) {
    out << "mean_abs,sd_abs,max_abs,count,exceed_count,threshold\n";
    out << detail::format_full(rep.mean_abs) << ',' << detail::format_full(rep.sd_abs) << ','
        << detail::format_full(rep.max_abs) << ',' << rep.count << ',' << rep.exceed_count
        << ',' << detail::format_full(rep.threshold) << '\n';
    if (!out)
        throw IoError("failed writing vertical accuracy report");
}

inline std::string vertical_summary(const VerticalReport& rep) {
    std::string s;
    s += "cells compared:   " + std::to_string(rep.count) + "\n";
    s += "mean |error|:     " + detail::format_fixed3(rep.mean_abs) + " m\n";
    s += "sd of |error|:    " + detail::format_fixed3(rep.sd_abs) + " m\n";
    s += "max |error|:      " + detail::format_fixed3(rep.max_abs) + " m\n";
    s += "cells above " + detail::format_fixed3(rep.threshold) +
         " m: " + std::to_string(rep.exceed_count) + "\n";
    return s;
}

inline void write_horizontal_csv(const HorizontalReport& rep, std::ostream& out) {
    out << "level,area,len_ref,len_test,h_d\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const double hd =
            detail::guarded_hd(rep.areas[i], (rep.lens_ref[i] + rep.lens_test[i]) / 2);
        out << detail::format_full(rep.levels[i]) << ',' << detail::format_full(rep.areas[i])
            << ',' << detail::format_full(rep.lens_ref[i]) << ','
            << detail::format_full(rep.lens_test[i]) << ',' << detail::format_full(hd) << '\n';
    }
    out << "all," << detail::format_full(rep.area_sum) << ',' << detail::format_full(rep.len_ref)
        << ',' << detail::format_full(rep.len_test) << ',' << detail::format_full(rep.h_d)
        << '\n';
    if (!out)
        throw IoError("failed writing horizontal accuracy report");
}

inline std::string horizontal_summary(const HorizontalReport& rep) {
    std::string s;
    s += "levels:           " + std::to_string(rep.levels.size()) + "\n";
    s += "area sum:         " + detail::format_fixed3(rep.area_sum) + " m^2\n";
    s += "contour len ref:  " + detail::format_fixed3(rep.len_ref) + " m\n";
    s += "contour len test: " + detail::format_fixed3(rep.len_test) + " m\n";
    s += "H_d:              " + detail::format_fixed3(rep.h_d) + " m\n";
    return s;
}

} // namespace gridshep
