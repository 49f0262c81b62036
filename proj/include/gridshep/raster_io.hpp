#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gridshep/errors.hpp"
#include "gridshep/format.hpp"
#include "gridshep/grid.hpp"
#include "gridshep/shepard.hpp"

// ESRI ASCII grid rasters plus the two resolution-change operations:
// decimation (pure subsampling to a coarser grid, no averaging) and
// model-driven resampling (evaluate the blended interpolant on a finer or
// arbitrary grid aligned to the source cell centers).

namespace gridshep {

/// North-up raster: row 1 is the northernmost. Values are cell-centered;
/// the interpolation node of (row nu, col mu) sits at the cell center.
struct Raster {
    std::size_t ncols = 0, nrows = 0;
    double xll = 0, yll = 0;  ///< lower-left *corner* of the covered area
    double cellsize = 1;
    double nodata = -9999;
    std::vector<double> values;  ///< row-major, nrows x ncols, row 0 = top

    double value(std::size_t nu, std::size_t mu) const { return values[idx(nu, mu)]; }
    double& value(std::size_t nu, std::size_t mu) { return values[idx(nu, mu)]; }

    /// Cell-center x of column mu (1-based).
    double node_x(std::size_t mu) const {
        return xll + (static_cast<double>(mu) - 0.5) * cellsize;
    }
    /// Cell-center y of row nu counted from the top (1-based).
    double node_y(std::size_t nu) const {
        return yll + (static_cast<double>(nrows - nu) + 0.5) * cellsize;
    }

    void validate() const {
        if (ncols == 0 || nrows == 0)
            throw InvalidInput("raster dimensions must be positive");
        if (!(cellsize > 0) || !std::isfinite(cellsize))
            throw InvalidInput("cellsize must be positive and finite");
        if (values.size() != ncols * nrows)
            throw InvalidInput("raster value count does not match dimensions");
        if (!std::isfinite(xll) || !std::isfinite(yll))
            throw InvalidInput("raster origin must be finite");
    }

    bool operator==(const Raster& o) const {
        return ncols == o.ncols && nrows == o.nrows && xll == o.xll && yll == o.yll &&
               cellsize == o.cellsize && nodata == o.nodata && values == o.values;
    }

private:
    std::size_t idx(std::size_t nu, std::size_t mu) const {
        if (nu < 1 || nu > nrows || mu < 1 || mu > ncols)
            throw IndexOutOfRange("raster cell (" + std::to_string(nu) + "," +
                                  std::to_string(mu) + ") out of range");
        return (nu - 1) * ncols + (mu - 1);
    }
};

/// What read_asc did beyond parsing; callers decide whether to warn.
struct AscReadStats {
    std::size_t cropped_top = 0, cropped_bottom = 0, cropped_left = 0, cropped_right = 0;
    std::size_t interior_nodata = 0;  ///< nodata cells remaining after the crop
    bool cropped() const { return cropped_top + cropped_bottom + cropped_left + cropped_right; }
};

namespace detail {

inline std::string lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline bool parse_double(const char*& p, double& out) {
    char* end = nullptr;
    out = std::strtod(p, &end);
    if (end == p)
        return false;
    p = end;
    return true;
}

inline void skip_ws(const char*& p) {
    while (*p == ' ' || *p == '\t' || *p == '\r')
        ++p;
}

} // namespace detail

/// Parse an ESRI ASCII grid. Header keys are case-insensitive; center-form
/// origins (xllcenter/yllcenter) are normalized to the corner form. A border
/// collar made entirely of nodata cells is cropped off, reported in `stats`.
inline Raster read_asc(std::istream& in, AscReadStats* stats = nullptr) {
    Raster r;
    bool have_ncols = false, have_nrows = false, have_x = false, have_y = false,
         have_cell = false, x_center = false, y_center = false;
    std::size_t line_no = 0;
    std::string line;

    // Header: leading `key value` lines until the first line that starts
    // with a number (the first data row).
    while (true) {
        const auto pos = in.tellg();
        if (!std::getline(in, line))
            throw ParseError("unexpected end of stream in header", line_no + 1);
        ++line_no;
        const char* p = line.c_str();
        detail::skip_ws(p);
        if (*p == '\0')
            continue;  // blank line inside the header region
        if (!std::isalpha(static_cast<unsigned char>(*p))) {
            in.clear();
            in.seekg(pos);
            --line_no;
            break;
        }
        const char* ks = p;
        while (*p && !std::isspace(static_cast<unsigned char>(*p)))
            ++p;
        const std::string key = detail::lower(std::string(ks, p));
        detail::skip_ws(p);
        double v = 0;
        if (!detail::parse_double(p, v))
            throw ParseError("header key '" + key + "' has no numeric value", line_no);
        detail::skip_ws(p);
        if (*p != '\0')
            throw ParseError("trailing content after header value", line_no);
        if (key == "ncols" || key == "nrows") {
            if (v < 1 || v != std::floor(v))
                throw ParseError(key + " must be a positive integer", line_no);
            (key == "ncols" ? r.ncols : r.nrows) = static_cast<std::size_t>(v);
            (key == "ncols" ? have_ncols : have_nrows) = true;
        } else if (key == "xllcorner" || key == "xllcenter") {
            r.xll = v;
            x_center = key == "xllcenter";
            have_x = true;
        } else if (key == "yllcorner" || key == "yllcenter") {
            r.yll = v;
            y_center = key == "yllcenter";
            have_y = true;
        } else if (key == "cellsize") {
            if (!(v > 0))
                throw ParseError("cellsize must be positive", line_no);
            r.cellsize = v;
            have_cell = true;
        } else if (key == "nodata_value") {
            r.nodata = v;
        } else {
            throw ParseError("unknown header key '" + key + "'", line_no);
        }
    }
    if (!have_ncols || !have_nrows || !have_x || !have_y || !have_cell)
        throw ParseError("header is missing required keys", line_no);
    if (x_center)
        r.xll -= r.cellsize / 2;
    if (y_center)
        r.yll -= r.cellsize / 2;

    r.values.resize(r.nrows * r.ncols);
    for (std::size_t row = 0; row < r.nrows; ++row) {
        if (!std::getline(in, line))
            throw ParseError("expected " + std::to_string(r.nrows) + " data rows, got " +
                                 std::to_string(row),
                             line_no);
        ++line_no;
        const char* p = line.c_str();
        for (std::size_t col = 0; col < r.ncols; ++col) {
            double v = 0;
            if (!detail::parse_double(p, v))
                throw ParseError("row has " + std::to_string(col) + " values, expected " +
                                     std::to_string(r.ncols),
                                 line_no);
            r.values[row * r.ncols + col] = v;
        }
        detail::skip_ws(p);
        if (*p != '\0')
            throw ParseError("row has more than " + std::to_string(r.ncols) + " values",
                             line_no);
    }
    while (std::getline(in, line)) {
        ++line_no;
        const char* p = line.c_str();
        detail::skip_ws(p);
        if (*p != '\0')
            throw ParseError("unexpected content after the last data row", line_no);
    }

    // Crop any all-nodata border collar.
    AscReadStats st;
    const auto row_all_nodata = [&](std::size_t row, std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c)
            if (r.values[row * r.ncols + c] != r.nodata)
                return false;
        return true;
    };
    const auto col_all_nodata = [&](std::size_t col, std::size_t r0, std::size_t r1) {
        for (std::size_t row = r0; row < r1; ++row)
            if (r.values[row * r.ncols + col] != r.nodata)
                return false;
        return true;
    };
    std::size_t top = 0, bottom = r.nrows, left = 0, right = r.ncols;
    bool changed = true;
    while (changed && top < bottom && left < right) {
        changed = false;
        if (top < bottom && row_all_nodata(top, left, right)) {
            ++top;
            changed = true;
        }
        if (top < bottom && row_all_nodata(bottom - 1, left, right)) {
            --bottom;
            changed = true;
        }
        if (left < right && col_all_nodata(left, top, bottom)) {
            ++left;
            changed = true;
        }
        if (left < right && col_all_nodata(right - 1, top, bottom)) {
            --right;
            changed = true;
        }
    }
    if (top >= bottom || left >= right)
        throw ParseError("raster contains only nodata values", line_no);
    if (top || left || bottom < r.nrows || right < r.ncols) {
        st.cropped_top = top;
        st.cropped_bottom = r.nrows - bottom;
        st.cropped_left = left;
        st.cropped_right = r.ncols - right;
        std::vector<double> kept;
        kept.reserve((bottom - top) * (right - left));
        for (std::size_t row = top; row < bottom; ++row)
            for (std::size_t col = left; col < right; ++col)
                kept.push_back(r.values[row * r.ncols + col]);
        r.xll += static_cast<double>(left) * r.cellsize;
        r.yll += static_cast<double>(r.nrows - bottom) * r.cellsize;
        r.ncols = right - left;
        r.nrows = bottom - top;
        r.values = std::move(kept);
    }
    for (double v : r.values)
        if (v == r.nodata)
            ++st.interior_nodata;
    if (stats)
        *stats = st;
    return r;
}

/// Emit the corner-form header and the values at 17 significant digits, so
/// read_asc(write_asc(r)) reproduces r exactly.
inline void write_asc(const Raster& r, std::ostream& out) {
    r.validate();
    out << "ncols " << r.ncols << '\n';
    out << "nrows " << r.nrows << '\n';
    out << "xllcorner " << detail::format_full(r.xll) << '\n';
    out << "yllcorner " << detail::format_full(r.yll) << '\n';
    out << "cellsize " << detail::format_full(r.cellsize) << '\n';
    out << "NODATA_value " << detail::format_full(r.nodata) << '\n';
    for (std::size_t row = 0; row < r.nrows; ++row) {
        for (std::size_t col = 0; col < r.ncols; ++col) {
            if (col)
                out << ' ';
            out << detail::format_full(r.values[row * r.ncols + col]);
        }
        out << '\n';
    }
    if (!out)
        throw IoError("failed writing raster stream");
}

/// Keep every factor-th node starting from the top-left one; retained cells
/// carry their original values (subsampling, not averaging). The origin
/// shifts so retained cell centers keep their coordinates.
inline Raster decimate(const Raster& r, std::size_t factor) {
    r.validate();
    if (factor < 1)
        throw InvalidInput("decimation factor must be >= 1");
    if (factor == 1)
        return r;
    const std::size_t ncols = (r.ncols - 1) / factor + 1;
    const std::size_t nrows = (r.nrows - 1) / factor + 1;
    if (ncols < 2 || nrows < 2)
        throw EmptyResult("decimation by " + std::to_string(factor) +
                          " leaves fewer than 2 nodes per axis");
    Raster out;
    out.ncols = ncols;
    out.nrows = nrows;
    out.cellsize = r.cellsize * static_cast<double>(factor);
    out.nodata = r.nodata;
    // First kept center must stay put: top-left in x, and in y the kept top
    // row is the original top row.
    out.xll = r.xll + (r.cellsize - out.cellsize) / 2;
    out.yll = r.yll + (static_cast<double>(r.nrows) - 0.5) * r.cellsize -
              (static_cast<double>(nrows) - 0.5) * out.cellsize;
    out.values.resize(ncols * nrows);
    for (std::size_t row = 0; row < nrows; ++row)
        for (std::size_t col = 0; col < ncols; ++col)
            out.values[row * ncols + col] = r.values[row * factor * r.ncols + col * factor];
    return out;
}

/// Node grid of the raster's cell centers (y ascending, i.e. flipped
/// relative to the north-up storage). Rejects nodata cells: the local
/// polynomial fits need complete blocks.
inline CartesianGrid raster_to_grid(const Raster& r) {
    r.validate();
    if (r.ncols < 2 || r.nrows < 2)
        throw GridTooSmall("raster needs at least 2x2 cells to form a node grid");
    std::vector<double> xs(r.ncols), ys(r.nrows);
    for (std::size_t mu = 1; mu <= r.ncols; ++mu)
        xs[mu - 1] = r.node_x(mu);
    for (std::size_t nu = 1; nu <= r.nrows; ++nu)
        ys[nu - 1] = r.node_y(r.nrows - nu + 1);
    std::vector<double> z(r.ncols * r.nrows);
    for (std::size_t nu = 1; nu <= r.nrows; ++nu)
        for (std::size_t mu = 1; mu <= r.ncols; ++mu) {
            const double v = r.value(r.nrows - nu + 1, mu);
            if (v == r.nodata)
                throw NodataPresent("nodata cell inside the interpolation hull at row " +
                                    std::to_string(r.nrows - nu + 1) + ", col " +
                                    std::to_string(mu));
            z[(nu - 1) * r.ncols + (mu - 1)] = v;
        }
    return CartesianGrid(GridAxis(std::move(xs)), GridAxis(std::move(ys)), std::move(z));
}

struct ResampleInfo {
    std::size_t K = 0, L = 0, t = 0;
    double l_max = 0;
};

/// Evaluate the interpolant of r's node grid on a target grid with the given
/// cellsize, aligned so the target's first cell center coincides with the
/// source's first cell center (coinciding nodes therefore receive exact
/// source values). The target extent is the largest staying inside the hull.
inline Raster resample(const Raster& r, double target_cellsize, std::size_t rdeg,
                       std::size_t sdeg, double u, ResampleInfo* info = nullptr) {
    r.validate();
    if (!(target_cellsize > 0) || !std::isfinite(target_cellsize))
        throw InvalidInput("target cellsize must be positive and finite");
    const CartesianGrid grid = raster_to_grid(r);
    const ShepardModel model = build_model(grid, rdeg, sdeg, u);
    if (info)
        *info = ResampleInfo{model.covering().K, model.covering().L, model.covering().t,
                             model.l_max()};

    const auto count_along = [&](std::size_t src_cells) {
        const double span = static_cast<double>(src_cells - 1) * r.cellsize / target_cellsize;
        return static_cast<std::size_t>(std::floor(span + 1e-9 * std::max(1.0, span))) + 1;
    };
    Raster out;
    out.ncols = count_along(r.ncols);
    out.nrows = count_along(r.nrows);
    out.cellsize = target_cellsize;
    out.nodata = r.nodata;
    out.xll = r.xll + (r.cellsize - target_cellsize) / 2;
    out.yll = r.yll + (r.cellsize - target_cellsize) / 2;

    std::vector<double> xs(out.ncols), ys(out.nrows);
    for (std::size_t mu = 1; mu <= out.ncols; ++mu)
        xs[mu - 1] = out.node_x(mu);
    for (std::size_t nu = 1; nu <= out.nrows; ++nu)
        ys[nu - 1] = out.node_y(out.nrows - nu + 1);  // ascending
    const std::vector<double> z = model.eval_grid(xs, ys);
    out.values.resize(out.ncols * out.nrows);
    for (std::size_t row = 0; row < out.nrows; ++row)
        for (std::size_t col = 0; col < out.ncols; ++col)
            out.values[row * out.ncols + col] = z[(out.nrows - 1 - row) * out.ncols + col];
    return out;
}

} // namespace gridshep
