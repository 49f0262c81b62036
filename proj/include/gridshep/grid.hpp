#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gridshep/errors.hpp"

// Cartesian node grid and its covering by rectangular node blocks.
//
// All public node/block indices are 1-based. The linear node ordering is
// column-major: node (nu, mu) -> (mu-1)*n + nu, with nu the y index (1..n)
// and mu the x index (1..m).

namespace gridshep {

/// One strictly increasing coordinate axis.
class GridAxis {
public:
    explicit GridAxis(std::vector<double> coords) : coords_(std::move(coords)) {
        if (coords_.size() < 2)
            throw InvalidInput("axis needs at least 2 coordinates, got " +
                               std::to_string(coords_.size()));
        for (std::size_t i = 0; i + 1 < coords_.size(); ++i) {
            if (!(coords_[i] < coords_[i + 1]))
                throw InvalidInput("axis coordinates must be strictly increasing at position " +
                                   std::to_string(i + 1));
            if (!std::isfinite(coords_[i]) || !std::isfinite(coords_[i + 1]))
                throw InvalidInput("axis coordinates must be finite");
        }
    }

    std::size_t size() const { return coords_.size(); }

    /// 1-based coordinate access.
    double coord(std::size_t i) const {
        if (i < 1 || i > coords_.size())
            throw IndexOutOfRange("axis index " + std::to_string(i) + " out of 1.." +
                                  std::to_string(coords_.size()));
        return coords_[i - 1];
    }

    const std::vector<double>& coords() const { return coords_; }

private:
    std::vector<double> coords_;
};

/// Node grid with elevations: z(nu, mu) = f(x_mu, y_nu).
class CartesianGrid {
public:
    /// z is row-major with n rows (y index) and m columns (x index).
    CartesianGrid(GridAxis x_axis, GridAxis y_axis, std::vector<double> z)
        : x_(std::move(x_axis)), y_(std::move(y_axis)), z_(std::move(z)) {
        if (z_.size() != x_.size() * y_.size())
            throw InvalidInput("z has " + std::to_string(z_.size()) + " entries, expected " +
                               std::to_string(x_.size() * y_.size()));
        for (double v : z_)
            if (!std::isfinite(v))
                throw InvalidInput("z entries must be finite; resolve nodata before grid construction");
    }

    std::size_t m() const { return x_.size(); }
    std::size_t n() const { return y_.size(); }

    double x(std::size_t mu) const { return x_.coord(mu); }
    double y(std::size_t nu) const { return y_.coord(nu); }

    /// 1-based elevation access, nu = row (y), mu = column (x).
    double z(std::size_t nu, std::size_t mu) const {
        if (nu < 1 || nu > n() || mu < 1 || mu > m())
            throw IndexOutOfRange("grid index (" + std::to_string(nu) + "," +
                                  std::to_string(mu) + ") out of range");
        return z_[(nu - 1) * m() + (mu - 1)];
    }

    const GridAxis& x_axis() const { return x_; }
    const GridAxis& y_axis() const { return y_; }
    const std::vector<double>& z_data() const { return z_; }

private:
    GridAxis x_;
    GridAxis y_;
    std::vector<double> z_;
};

/// Flattened node index: (nu, mu) -> (mu-1)*n + nu.
inline std::size_t flatten_index(std::size_t nu, std::size_t mu, std::size_t n) {
    if (nu < 1 || nu > n || mu < 1)
        throw IndexOutOfRange("flatten_index(" + std::to_string(nu) + "," + std::to_string(mu) +
                              ") invalid for n=" + std::to_string(n));
    return (mu - 1) * n + nu;
}

/// Inverse of flatten_index.
inline std::pair<std::size_t, std::size_t> unflatten_index(std::size_t idx, std::size_t n) {
    if (idx < 1)
        throw IndexOutOfRange("linear node index must be >= 1");
    return {(idx - 1) % n + 1, (idx - 1) / n + 1};
}

/// Linear block index -> (k, l): k = div(j-1, L) + 1, l = mod(j-1, L) + 1.
inline std::pair<std::size_t, std::size_t> block_index_map(std::size_t j, std::size_t K,
                                                           std::size_t L) {
    if (j < 1 || j > K * L)
        throw IndexOutOfRange("block index " + std::to_string(j) + " out of 1.." +
                              std::to_string(K * L));
    return {(j - 1) / L + 1, (j - 1) % L + 1};
}

/// Inverse of block_index_map.
inline std::size_t block_linear_index(std::size_t k, std::size_t l, std::size_t K, std::size_t L) {
    if (k < 1 || k > K || l < 1 || l > L)
        throw IndexOutOfRange("block (" + std::to_string(k) + "," + std::to_string(l) +
                              ") out of range");
    return (k - 1) * L + l;
}

/// Anchor (bottom-left node) of block (k, l) in the divisible case:
/// i(k, l) = (k-1)*r*n + (l-1)*s + 1.
inline std::size_t block_anchor_index(std::size_t k, std::size_t l, std::size_t r, std::size_t s,
                                      std::size_t n) {
    if (k < 1 || l < 1)
        throw IndexOutOfRange("block indices must be >= 1");
    return (k - 1) * r * n + (l - 1) * s + 1;
}

/// One (r+1) x (s+1) node block sigma_{k,l}.
struct Block {
    std::size_t k = 0;        ///< column block index, 1..K
    std::size_t l = 0;        ///< row block index, 1..L
    std::size_t x_start = 0;  ///< 1-based index of first x node
    std::size_t y_start = 0;  ///< 1-based index of first y node
    double barycenter_x = 0;
    double barycenter_y = 0;
};

/// Covering of the grid by K*L blocks, stored in block_index_map order
/// (j = (k-1)*L + l, so l varies fastest).
struct BlockCovering {
    std::size_t r = 0;
    std::size_t s = 0;
    std::size_t K = 0;
    std::size_t L = 0;
    std::size_t t = 0;  ///< nodes per block, (r+1)*(s+1)
    std::size_t m = 0;  ///< grid columns
    std::size_t n = 0;  ///< grid rows
    std::vector<Block> blocks;

    /// 1-based block access by linear index.
    const Block& block(std::size_t j) const {
        if (j < 1 || j > blocks.size())
            throw IndexOutOfRange("block index " + std::to_string(j) + " out of 1.." +
                                  std::to_string(blocks.size()));
        return blocks[j - 1];
    }

    const Block& block(std::size_t k, std::size_t l) const {
        return block(block_linear_index(k, l, K, L));
    }

    /// Flattened index of the block's bottom-left node. Equals
    /// block_anchor_index(k, l, r, s, n) whenever r | m-1 and s | n-1.
    std::size_t anchor_index(std::size_t k, std::size_t l) const {
        const Block& b = block(k, l);
        return flatten_index(b.y_start, b.x_start, n);
    }
};

namespace detail {

// Start indices of the blocks along one axis. When deg does not divide
// count-1, the final block is shifted left so it ends at the last node.
inline std::vector<std::size_t> axis_block_starts(std::size_t count, std::size_t deg) {
    const std::size_t nblocks = (count - 1 + deg - 1) / deg;
    std::vector<std::size_t> starts(nblocks);
    for (std::size_t k = 1; k <= nblocks; ++k)
        starts[k - 1] = std::min((k - 1) * deg + 1, count - deg);
    return starts;
}

inline double mean_of(const std::vector<double>& coords, std::size_t start, std::size_t count) {
    double sum = 0;
    for (std::size_t i = 0; i < count; ++i)
        sum += coords[start - 1 + i];
    return sum / static_cast<double>(count);
}

} // namespace detail

/// Cover the grid with (r+1) x (s+1) node blocks. K = ceil((m-1)/r) and
/// L = ceil((n-1)/s); in the non-divisible case the last block along an
/// axis is shifted so it ends at the final node.
inline BlockCovering build_covering(const CartesianGrid& grid, std::size_t r, std::size_t s) {
    if (r < 1 || s < 1)
        throw InvalidInput("block degrees must be >= 1");
    const std::size_t m = grid.m(), n = grid.n();
    if (m < r + 1 || n < s + 1)
        throw GridTooSmall("grid " + std::to_string(m) + "x" + std::to_string(n) +
                           " too small for degrees r=" + std::to_string(r) +
                           ", s=" + std::to_string(s));

    BlockCovering cov;
    cov.r = r;
    cov.s = s;
    cov.t = (r + 1) * (s + 1);
    cov.m = m;
    cov.n = n;

    const auto x_starts = detail::axis_block_starts(m, r);
    const auto y_starts = detail::axis_block_starts(n, s);
    cov.K = x_starts.size();
    cov.L = y_starts.size();
    cov.blocks.reserve(cov.K * cov.L);
    for (std::size_t k = 1; k <= cov.K; ++k) {
        for (std::size_t l = 1; l <= cov.L; ++l) {
            Block b;
            b.k = k;
            b.l = l;
            b.x_start = x_starts[k - 1];
            b.y_start = y_starts[l - 1];
            b.barycenter_x = detail::mean_of(grid.x_axis().coords(), b.x_start, r + 1);
            b.barycenter_y = detail::mean_of(grid.y_axis().coords(), b.y_start, s + 1);
            cov.blocks.push_back(b);
        }
    }
    return cov;
}

} // namespace gridshep
