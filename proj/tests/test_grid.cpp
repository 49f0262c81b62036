#include <gtest/gtest.h>

#include <vector>

#include "gridshep/grid.hpp"
#include "oracles.hpp"

using namespace gridshep;

namespace {

CartesianGrid uniform_grid(std::size_t m, std::size_t n) {
    std::vector<double> xs(m), ys(n);
    for (std::size_t i = 0; i < m; ++i)
        xs[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    std::vector<double> z(m * n, 0.0);
    return {GridAxis(std::move(xs)), GridAxis(std::move(ys)), std::move(z)};
}

} // namespace

TEST(GridAxis, ValidatesInput) {
    EXPECT_THROW(GridAxis({1.0}), InvalidInput);
    EXPECT_THROW(GridAxis({0.0, 0.0}), InvalidInput);
    EXPECT_THROW(GridAxis({1.0, 0.5}), InvalidInput);
    EXPECT_THROW(GridAxis({0.0, std::numeric_limits<double>::infinity()}), InvalidInput);
    const GridAxis ax({-1.0, 0.5, 2.0});
    EXPECT_EQ(ax.size(), 3u);
    EXPECT_EQ(ax.coord(1), -1.0);
    EXPECT_EQ(ax.coord(3), 2.0);
    EXPECT_THROW(ax.coord(0), IndexOutOfRange);
    EXPECT_THROW(ax.coord(4), IndexOutOfRange);
}

TEST(CartesianGrid, ValidatesAndIndexes) {
    EXPECT_THROW(CartesianGrid(GridAxis({0, 1}), GridAxis({0, 1}), {1, 2, 3}), InvalidInput);
    EXPECT_THROW(CartesianGrid(GridAxis({0, 1}), GridAxis({0, 1}),
                               {1, 2, 3, std::nan("")}),
                 InvalidInput);
    // z(nu, mu) = f(x_mu, y_nu): row-major rows indexed by nu.
    const CartesianGrid g(GridAxis({0, 1, 2}), GridAxis({10, 20}), {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(g.m(), 3u);
    EXPECT_EQ(g.n(), 2u);
    EXPECT_EQ(g.z(1, 1), 1.0);
    EXPECT_EQ(g.z(1, 3), 3.0);
    EXPECT_EQ(g.z(2, 1), 4.0);
    EXPECT_THROW(g.z(3, 1), IndexOutOfRange);
    EXPECT_THROW(g.z(0, 1), IndexOutOfRange);
}

TEST(IndexMaps, FlattenRoundTrip) {
    // Column-major convention: (nu, mu) -> (mu-1)*n + nu.
    const std::size_t n = 4;
    EXPECT_EQ(flatten_index(1, 1, n), 1u);
    EXPECT_EQ(flatten_index(4, 1, n), 4u);
    EXPECT_EQ(flatten_index(1, 2, n), 5u);
    EXPECT_EQ(flatten_index(3, 5, n), 19u);
    for (std::size_t mu = 1; mu <= 6; ++mu)
        for (std::size_t nu = 1; nu <= n; ++nu) {
            const auto [nu2, mu2] = unflatten_index(flatten_index(nu, mu, n), n);
            EXPECT_EQ(nu2, nu);
            EXPECT_EQ(mu2, mu);
        }
    EXPECT_THROW(flatten_index(5, 1, n), IndexOutOfRange);
    EXPECT_THROW(flatten_index(0, 1, n), IndexOutOfRange);
}

TEST(IndexMaps, BlockIndexMap) {
    const std::size_t K = 3, L = 4;
    EXPECT_EQ(block_index_map(1, K, L), (std::pair<std::size_t, std::size_t>{1, 1}));
    EXPECT_EQ(block_index_map(4, K, L), (std::pair<std::size_t, std::size_t>{1, 4}));
    EXPECT_EQ(block_index_map(5, K, L), (std::pair<std::size_t, std::size_t>{2, 1}));
    EXPECT_EQ(block_index_map(12, K, L), (std::pair<std::size_t, std::size_t>{3, 4}));
    for (std::size_t j = 1; j <= K * L; ++j) {
        const auto [k, l] = block_index_map(j, K, L);
        EXPECT_EQ(block_linear_index(k, l, K, L), j);
    }
    EXPECT_THROW(block_index_map(0, K, L), IndexOutOfRange);
    EXPECT_THROW(block_index_map(13, K, L), IndexOutOfRange);
}

TEST(BlockCovering, DivisibleCase) {
    // 7x7 grid, r = s = 2: K = L = 3, block starts 1, 3, 5.
    const CartesianGrid g = uniform_grid(7, 7);
    const BlockCovering cov = build_covering(g, 2, 2);
    EXPECT_EQ(cov.K, 3u);
    EXPECT_EQ(cov.L, 3u);
    EXPECT_EQ(cov.t, 9u);
    ASSERT_EQ(cov.blocks.size(), 9u);
    for (std::size_t k = 1; k <= 3; ++k)
        for (std::size_t l = 1; l <= 3; ++l) {
            const Block& b = cov.block(k, l);
            EXPECT_EQ(b.k, k);
            EXPECT_EQ(b.l, l);
            EXPECT_EQ(b.x_start, 2 * (k - 1) + 1);
            EXPECT_EQ(b.y_start, 2 * (l - 1) + 1);
            // In the divisible case the anchor matches the closed formula.
            EXPECT_EQ(cov.anchor_index(k, l), block_anchor_index(k, l, 2, 2, 7));
        }
    // Blocks are stored in linear-index order (l fastest).
    for (std::size_t j = 1; j <= 9; ++j) {
        const auto [k, l] = block_index_map(j, cov.K, cov.L);
        EXPECT_EQ(cov.block(j).k, k);
        EXPECT_EQ(cov.block(j).l, l);
    }
}

TEST(BlockCovering, NonDivisibleShiftsLastBlock) {
    // m = 6, r = 2: ceil(5/2) = 3 blocks, the last shifted to end at node 6.
    const CartesianGrid g = uniform_grid(6, 8);
    const BlockCovering cov = build_covering(g, 2, 3);
    EXPECT_EQ(cov.K, 3u);  // x: starts 1, 3, 4
    EXPECT_EQ(cov.L, 3u);  // y: 8 nodes, s=3 -> ceil(7/3) = 3, starts 1, 4, 5
    EXPECT_EQ(cov.block(1, 1).x_start, 1u);
    EXPECT_EQ(cov.block(2, 1).x_start, 3u);
    EXPECT_EQ(cov.block(3, 1).x_start, 4u);
    EXPECT_EQ(cov.block(1, 1).y_start, 1u);
    EXPECT_EQ(cov.block(1, 2).y_start, 4u);
    EXPECT_EQ(cov.block(1, 3).y_start, 5u);
    // Every node is covered by at least one block.
    std::vector<int> covered(cov.m * cov.n, 0);
    for (const Block& b : cov.blocks)
        for (std::size_t dy = 0; dy <= cov.s; ++dy)
            for (std::size_t dx = 0; dx <= cov.r; ++dx)
                covered[(b.y_start - 1 + dy) * cov.m + (b.x_start - 1 + dx)] = 1;
    for (int c : covered)
        EXPECT_EQ(c, 1);
}

TEST(BlockCovering, Barycenters) {
    const CartesianGrid g(GridAxis({0, 1, 4}), GridAxis({0, 2}), std::vector<double>(6, 0.0));
    const BlockCovering cov = build_covering(g, 2, 1);
    EXPECT_DOUBLE_EQ(cov.block(1, 1).barycenter_x, (0 + 1 + 4) / 3.0);
    EXPECT_DOUBLE_EQ(cov.block(1, 1).barycenter_y, 1.0);
}

TEST(BlockCovering, RejectsTooSmallGrids) {
    const CartesianGrid g = uniform_grid(3, 3);
    EXPECT_THROW(build_covering(g, 3, 1), GridTooSmall);
    EXPECT_THROW(build_covering(g, 1, 3), GridTooSmall);
    EXPECT_THROW(build_covering(g, 0, 1), InvalidInput);
    EXPECT_NO_THROW(build_covering(g, 2, 2));
}

TEST(BlockCovering, SingleBlockGrid) {
    const CartesianGrid g = uniform_grid(3, 3);
    const BlockCovering cov = build_covering(g, 2, 2);
    EXPECT_EQ(cov.K, 1u);
    EXPECT_EQ(cov.L, 1u);
    EXPECT_EQ(cov.block(1).x_start, 1u);
    EXPECT_EQ(cov.anchor_index(1, 1), 1u);
}
