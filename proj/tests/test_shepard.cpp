#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "gridshep/shepard.hpp"
#include "oracles.hpp"

using namespace gridshep;

namespace {

CartesianGrid uniform_franke_grid(std::size_t m, std::size_t n) {
    std::vector<double> xs(m), ys(n);
    for (std::size_t i = 0; i < m; ++i)
        xs[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < n; ++i)
        ys[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    const auto f = [](double x, double y) {
        return std::sin(3 * x) + std::cos(2 * y) + x * y;
    };
    return oracles::grid_from_function(f, std::move(xs), std::move(ys));
}

} // namespace

TEST(BuildModel, ValidatesInput) {
    const CartesianGrid g = uniform_franke_grid(5, 5);
    EXPECT_THROW(build_model(g, 2, 2, 0.0), InvalidInput);
    EXPECT_THROW(build_model(g, 2, 2, -1.0), InvalidInput);
    EXPECT_THROW(build_model(g, 5, 2, 2.0), GridTooSmall);
    const ShepardModel model = build_model(g, 2, 2, 2.0);
    EXPECT_EQ(model.covering().K, 2u);
    EXPECT_EQ(model.covering().L, 2u);
    EXPECT_DOUBLE_EQ(model.l_max(), 0.5);
    EXPECT_THROW(model.poly(0), IndexOutOfRange);
    EXPECT_THROW(model.poly(5), IndexOutOfRange);
}

TEST(OrderThreshold, ClosedForm) {
    EXPECT_DOUBLE_EQ(order_threshold(1, 1), 5.0 / 4.0);
    EXPECT_DOUBLE_EQ(order_threshold(2, 2), 7.0 / 9.0);
    EXPECT_DOUBLE_EQ(order_threshold(2, 3), 8.0 / 12.0);
}

TEST(Eval, InterpolatesAtEveryNode) {
    auto rng = oracles::make_rng(1);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t m = 5 + trial * 3, n = 6 + trial * 2;
        const CartesianGrid g = oracles::random_grid(rng, m, n);
        const std::size_t r = 1 + trial % 3, s = 1 + (trial + 1) % 3;
        const ShepardModel model = build_model(g, r, s, 2.0);
        for (std::size_t nu = 1; nu <= n; ++nu)
            for (std::size_t mu = 1; mu <= m; ++mu)
                EXPECT_EQ(model.eval(g.x(mu), g.y(nu)), g.z(nu, mu));
    }
}

TEST(Weights, PartitionOfUnityAndNonNegative) {
    auto rng = oracles::make_rng(2);
    const CartesianGrid g = oracles::random_grid(rng, 11, 9);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    std::uniform_real_distribution<double> pt(0, 1);
    int used = 0;
    while (used < 300) {
        const double x = pt(rng), y = pt(rng);
        if (model.nearest_node(x, y).distance < 1e-6)
            continue;
        ++used;
        const WeightVector w = model.weights(x, y);
        ASSERT_EQ(w.size(), model.covering().blocks.size());
        double sum = 0;
        for (double v : w) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Weights, ThrowsAtNodes) {
    const CartesianGrid g = uniform_franke_grid(7, 7);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    EXPECT_THROW(model.weights(g.x(4), g.y(4)), NodeCoincidence);
    EXPECT_THROW(model.weights(g.x(1), g.y(7)), NodeCoincidence);
    // Just inside the relative node-hit tolerance also counts as a hit.
    EXPECT_THROW(model.weights(g.x(4) + 0.1 * model.l_max() * ShepardModel::kNodeHitRel,
                               g.y(4)),
                 NodeCoincidence);
}

TEST(Weights, MatchesLiteralFormulaOracle) {
    const CartesianGrid g = uniform_franke_grid(13, 13);
    const ShepardModel model = build_model(g, 2, 2, 2.0);
    auto rng = oracles::make_rng(3);
    std::uniform_real_distribution<double> pt(0, 1);
    int used = 0;
    while (used < 200) {
        const double x = pt(rng), y = pt(rng);
        if (model.nearest_node(x, y).distance < 1e-3)
            continue;
        ++used;
        const WeightVector w = model.weights(x, y);
        const std::vector<long double> ref = oracles::literal_weights(model, x, y);
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double rj = static_cast<double>(ref[j]);
            EXPECT_NEAR(w[j], rj, 1e-12 * std::max(rj, 1e-300));
        }
    }
}

TEST(Weights, SevenBySevenCenterGeometry) {
    // 7x7 uniform grid, r = s = 2: the domain center is the node (4, 4) and
    // weights are undefined there (evaluation returns the stored value).
    // The covering is symmetric about the center, so weights at reflected
    // points map to the reflected blocks: W_{k,l}(x,y) = W_{4-k,l}(1-x,y)
    // = W_{l,k}(y,x).
    const CartesianGrid g = uniform_franke_grid(7, 7);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    EXPECT_EQ(model.eval(0.5, 0.5), g.z(4, 4));
    EXPECT_THROW(model.weights(0.5, 0.5), NodeCoincidence);

    const std::size_t K = model.covering().K, L = model.covering().L;
    ASSERT_EQ(K, 3u);
    const double d = 0.07;
    const WeightVector wpp = model.weights(0.5 + d, 0.5 + d);
    const WeightVector wmp = model.weights(0.5 - d, 0.5 + d);
    const WeightVector wpm = model.weights(0.5 + d, 0.5 - d);
    const WeightVector wmm = model.weights(0.5 - d, 0.5 - d);
    for (std::size_t k = 1; k <= K; ++k)
        for (std::size_t l = 1; l <= L; ++l) {
            const std::size_t j = block_linear_index(k, l, K, L) - 1;
            const std::size_t jx = block_linear_index(4 - k, l, K, L) - 1;
            const std::size_t jy = block_linear_index(k, 4 - l, K, L) - 1;
            const std::size_t jxy = block_linear_index(4 - k, 4 - l, K, L) - 1;
            const std::size_t jd = block_linear_index(l, k, K, L) - 1;
            EXPECT_NEAR(wpp[j], wmp[jx], 1e-13);
            EXPECT_NEAR(wpp[j], wpm[jy], 1e-13);
            EXPECT_NEAR(wpp[j], wmm[jxy], 1e-13);
            EXPECT_NEAR(wpp[j], wpp[jd], 1e-13);  // point lies on the diagonal
        }
}

TEST(Eval, MatchesOracleBlend) {
    // Full evaluation cross-check: long-double literal weights combined
    // with the fitted local polynomials.
    auto rng = oracles::make_rng(4);
    const CartesianGrid g = oracles::random_grid(rng, 9, 8);
    const ShepardModel model = build_model(g, 2, 1, 3.0);
    std::uniform_real_distribution<double> pt(0, 1);
    int used = 0;
    while (used < 100) {
        const double x = pt(rng), y = pt(rng);
        if (model.nearest_node(x, y).distance < 1e-4)
            continue;
        ++used;
        const std::vector<long double> w = oracles::literal_weights(model, x, y);
        long double expected = 0;
        for (std::size_t j = 0; j < w.size(); ++j)
            expected += w[j] * static_cast<long double>(eval(model.poly(j + 1), x, y));
        const double got = model.eval(x, y);
        EXPECT_NEAR(got, static_cast<double>(expected),
                    1e-11 * (1 + std::fabs(static_cast<double>(expected))));
    }
}

TEST(Eval, ReproducesTensorPolynomials) {
    auto rng = oracles::make_rng(5);
    for (const auto [r, s] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 2}, {2, 3}}) {
        const oracles::TensorPoly q = oracles::random_tensor_poly(rng, r, s);
        std::vector<double> xs = oracles::random_axis(rng, 9, 0, 1);
        std::vector<double> ys = oracles::random_axis(rng, 10, 0, 1);
        const CartesianGrid g = oracles::grid_from_function(q, std::move(xs), std::move(ys));
        const ShepardModel model = build_model(g, r, s, 2.0);
        double sup_err = 0, sup_q = 0;
        for (int i = 0; i <= 40; ++i)
            for (int j = 0; j <= 40; ++j) {
                const double x = i / 40.0, y = j / 40.0;
                sup_err = std::max(sup_err, std::fabs(model.eval(x, y) - q(x, y)));
                sup_q = std::max(sup_q, std::fabs(q(x, y)));
            }
        EXPECT_LE(sup_err, 1e-9 * (1 + sup_q));
    }
}

TEST(EvalPruned, MatchesFullEvaluation) {
    auto rng = oracles::make_rng(6);
    const CartesianGrid g = oracles::random_grid(rng, 17, 15);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    std::uniform_real_distribution<double> pt(-0.05, 1.05);
    for (int i = 0; i < 200; ++i) {
        const double x = pt(rng), y = pt(rng);
        const double full = model.eval(x, y);
        const double pruned = model.eval_pruned(x, y);
        EXPECT_NEAR(pruned, full, 1e-12 * (1 + std::fabs(full)));
    }
}

TEST(EvalGrid, MatchesPointwiseAndIsThreadInvariant) {
    const CartesianGrid g = uniform_franke_grid(9, 9);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    std::vector<double> xs, ys;
    for (int i = 0; i < 23; ++i)
        xs.push_back(0.02 + i * 0.042);
    for (int i = 0; i < 17; ++i)
        ys.push_back(0.03 + i * 0.055);
    const std::vector<double> serial = model.eval_grid(xs, ys);
    ASSERT_EQ(serial.size(), xs.size() * ys.size());
    for (std::size_t row = 0; row < ys.size(); ++row)
        for (std::size_t col = 0; col < xs.size(); ++col)
            EXPECT_EQ(serial[row * xs.size() + col], model.eval(xs[col], ys[row]));

    ::setenv("GRIDSHEP_THREADS", "3", 1);
    const std::vector<double> threaded = model.eval_grid(xs, ys);
    ::unsetenv("GRIDSHEP_THREADS");
    EXPECT_EQ(serial, threaded);

    EXPECT_THROW(model.eval_grid(std::vector<double>{0.1, std::nan("")}, ys), InvalidInput);
}

TEST(NearestNode, BinarySearchAndTieBreak) {
    // Both axes are 0, .25, .5, .75, 1 — exact binary fractions, so the
    // equidistance cases below are exact ties rather than fp near-misses.
    const CartesianGrid g = uniform_franke_grid(5, 5);
    const ShepardModel model = build_model(g, 2, 2, 2.0);
    const NearestNode a = model.nearest_node(0.26, 0.05);
    EXPECT_EQ(a.index, flatten_index(1, 2, 5));
    EXPECT_NEAR(a.distance, std::hypot(0.01, 0.05), 1e-15);
    // Outside the hull the nearest node is on the boundary.
    EXPECT_EQ(model.nearest_node(-1.0, -1.0).index, flatten_index(1, 1, 5));
    EXPECT_EQ(model.nearest_node(2.0, 2.0).index, flatten_index(5, 5, 5));
    // Equidistant between x-neighbors: the lower linear index wins.
    EXPECT_EQ(model.nearest_node(0.125, 0.0).index, flatten_index(1, 1, 5));
    // Equidistant between y-neighbors (same column): lower nu wins.
    EXPECT_EQ(model.nearest_node(0.0, 0.375).index, flatten_index(2, 1, 5));
    // Center of a cell: all four corners tie, lowest linear index wins.
    EXPECT_EQ(model.nearest_node(0.375, 0.375).index, flatten_index(2, 2, 5));
}

TEST(Eval, FiniteOutsideHull) {
    const CartesianGrid g = uniform_franke_grid(7, 7);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    EXPECT_TRUE(std::isfinite(model.eval(-0.3, 0.4)));
    EXPECT_TRUE(std::isfinite(model.eval(1.7, 1.9)));
    EXPECT_TRUE(std::isfinite(model.eval_pruned(1.7, 1.9)));
}

TEST(Weights, LargestWeightNearBlockBarycenter) {
    const CartesianGrid g = uniform_franke_grid(13, 13);
    const ShepardModel model = build_model(g, 2, 2, 4.0);
    const Block& b = model.covering().block(1, 1);
    const WeightVector w = model.weights(b.barycenter_x + 0.013, b.barycenter_y + 0.017);
    std::size_t argmax = 0;
    for (std::size_t j = 1; j < w.size(); ++j)
        if (w[j] > w[argmax])
            argmax = j;
    EXPECT_EQ(argmax, 0u);
}

TEST(ModelAccessors, NodeValuesAndCoords) {
    const CartesianGrid g = uniform_franke_grid(6, 5);
    const ShepardModel model = build_model(g, 1, 1, 2.0);
    EXPECT_EQ(model.m(), 6u);
    EXPECT_EQ(model.n(), 5u);
    EXPECT_EQ(model.node_value(2, 3), g.z(2, 3));
    EXPECT_THROW(model.node_value(6, 1), IndexOutOfRange);
    EXPECT_EQ(model.x_coords()[1], g.x(2));
    EXPECT_EQ(model.y_coords()[4], g.y(5));
    EXPECT_DOUBLE_EQ(model.u(), 2.0);
}
