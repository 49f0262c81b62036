#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gridshep/errors.hpp"
#include "gridshep/grid.hpp"
#include "gridshep/parallel.hpp"
#include "gridshep/tensor_poly.hpp"

// Blended interpolant over the block covering: each block carries one local
// tensor-product polynomial, weighted by the product of inverse powers of
// the distances to all of its nodes,
//
//   MS_u(x, y) = sum_j W_j(x, y) p_j(x, y),
//   W_j = prod_i ||(x,y) - node_{j,i}||^-u / sum_l prod_i ||(x,y) - node_{l,i}||^-u.
//
// Weight products are evaluated in the log domain with the minimum log-sum
// subtracted before exponentiating; a literal product of t distance powers
// underflows already on mid-sized grids. The stabilized form is algebraically
// identical. At a grid node the ratio is 0/0 with limit equal to the stored
// value, so evaluation within kNodeHitRel * l_max of a node returns that
// node's value directly.

namespace gridshep {

/// Weights of all blocks at one point, in block_index_map order.
using WeightVector = std::vector<double>;

struct NearestNode {
    std::size_t index = 0;  ///< flattened 1-based node index
    double distance = 0;
};

/// u must exceed (3+r+s)/t for the convergence guarantee; smaller values
/// still evaluate, callers are expected to warn.
inline double order_threshold(std::size_t r, std::size_t s) {
    return static_cast<double>(3 + r + s) / static_cast<double>((r + 1) * (s + 1));
}

class ShepardModel {
public:
    /// Node-hit tolerance relative to the largest block side.
    static constexpr double kNodeHitRel = 1e-12;
    /// Pruned evaluation drops blocks provably below this fraction of the
    /// dominant weight.
    static constexpr double kPruneRatio = 1e-16;

    /// Reusable per-thread evaluation buffers.
    struct EvalScratch {
        std::vector<double> dx2, dy2, node_log, log_sums;
    };

    std::size_t m() const { return xs_.size(); }
    std::size_t n() const { return ys_.size(); }
    const std::vector<double>& x_coords() const { return xs_; }
    const std::vector<double>& y_coords() const { return ys_; }
    const BlockCovering& covering() const { return cov_; }
    const LocalPolynomial& poly(std::size_t j) const {
        if (j < 1 || j > polys_.size())
            throw IndexOutOfRange("polynomial index " + std::to_string(j) + " out of range");
        return polys_[j - 1];
    }
    double u() const { return u_; }
    double l_max() const { return l_max_; }
    double node_value(std::size_t nu, std::size_t mu) const {
        if (nu < 1 || nu > n() || mu < 1 || mu > m())
            throw IndexOutOfRange("node (" + std::to_string(nu) + "," + std::to_string(mu) +
                                  ") out of range");
        return z_[(nu - 1) * m() + (mu - 1)];
    }

    /// Closest grid node by Euclidean distance; ties resolved toward the
    /// lowest flattened index. Binary search on each axis, then the at most
    /// four surrounding candidates.
    NearestNode nearest_node(double x, double y) const {
        const auto cand = [](const std::vector<double>& c, double v, std::size_t out[2]) {
            const auto it = std::lower_bound(c.begin(), c.end(), v);
            const std::size_t hi = static_cast<std::size_t>(it - c.begin());
            out[0] = hi == 0 ? 0 : hi - 1;
            out[1] = std::min(hi, c.size() - 1);
        };
        std::size_t cx[2], cy[2];
        cand(xs_, x, cx);
        cand(ys_, y, cy);
        NearestNode best;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < 2; ++a) {
            if (a == 1 && cx[1] == cx[0])
                continue;
            for (std::size_t b = 0; b < 2; ++b) {
                if (b == 1 && cy[1] == cy[0])
                    continue;
                const double dx = x - xs_[cx[a]];
                const double dy = y - ys_[cy[b]];
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best.index = flatten_index(cy[b] + 1, cx[a] + 1, n());
                }
            }
        }
        best.distance = std::sqrt(best_d2);
        return best;
    }

    /// Normalized block weights at a non-node point.
    WeightVector weights(double x, double y) const {
        EvalScratch scratch;
        return weights(x, y, scratch);
    }

    WeightVector weights(double x, double y, EvalScratch& scratch) const {
        if (nearest_node(x, y).distance < node_eps_)
            throw NodeCoincidence("weights undefined within node-hit tolerance of a grid node");
        log_distance_sums(x, y, scratch);
        const std::vector<double>& S = scratch.log_sums;
        const double s_min = *std::min_element(S.begin(), S.end());
        WeightVector w(S.size());
        double den = 0;
        for (std::size_t j = 0; j < S.size(); ++j) {
            w[j] = std::exp(-u_ * (S[j] - s_min));
            den += w[j];
        }
        for (double& v : w)
            v /= den;
        return w;
    }

    /// Interpolant value; exact stored value at (near) grid nodes.
    double eval(double x, double y) const {
        EvalScratch scratch;
        return eval(x, y, scratch);
    }

    double eval(double x, double y, EvalScratch& scratch) const {
        const NearestNode hit = nearest_node(x, y);
        if (hit.distance < node_eps_)
            return node_value_by_linear(hit.index);
        log_distance_sums(x, y, scratch);
        return blend(x, y, scratch.log_sums);
    }

    /// Evaluation that skips blocks whose weight is provably below
    /// kPruneRatio of the dominant one, using a bounding-box distance
    /// lower bound per block. Off the default path.
    double eval_pruned(double x, double y) const {
        EvalScratch scratch;
        return eval_pruned(x, y, scratch);
    }

    double eval_pruned(double x, double y, EvalScratch& scratch) const {
        const NearestNode hit = nearest_node(x, y);
        if (hit.distance < node_eps_)
            return node_value_by_linear(hit.index);

        const double s_ref = reference_log_sum(x, y);
        const double cutoff = -std::log(kPruneRatio) / u_;  // prune when S_low - s_ref > cutoff
        const std::size_t t = cov_.t;
        double num = 0, den = 0;
        double s_min = std::numeric_limits<double>::infinity();
        std::vector<double>& S = scratch.log_sums;
        S.clear();
        std::vector<std::size_t> kept;
        for (std::size_t j = 1; j <= cov_.blocks.size(); ++j) {
            const Block& b = cov_.blocks[j - 1];
            const double d2 = bbox_distance2(b, x, y);
            if (d2 > 0) {
                const double s_low = 0.5 * static_cast<double>(t) * std::log(d2);
                if (s_low - s_ref > cutoff)
                    continue;
            }
            const double s = block_log_sum(b, x, y);
            S.push_back(s);
            kept.push_back(j);
            s_min = std::min(s_min, s);
        }
        for (std::size_t i = 0; i < kept.size(); ++i) {
            const double w = std::exp(-u_ * (S[i] - s_min));
            if (w == 0)
                continue;
            num += w * gridshep::eval(polys_[kept[i] - 1], x, y);
            den += w;
        }
        return num / den;
    }

    /// Batch evaluation: result[row][col] = eval(xs[col], ys[row]),
    /// row-major, parallelized over rows.
    std::vector<double> eval_grid(std::span<const double> xs, std::span<const double> ys,
                                  bool pruned = false) const {
        for (double v : xs)
            if (!std::isfinite(v))
                throw InvalidInput("eval_grid x coordinates must be finite");
        for (double v : ys)
            if (!std::isfinite(v))
                throw InvalidInput("eval_grid y coordinates must be finite");
        std::vector<double> out(xs.size() * ys.size());
        parallel_for(ys.size(), [&](std::size_t begin, std::size_t end) {
            EvalScratch scratch;
            for (std::size_t row = begin; row < end; ++row)
                for (std::size_t col = 0; col < xs.size(); ++col)
                    out[row * xs.size() + col] =
                        pruned ? eval_pruned(xs[col], ys[row], scratch)
                               : eval(xs[col], ys[row], scratch);
        });
        return out;
    }

private:
    friend ShepardModel build_model(const CartesianGrid& grid, std::size_t r, std::size_t s,
                                    double u);

    double node_value_by_linear(std::size_t idx) const {
        const auto [nu, mu] = unflatten_index(idx, n());
        return z_[(nu - 1) * m() + (mu - 1)];
    }

    // S_j = sum over block nodes of log distance, for every block, via a
    // per-node table of log squared distances (the tensor structure makes
    // the table m + n squares plus m*n logs).
    void log_distance_sums(double x, double y, EvalScratch& sc) const {
        const std::size_t mm = m(), nn = n();
        sc.dx2.resize(mm);
        sc.dy2.resize(nn);
        sc.node_log.resize(mm * nn);
        for (std::size_t i = 0; i < mm; ++i) {
            const double d = x - xs_[i];
            sc.dx2[i] = d * d;
        }
        for (std::size_t j = 0; j < nn; ++j) {
            const double d = y - ys_[j];
            sc.dy2[j] = d * d;
        }
        for (std::size_t j = 0; j < nn; ++j)
            for (std::size_t i = 0; i < mm; ++i)
                sc.node_log[j * mm + i] = std::log(sc.dx2[i] + sc.dy2[j]);
        sc.log_sums.resize(cov_.blocks.size());
        for (std::size_t bi = 0; bi < cov_.blocks.size(); ++bi) {
            const Block& b = cov_.blocks[bi];
            const std::size_t x0 = b.x_start - 1, y0 = b.y_start - 1;
            double acc = 0;
            for (std::size_t dy = 0; dy <= cov_.s; ++dy) {
                const double* row = sc.node_log.data() + (y0 + dy) * mm + x0;
                for (std::size_t dx = 0; dx <= cov_.r; ++dx)
                    acc += row[dx];
            }
            sc.log_sums[bi] = 0.5 * acc;
        }
    }

    double block_log_sum(const Block& b, double x, double y) const {
        double acc = 0;
        for (std::size_t dy = 0; dy <= cov_.s; ++dy) {
            const double yd = y - ys_[b.y_start - 1 + dy];
            for (std::size_t dx = 0; dx <= cov_.r; ++dx) {
                const double xd = x - xs_[b.x_start - 1 + dx];
                acc += std::log(xd * xd + yd * yd);
            }
        }
        return 0.5 * acc;
    }

    double bbox_distance2(const Block& b, double x, double y) const {
        const double x0 = xs_[b.x_start - 1], x1 = xs_[b.x_start - 1 + cov_.r];
        const double y0 = ys_[b.y_start - 1], y1 = ys_[b.y_start - 1 + cov_.s];
        const double dx = std::max({x0 - x, 0.0, x - x1});
        const double dy = std::max({y0 - y, 0.0, y - y1});
        return dx * dx + dy * dy;
    }

    // Exact log sum of the block whose index range encloses the point,
    // used as the pruning reference.
    double reference_log_sum(double x, double y) const {
        const auto pick = [](const std::vector<std::size_t>& starts, std::size_t deg,
                             const std::vector<double>& coords, double v) {
            std::size_t chosen = 0;
            for (std::size_t i = 0; i < starts.size(); ++i) {
                chosen = i;
                if (v <= coords[starts[i] - 1 + deg])
                    break;
            }
            return chosen;
        };
        std::vector<std::size_t> xst(cov_.K), yst(cov_.L);
        for (std::size_t k = 0; k < cov_.K; ++k)
            xst[k] = cov_.blocks[k * cov_.L].x_start;
        for (std::size_t l = 0; l < cov_.L; ++l)
            yst[l] = cov_.blocks[l].y_start;
        const std::size_t k = pick(xst, cov_.r, xs_, x);
        const std::size_t l = pick(yst, cov_.s, ys_, y);
        return block_log_sum(cov_.blocks[k * cov_.L + l], x, y);
    }

    double blend(double x, double y, const std::vector<double>& S) const {
        const double s_min = *std::min_element(S.begin(), S.end());
        double num = 0, den = 0;
        for (std::size_t j = 0; j < S.size(); ++j) {
            const double w = std::exp(-u_ * (S[j] - s_min));
            if (w == 0)
                continue;
            num += w * gridshep::eval(polys_[j], x, y);
            den += w;
        }
        return num / den;
    }

    std::vector<double> xs_, ys_, z_;
    BlockCovering cov_;
    std::vector<LocalPolynomial> polys_;
    double u_ = 0;
    double l_max_ = 0;
    double node_eps_ = 0;
};

/// Build the model: covering plus one fitted local polynomial per block.
inline ShepardModel build_model(const CartesianGrid& grid, std::size_t r, std::size_t s,
                                double u) {
    if (!(u > 0))
        throw InvalidInput("exponent u must be positive");
    ShepardModel model;
    model.xs_ = grid.x_axis().coords();
    model.ys_ = grid.y_axis().coords();
    model.z_ = grid.z_data();
    model.cov_ = build_covering(grid, r, s);
    model.u_ = u;

    const std::size_t m = grid.m();
    model.polys_.reserve(model.cov_.blocks.size());
    std::vector<double> bx(r + 1), by(s + 1), vals((r + 1) * (s + 1));
    double l_max = 0;
    for (const Block& b : model.cov_.blocks) {
        for (std::size_t a = 0; a <= r; ++a)
            bx[a] = model.xs_[b.x_start - 1 + a];
        for (std::size_t c = 0; c <= s; ++c)
            by[c] = model.ys_[b.y_start - 1 + c];
        for (std::size_t c = 0; c <= s; ++c)
            for (std::size_t a = 0; a <= r; ++a)
                vals[c * (r + 1) + a] = model.z_[(b.y_start - 1 + c) * m + (b.x_start - 1 + a)];
        model.polys_.push_back(fit(bx, by, vals));
        l_max = std::max({l_max, bx[r] - bx[0], by[s] - by[0]});
    }
    model.l_max_ = l_max;
    model.node_eps_ = ShepardModel::kNodeHitRel * l_max;
    return model;
}

} // namespace gridshep
