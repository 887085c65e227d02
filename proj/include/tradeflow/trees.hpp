#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "tradeflow/common.hpp"
#include "tradeflow/rng.hpp"

namespace tradeflow::trees {

using Matrix = std::vector<std::vector<double>>; // row-major feature matrix

struct BoostConfig {
    double learning_rate = 0.01;
    double feature_fraction = 0.6;
    int max_depth = 8;
    int num_leaves = 255;
    int early_stopping_rounds = 500;
    int max_rounds = 2000;
    double validation_fraction = 0.2;
    int min_leaf = 5;
    std::uint64_t seed = 0;

    void validate() const {
        require(learning_rate > 0.0 && learning_rate <= 1.0, "learning_rate must lie in (0, 1]");
        require(feature_fraction > 0.0 && feature_fraction <= 1.0,
                "feature_fraction must lie in (0, 1]");
        require(max_depth >= 1, "max_depth must be >= 1");
        require(num_leaves >= 2, "num_leaves must be >= 2");
        require(min_leaf >= 1, "min_leaf must be >= 1");
        require(max_rounds >= 1, "max_rounds must be >= 1");
        require(validation_fraction >= 0.0 && validation_fraction < 1.0,
                "validation_fraction must lie in [0, 1)");
    }
};

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf prediction (mean residual of its rows)
    double sse = 0.0;   // residual SSE of the rows reaching this node
    int rows = 0;
    double gain = 0.0;  // split gain; 0 for leaves

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root

    double predict_row(const std::vector<double>& x) const {
        int i = 0;
        while (!nodes[i].is_leaf()) {
            i = (x[nodes[i].feature] <= nodes[i].threshold) ? nodes[i].left : nodes[i].right;
        }
        return nodes[i].value;
    }

    int leaf_count() const {
        int leaves = 0;
        for (const auto& n : nodes) leaves += n.is_leaf() ? 1 : 0;
        return leaves;
    }

    int depth() const {
        if (nodes.empty()) return 0;
        std::vector<int> depths(nodes.size(), 0);
        int max_depth = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!nodes[i].is_leaf()) {
                depths[nodes[i].left] = depths[i] + 1;
                depths[nodes[i].right] = depths[i] + 1;
            } else {
                max_depth = std::max(max_depth, depths[i]);
            }
        }
        return max_depth;
    }

    /// Training-SSE reduction achieved by this tree's splits: root SSE minus
    /// the summed leaf SSEs.
    double sse_reduction() const {
        if (nodes.empty()) return 0.0;
        double leaf_sse = 0.0;
        for (const auto& n : nodes) {
            if (n.is_leaf()) leaf_sse += n.sse;
        }
        return nodes[0].sse - leaf_sse;
    }

    bool is_stump() const { return nodes.size() == 1; }
};

namespace detail {

// Pure-node floor: residual spreads below this are numeric dust, not signal.
inline constexpr double kMinSse = 1e-12;

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    double left_sse = 0.0, right_sse = 0.0;
    double left_mean = 0.0, right_mean = 0.0;
    int left_rows = 0, right_rows = 0;
};

/// Greedy variance-reduction search over the candidate features for one
/// node's rows. Ties break toward the lower feature index, then the lower
/// threshold.
inline SplitChoice best_split(const Matrix& rows, const std::vector<double>& residuals,
                              const std::vector<std::size_t>& node_rows,
                              const std::vector<std::size_t>& features, int min_leaf,
                              double node_sse) {
    SplitChoice best;
    const std::size_t n = node_rows.size();
    if (n < static_cast<std::size_t>(2 * min_leaf) || node_sse <= kMinSse) return best;

    std::vector<std::pair<double, double>> ordered(n); // (feature value, residual)
    for (std::size_t feature : features) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = node_rows[i];
            ordered[i] = {rows[r][feature], residuals[r]};
        }
        std::sort(ordered.begin(), ordered.end());

        double left_sum = 0.0, left_sq = 0.0;
        double total_sum = 0.0, total_sq = 0.0;
        for (const auto& [x, r] : ordered) {
            total_sum += r;
            total_sq += r * r;
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += ordered[i].second;
            left_sq += ordered[i].second * ordered[i].second;
            if (ordered[i].first == ordered[i + 1].first) continue; // no cut between ties
            const std::size_t n_left = i + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < static_cast<std::size_t>(min_leaf) ||
                n_right < static_cast<std::size_t>(min_leaf)) {
                continue;
            }
            const double right_sum = total_sum - left_sum;
            const double right_sq = total_sq - left_sq;
            const double left_sse =
                std::max(left_sq - left_sum * left_sum / static_cast<double>(n_left), 0.0);
            const double right_sse =
                std::max(right_sq - right_sum * right_sum / static_cast<double>(n_right), 0.0);
            const double gain = node_sse - left_sse - right_sse;
            if (gain <= kMinSse) continue;
            const double threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
            const bool better =
                gain > best.gain ||
                (gain == best.gain && (static_cast<int>(feature) < best.feature ||
                                       (static_cast<int>(feature) == best.feature &&
                                        threshold < best.threshold)));
            if (!best.found || better) {
                best.found = true;
                best.feature = static_cast<int>(feature);
                best.threshold = threshold;
                best.gain = gain;
                best.left_sse = left_sse;
                best.right_sse = right_sse;
                best.left_mean = left_sum / static_cast<double>(n_left);
                best.right_mean = right_sum / static_cast<double>(n_right);
                best.left_rows = static_cast<int>(n_left);
                best.right_rows = static_cast<int>(n_right);
            }
        }
    }
    return best;
}

inline double mean_of(const std::vector<double>& residuals, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += residuals[i];
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

inline double sse_of(const std::vector<double>& residuals, const std::vector<std::size_t>& idx,
                     double mean) {
    double s = 0.0;
    for (std::size_t i : idx) {
        const double d = residuals[i] - mean;
        s += d * d;
    }
    return s;
}

} // namespace detail

/// Fits one regression tree to the residuals. Growth is leaf-wise: the
/// pending split with the largest gain is materialized first, until gains
/// vanish or the leaf budget / depth limit binds. Each tree sees a seeded
/// random subset of ceil(feature_fraction * F) features.
inline RegressionTree fit_tree(const Matrix& rows, const std::vector<double>& residuals,
                               const BoostConfig& config, Rng* rng = nullptr) {
    config.validate();
    require(!rows.empty(), "fit_tree needs at least one row");
    require(rows.size() == residuals.size(), "rows and residuals must align");
    const std::size_t n_features = rows.front().size();

    Rng local_rng(config.seed);
    Rng& r = rng ? *rng : local_rng;
    std::vector<std::size_t> features;
    if (config.feature_fraction >= 1.0 || n_features == 0) {
        features.resize(n_features);
        std::iota(features.begin(), features.end(), std::size_t{0});
    } else {
        const auto take = static_cast<std::size_t>(
            std::ceil(config.feature_fraction * static_cast<double>(n_features)));
        features = r.pick(n_features, std::max<std::size_t>(take, 1));
    }

    RegressionTree tree;
    std::vector<std::size_t> all_rows(rows.size());
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    const double root_mean = detail::mean_of(residuals, all_rows);
    TreeNode root;
    root.value = root_mean;
    root.rows = static_cast<int>(all_rows.size());
    root.sse = detail::sse_of(residuals, all_rows, root_mean);
    tree.nodes.push_back(root);

    struct Pending {
        int node = 0;
        int depth = 0;
        std::vector<std::size_t> row_idx;
        detail::SplitChoice split;
    };
    std::vector<Pending> frontier;

    auto propose = [&](int node, int depth, std::vector<std::size_t>&& idx) {
        if (depth >= config.max_depth) return;
        detail::SplitChoice split = detail::best_split(rows, residuals, idx, features,
                                                       config.min_leaf, tree.nodes[node].sse);
        if (split.found) frontier.push_back({node, depth, std::move(idx), std::move(split)});
    };
    propose(0, 0, std::move(all_rows));

    int leaves = 1;
    while (!frontier.empty() && leaves < config.num_leaves) {
        // Deterministic leaf-wise order: highest gain, then oldest node.
        std::size_t pick = 0;
        for (std::size_t i = 1; i < frontier.size(); ++i) {
            if (frontier[i].split.gain > frontier[pick].split.gain ||
                (frontier[i].split.gain == frontier[pick].split.gain &&
                 frontier[i].node < frontier[pick].node)) {
                pick = i;
            }
        }
        Pending p = std::move(frontier[pick]);
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(pick));

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(static_cast<std::size_t>(p.split.left_rows));
        right_idx.reserve(static_cast<std::size_t>(p.split.right_rows));
        for (std::size_t i : p.row_idx) {
            (rows[i][p.split.feature] <= p.split.threshold ? left_idx : right_idx).push_back(i);
        }

        TreeNode& parent = tree.nodes[p.node];
        parent.feature = p.split.feature;
        parent.threshold = p.split.threshold;
        parent.gain = p.split.gain;
        parent.left = static_cast<int>(tree.nodes.size());
        parent.right = parent.left + 1;

        TreeNode left, right;
        left.value = p.split.left_mean;
        left.rows = p.split.left_rows;
        left.sse = p.split.left_sse;
        right.value = p.split.right_mean;
        right.rows = p.split.right_rows;
        right.sse = p.split.right_sse;
        tree.nodes.push_back(left);
        tree.nodes.push_back(right);
        ++leaves;

        const int left_id = tree.nodes[p.node].left;
        const int right_id = tree.nodes[p.node].right;
        propose(left_id, p.depth + 1, std::move(left_idx));
        propose(right_id, p.depth + 1, std::move(right_idx));
    }
    return tree;
}

struct FeatureImportance {
    long split_count = 0;
    double total_gain = 0.0;
};

struct BoostedModel {
    double base_prediction = 0.0;           // training-target mean
    double learning_rate = 0.01;
    std::vector<RegressionTree> trees;      // the kept trees (up to best_round)
    std::vector<FeatureImportance> importances;
    int best_round = 0;                     // number of kept trees
    bool degenerate = false;                // true when no tree improved validation
    std::size_t n_features = 0;
    std::vector<std::string> feature_names;
    BoostConfig config;

    // Fit diagnostics.
    std::vector<double> train_rmse_history;       // per fitted round
    std::vector<double> validation_rmse_history;  // index 0 = base-only model
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
    std::vector<double> final_train_predictions;  // on train_indices, at best_round

    double total_sse_reduction() const {
        double total = 0.0;
        for (const auto& t : trees) total += t.sse_reduction();
        return total;
    }
};

namespace detail {

inline double rmse(const std::vector<double>& predictions, const std::vector<double>& targets) {
    if (predictions.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - targets[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(predictions.size()));
}

} // namespace detail

/// Boosted squared-error fit: trees are trained sequentially on the current
/// residuals, a seeded shuffle holds out validation_fraction rows, and the
/// model is cut back to the round with the best validation RMSE once no
/// improvement arrives for early_stopping_rounds.
inline BoostedModel fit_boosted(const Matrix& rows, const std::vector<double>& targets,
                                const BoostConfig& config,
                                std::vector<std::string> feature_names = {}) {
    config.validate();
    require(rows.size() >= 10, "fit_boosted needs at least 10 rows");
    require(rows.size() == targets.size(), "rows and targets must align");
    for (double y : targets) require(std::isfinite(y), "targets must be finite");

    BoostedModel model;
    model.learning_rate = config.learning_rate;
    model.n_features = rows.front().size();
    model.feature_names = std::move(feature_names);
    model.config = config;

    Rng rng(config.seed);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    std::size_t n_val = static_cast<std::size_t>(
        std::llround(config.validation_fraction * static_cast<double>(rows.size())));
    n_val = std::min(n_val, rows.size() - 1);
    model.validation_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    model.train_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(model.validation_indices.begin(), model.validation_indices.end());
    std::sort(model.train_indices.begin(), model.train_indices.end());

    Matrix train_rows, val_rows;
    std::vector<double> train_y, val_y;
    for (std::size_t i : model.train_indices) {
        train_rows.push_back(rows[i]);
        train_y.push_back(targets[i]);
    }
    for (std::size_t i : model.validation_indices) {
        val_rows.push_back(rows[i]);
        val_y.push_back(targets[i]);
    }

    model.base_prediction =
        std::accumulate(train_y.begin(), train_y.end(), 0.0) / static_cast<double>(train_y.size());

    double target_var = 0.0;
    for (double y : train_y) {
        target_var += (y - model.base_prediction) * (y - model.base_prediction);
    }
    if (target_var <= detail::kMinSse) {
        // Constant target: nothing to boost.
        model.degenerate = true;
        model.final_train_predictions.assign(train_y.size(), model.base_prediction);
        model.validation_rmse_history.push_back(
            detail::rmse(std::vector<double>(val_y.size(), model.base_prediction), val_y));
        model.importances.assign(model.n_features, {});
        return model;
    }

    std::vector<double> train_pred(train_y.size(), model.base_prediction);
    std::vector<double> val_pred(val_y.size(), model.base_prediction);
    std::vector<double> residuals(train_y.size(), 0.0);

    const bool track_validation = !val_y.empty();
    double best_val = track_validation ? detail::rmse(val_pred, val_y)
                                       : std::numeric_limits<double>::max();
    model.validation_rmse_history.push_back(track_validation ? best_val : 0.0);
    int best_round = 0;
    std::vector<double> best_train_pred = train_pred;

    std::vector<RegressionTree> all_trees;
    for (int round = 1; round <= config.max_rounds; ++round) {
        for (std::size_t i = 0; i < train_y.size(); ++i) residuals[i] = train_y[i] - train_pred[i];
        RegressionTree tree = fit_tree(train_rows, residuals, config, &rng);
        if (tree.is_stump() && std::abs(tree.nodes[0].value) < 1e-12) break; // residuals exhausted

        for (std::size_t i = 0; i < train_pred.size(); ++i) {
            train_pred[i] += config.learning_rate * tree.predict_row(train_rows[i]);
        }
        for (std::size_t i = 0; i < val_pred.size(); ++i) {
            val_pred[i] += config.learning_rate * tree.predict_row(val_rows[i]);
        }
        all_trees.push_back(std::move(tree));
        model.train_rmse_history.push_back(detail::rmse(train_pred, train_y));

        if (track_validation) {
            const double val_rmse = detail::rmse(val_pred, val_y);
            model.validation_rmse_history.push_back(val_rmse);
            if (val_rmse < best_val) {
                best_val = val_rmse;
                best_round = round;
                best_train_pred = train_pred;
            }
            if (round - best_round >= config.early_stopping_rounds) break;
        } else {
            best_round = round;
            best_train_pred = train_pred;
        }
    }

    model.best_round = best_round;
    model.degenerate = best_round == 0;
    model.trees.assign(all_trees.begin(), all_trees.begin() + best_round);
    model.final_train_predictions = std::move(best_train_pred);

    model.importances.assign(model.n_features, {});
    for (const auto& tree : model.trees) {
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) {
                ++model.importances[static_cast<std::size_t>(node.feature)].split_count;
                model.importances[static_cast<std::size_t>(node.feature)].total_gain += node.gain;
            }
        }
    }
    return model;
}

/// base + lr * sum of kept tree outputs, per row.
inline std::vector<double> predict(const BoostedModel& model, const Matrix& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        require(row.size() == model.n_features,
                "feature count mismatch: model expects " + std::to_string(model.n_features) +
                    ", row has " + std::to_string(row.size()));
        double p = model.base_prediction;
        for (const auto& tree : model.trees) {
            p += model.learning_rate * tree.predict_row(row);
        }
        out.push_back(p);
    }
    return out;
}

/// Coefficient of determination, 1 - SS_res / SS_tot.
inline double r_squared(const std::vector<double>& predicted, const std::vector<double>& actual) {
    require(predicted.size() == actual.size(), "prediction/actual length mismatch");
    require(actual.size() >= 2, "r_squared needs at least 2 observations");
    const double mean =
        std::accumulate(actual.begin(), actual.end(), 0.0) / static_cast<double>(actual.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    }
    require(ss_tot > 0.0, "r_squared undefined for zero-variance actuals");
    return 1.0 - ss_res / ss_tot;
}

struct RankedFeature {
    std::size_t feature = 0;
    long split_count = 0;
    double total_gain = 0.0;
};

/// Features ranked by split count (gain breaks ties, then the index).
inline std::vector<RankedFeature> feature_importance(const BoostedModel& model) {
    std::vector<RankedFeature> out;
    for (std::size_t f = 0; f < model.importances.size(); ++f) {
        out.push_back({f, model.importances[f].split_count, model.importances[f].total_gain});
    }
    std::sort(out.begin(), out.end(), [](const RankedFeature& a, const RankedFeature& b) {
        if (a.split_count != b.split_count) return a.split_count > b.split_count;
        if (a.total_gain != b.total_gain) return a.total_gain > b.total_gain;
        return a.feature < b.feature;
    });
    return out;
}

} // namespace tradeflow::trees
