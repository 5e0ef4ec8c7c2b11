/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include <illusion/classifiers.hpp>

#include <illusion/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

namespace illusion::classifiers {

namespace {

struct GrowNode {
    std::int64_t zeros = 0;
    std::int64_t ones = 0;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double score = 0.0;

    bool is_leaf() const { return feature == -1; }
    std::int64_t total() const { return zeros + ones; }
    /// Training misclassifications if this node predicted its majority.
    std::int64_t misses_as_leaf() const { return std::min(zeros, ones); }
};

/// Node ids reachable from the root, in depth-first preorder.
std::vector<int> preorder_ids(const std::vector<GrowNode>& nodes) {
    std::vector<int> order;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        order.push_back(id);
        const GrowNode& node = nodes[static_cast<std::size_t>(id)];
        if (!node.is_leaf()) {
            stack.push_back(node.right);
            stack.push_back(node.left);
        }
    }
    return order;
}

/// Rebuilds `nodes` so that reachable nodes appear in preorder, root first.
std::vector<GrowNode> compact_preorder(const std::vector<GrowNode>& nodes) {
    const std::vector<int> order = preorder_ids(nodes);
    std::vector<int> new_id(nodes.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
        new_id[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }
    std::vector<GrowNode> result;
    result.reserve(order.size());
    for (int old : order) {
        GrowNode node = nodes[static_cast<std::size_t>(old)];
        if (!node.is_leaf()) {
            node.left = new_id[static_cast<std::size_t>(node.left)];
            node.right = new_id[static_cast<std::size_t>(node.right)];
        }
        result.push_back(node);
    }
    return result;
}

struct SubtreeStats {
    std::int64_t leaf_misses = 0;
    int leaves = 0;
};

SubtreeStats subtree_stats(const std::vector<GrowNode>& nodes, int root) {
    SubtreeStats stats;
    std::vector<int> stack{root};
    while (!stack.empty()) {
        const GrowNode& node = nodes[static_cast<std::size_t>(stack.back())];
        stack.pop_back();
        if (node.is_leaf()) {
            stats.leaf_misses += node.misses_as_leaf();
            stats.leaves += 1;
        } else {
            stack.push_back(node.right);
            stack.push_back(node.left);
        }
    }
    return stats;
}

} // namespace

ClassifierModel fit_tree(const Dataset& data, const FitConfig& cfg) {
    data.validate();
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw PreconditionError("the tree needs both classes in the design data");
    }
    if (cfg.max_leaves < 1) {
        throw PreconditionError("leaf budget must be at least 1");
    }
    if (cfg.min_leaf < 1) {
        throw PreconditionError("minimum leaf size must be at least 1");
    }

    const Eigen::Index p = data.cols();

    // ------------------------------------------------------------------
    // Growing
    // ------------------------------------------------------------------
    std::vector<GrowNode> nodes;
    std::vector<std::pair<int, std::vector<Eigen::Index>>> work;
    {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(data.rows()));
        std::iota(all.begin(), all.end(), Eigen::Index{0});
        nodes.emplace_back();
        work.emplace_back(0, std::move(all));
    }
    std::vector<std::pair<double, int>> ordered;

    while (!work.empty()) {
        const int id = work.back().first;
        const std::vector<Eigen::Index> rows = std::move(work.back().second);
        work.pop_back();

        const std::int64_t m = static_cast<std::int64_t>(rows.size());
        std::int64_t ones = 0;
        for (Eigen::Index row : rows) {
            ones += data.labels[static_cast<std::size_t>(row)];
        }
        const std::int64_t zeros = m - ones;
        nodes[static_cast<std::size_t>(id)].zeros = zeros;
        nodes[static_cast<std::size_t>(id)].ones = ones;
        nodes[static_cast<std::size_t>(id)].score =
            static_cast<double>(ones) / static_cast<double>(m);

        if (zeros == 0 || ones == 0 || m < 2 * static_cast<std::int64_t>(cfg.min_leaf)) {
            continue; // stays a leaf
        }

        // Largest sum of squared class counts over both children; maximizing
        // it is the same as maximizing the impurity decrease. Candidates are
        // midpoints between consecutive distinct sorted values with at least
        // min_leaf rows on each side. Scanning features and thresholds in
        // ascending order with a strict improvement test resolves ties toward
        // the lowest feature, then the lowest threshold.
        const double parent_metric =
            static_cast<double>(zeros * zeros + ones * ones) / static_cast<double>(m);
        double best_sum = -std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;

        ordered.resize(rows.size());
        for (int feature = 0; feature < p; ++feature) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                ordered[i] = {data.features(rows[i], feature),
                              data.labels[static_cast<std::size_t>(rows[i])]};
            }
            std::sort(ordered.begin(), ordered.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::int64_t left_ones = 0;
            for (std::int64_t b = 1; b <= m - cfg.min_leaf; ++b) {
                left_ones += ordered[static_cast<std::size_t>(b - 1)].second;
                if (b < cfg.min_leaf) {
                    continue;
                }
                const double low = ordered[static_cast<std::size_t>(b - 1)].first;
                const double high = ordered[static_cast<std::size_t>(b)].first;
                if (!(low < high)) {
                    continue;
                }
                const std::int64_t left_zeros = b - left_ones;
                const std::int64_t right_ones = ones - left_ones;
                const std::int64_t right_zeros = zeros - left_zeros;
                const double child_sum =
                    static_cast<double>(left_zeros * left_zeros + left_ones * left_ones) /
                        static_cast<double>(b) +
                    static_cast<double>(right_zeros * right_zeros + right_ones * right_ones) /
                        static_cast<double>(m - b);
                if (child_sum > best_sum) {
                    best_sum = child_sum;
                    best_feature = feature;
                    best_threshold = (low + high) / 2.0;
                }
            }
        }

        // Only strictly positive impurity decreases split; the margin guards
        // against rounding presenting an exactly-neutral split as positive.
        if (best_feature < 0 ||
            (best_sum - parent_metric) / static_cast<double>(m) <= 1e-12) {
            continue;
        }

        std::vector<Eigen::Index> left_rows;
        std::vector<Eigen::Index> right_rows;
        for (Eigen::Index row : rows) {
            (data.features(row, best_feature) < best_threshold ? left_rows : right_rows)
                .push_back(row);
        }

        const int left_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const int right_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[static_cast<std::size_t>(id)].feature = best_feature;
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        nodes[static_cast<std::size_t>(id)].left = left_id;
        nodes[static_cast<std::size_t>(id)].right = right_id;
        // Right pushed first so the left subtree is processed (and numbered)
        // first, giving a deterministic construction order.
        work.emplace_back(right_id, std::move(right_rows));
        work.emplace_back(left_id, std::move(left_rows));
    }

    nodes = compact_preorder(nodes);

    // ------------------------------------------------------------------
    // Pruning: repeatedly collapse the split whose removal costs the fewest
    // extra training misclassifications, considering only splits with two
    // leaf children so each step removes exactly one leaf. Ties collapse the
    // smallest node id; preorder numbering makes that outermost-first.
    // ------------------------------------------------------------------
    const int grown_leaves = subtree_stats(nodes, 0).leaves;
    const int target = std::min(cfg.max_leaves, grown_leaves);

    int current_leaves = grown_leaves;
    while (current_leaves > target) {
        std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
        int best_id = -1;
        for (int id : preorder_ids(nodes)) {
            const GrowNode& node = nodes[static_cast<std::size_t>(id)];
            if (node.is_leaf()) {
                continue;
            }
            const GrowNode& left = nodes[static_cast<std::size_t>(node.left)];
            const GrowNode& right = nodes[static_cast<std::size_t>(node.right)];
            if (!left.is_leaf() || !right.is_leaf()) {
                continue;
            }
            const std::int64_t cost =
                node.misses_as_leaf() - left.misses_as_leaf() - right.misses_as_leaf();
            if (cost < best_cost || (cost == best_cost && id < best_id)) {
                best_cost = cost;
                best_id = id;
            }
        }
        if (best_id < 0) {
            break; // no collapsible split left; cannot happen above one leaf
        }
        GrowNode& collapsed = nodes[static_cast<std::size_t>(best_id)];
        collapsed.feature = -1;
        collapsed.left = -1;
        collapsed.right = -1;
        current_leaves -= 1;
    }

    nodes = compact_preorder(nodes);

    TreeParams params;
    params.nodes.reserve(nodes.size());
    for (const GrowNode& node : nodes) {
        TreeNode out;
        out.feature = node.feature;
        out.threshold = node.threshold;
        out.left = node.left;
        out.right = node.right;
        out.score = node.score;
        params.nodes.push_back(out);
        if (node.is_leaf()) {
            params.leaf_count += 1;
        }
    }
    return ClassifierModel(ModelKind::tree, p, std::move(params));
}

} // namespace illusion::classifiers
