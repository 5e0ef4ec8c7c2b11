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
#pragma once

#include <illusion/dataset.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace illusion::classifiers {

enum class ModelKind { default_rule, one_r, lda, tree, mlp };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Knobs for the fit_* routines. Each routine reads only the fields that
/// concern it and validates those on entry; the struct itself is inert.
struct FitConfig {
    /// one-r: upper bound on the number of value cells per feature (>= 2).
    int bins = 6;
    /// lda: ridge added to the pooled covariance (>= 0). When the matrix is
    /// numerically singular the fit escalates beyond this value on its own.
    double ridge = 0.0;
    /// tree: exact leaf budget after pruning (>= 1) and the smallest row
    /// count allowed in a leaf during growing (>= 1).
    int max_leaves = 8;
    int min_leaf = 5;
    /// mlp: hidden unit count (>= 0; 0 degenerates to the default rule),
    /// full-batch gradient steps (>= 1), step size (> 0), and the seed for
    /// uniform [-0.5, 0.5) weight initialization.
    int hidden_nodes = 3;
    int epochs = 500;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
};

// ============================================================================
// Fitted-model parameter blocks
// ============================================================================

struct DefaultRuleParams {
    int majority_class = 0;
    /// Fraction of class-1 rows in the design data; the constant score.
    double class1_rate = 0.0;
};

struct OneRParams {
    int feature = 0;
    /// Ascending upper edges of the value cells; a value v falls in the first
    /// cell whose edge is >= v, or in the last cell when above every edge.
    std::vector<double> cut_points;
    /// Class-1 training fraction per cell; cut_points.size() + 1 entries.
    std::vector<double> cell_scores;
};

struct LdaParams {
    Eigen::VectorXd weights;
    double bias = 0.0;
    /// Ridge actually applied to the pooled covariance.
    double ridge_used = 0.0;
};

struct TreeNode {
    /// Split feature; -1 marks a leaf.
    int feature = -1;
    double threshold = 0.0;
    /// Child slots in TreeParams::nodes; rows with value < threshold go left.
    int left = -1;
    int right = -1;
    /// Class-1 fraction of the training rows that reached this node.
    double score = 0.0;
};

/// Nodes are stored in depth-first preorder with the root at slot 0.
struct TreeParams {
    std::vector<TreeNode> nodes;
    int leaf_count = 0;
};

struct MlpParams {
    Eigen::MatrixXd hidden_weights;  // H x p
    Eigen::VectorXd hidden_bias;     // H
    Eigen::VectorXd output_weights;  // H
    double output_bias = 0.0;
    /// Per-feature standardization applied before the hidden layer.
    Eigen::VectorXd feature_mean;   // p
    Eigen::VectorXd feature_scale;  // p, strictly positive
    /// Constant score when H == 0 (the class-1 design fraction).
    double fallback_rate = 0.0;
    /// Mean cross-entropy before each gradient step plus one final value.
    /// Training diagnostic only; not part of the serialized model.
    std::vector<double> loss_trace;
};

// ============================================================================
// Fitted model
// ============================================================================

class ClassifierModel {
public:
    using Params =
        std::variant<DefaultRuleParams, OneRParams, LdaParams, TreeParams, MlpParams>;

    /// Validates that `params` matches `kind` and is internally consistent
    /// (dimensions, ranges, tree structure); throws ShapeError or
    /// PreconditionError otherwise.
    ClassifierModel(ModelKind kind, Eigen::Index input_dim, Params params);

    ModelKind kind() const { return kind_; }
    Eigen::Index input_dim() const { return input_dim_; }
    const Params& params() const { return params_; }

    /// Size measure used by complexity sweeps: 1 for default-rule and one-r,
    /// the input dimension for lda, the leaf count for tree, and the hidden
    /// unit count for mlp.
    int complexity() const;

private:
    ModelKind kind_;
    Eigen::Index input_dim_;
    Params params_;
};

/// Class-1 membership scores in [0, 1], one per row. Throws ShapeError when
/// the column count differs from the model's input dimension.
Eigen::VectorXd predict_scores(const ClassifierModel& model, const Eigen::MatrixXd& features);

/// Hard labels from scores: 1 where score/(1 - score) > threshold_odds.
/// Pre: threshold_odds > 0; scores in [0, 1].
std::vector<int> labels_from_scores(const Eigen::VectorXd& scores, double threshold_odds);

/// predict_scores followed by labels_from_scores.
std::vector<int> predict_labels(const ClassifierModel& model,
                                const Eigen::MatrixXd& features,
                                double threshold_odds = 1.0);

// ============================================================================
// Fitting
// ============================================================================
// Common preconditions: the dataset passes validate(); routines other than
// fit_default additionally require both classes present.

/// Constant rule scoring the class-1 design fraction everywhere. An exact
/// 50/50 class split reports class 0 as the majority.
ClassifierModel fit_default(const Dataset& data);

/// Single-feature cell rule. Each feature is cut into at most cfg.bins
/// equal-frequency cells (cells merge when a boundary falls inside a run of
/// equal values); the feature and cell count with the fewest training
/// misclassifications win, ties resolved by (error count, feature index,
/// cell count), all ascending.
ClassifierModel fit_one_r(const Dataset& data, const FitConfig& cfg = {});

/// Fisher discriminant on the pooled within-class covariance, scored through
/// a logistic link with a log prior-ratio intercept. Requires at least two
/// rows per class. When the pooled covariance is numerically singular the
/// ridge escalates over a fixed ladder until the solve is well posed; the
/// value used is recorded in LdaParams::ridge_used.
ClassifierModel fit_lda(const Dataset& data, const FitConfig& cfg = {});

/// Binary splits chosen by largest impurity decrease (sum-of-squared-counts
/// criterion), candidate thresholds at midpoints between consecutive
/// distinct sorted values, both children at least cfg.min_leaf rows, and
/// only strictly positive decreases accepted. Split ties prefer the lowest
/// feature index, then the lowest threshold. The grown tree is pruned by
/// weakest-link cost-complexity on training misclassification counts to
/// exactly min(cfg.max_leaves, grown leaves) leaves; pruning ties collapse
/// the smallest node id in preorder numbering.
ClassifierModel fit_tree(const Dataset& data, const FitConfig& cfg = {});

/// Single hidden layer of logistic units trained by full-batch gradient
/// descent on mean cross-entropy, with internal per-feature standardization.
/// Weights initialize to uniform [-0.5, 0.5) draws from cfg.seed, consumed
/// hidden-weights row by row, then hidden biases, output weights, output
/// bias. With hidden_nodes == 0 the fit reproduces the default rule.
ClassifierModel fit_mlp(const Dataset& data, const FitConfig& cfg = {});

// ============================================================================
// Persistence
// ============================================================================
// Versioned plain-text format; doubles are written with 17 significant
// digits so a save/load round trip is bit-exact. I/O problems and malformed
// content raise IoError.

void save_model(const ClassifierModel& model, std::ostream& out);
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(std::istream& in);
ClassifierModel load_model(const std::string& path);

// ============================================================================
// Network internals, exposed so the gradient can be verified numerically
// ============================================================================

namespace mlpmath {

/// Flat parameter layout: hidden weights row-major, hidden biases, output
/// weights, output bias.
Eigen::Index parameter_count(Eigen::Index inputs, Eigen::Index hidden);

/// Mean cross-entropy of the network at `theta` on (features, labels).
double loss(const Eigen::VectorXd& theta, Eigen::Index hidden,
            const Eigen::MatrixXd& features, const Eigen::VectorXd& labels);

/// Analytic gradient of loss() with respect to theta.
Eigen::VectorXd loss_gradient(const Eigen::VectorXd& theta, Eigen::Index hidden,
                              const Eigen::MatrixXd& features,
                              const Eigen::VectorXd& labels);

/// Loss and gradient in one pass.
std::pair<double, Eigen::VectorXd> loss_with_gradient(const Eigen::VectorXd& theta,
                                                      Eigen::Index hidden,
                                                      const Eigen::MatrixXd& features,
                                                      const Eigen::VectorXd& labels);

} // namespace mlpmath

} // namespace illusion::classifiers
