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
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

namespace illusion::classifiers {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

bool in_unit_interval(double v) {
    return v >= 0.0 && v <= 1.0;
}

void validate_default(const DefaultRuleParams& params) {
    if (params.majority_class != 0 && params.majority_class != 1) {
        throw PreconditionError("majority class must be 0 or 1");
    }
    if (!in_unit_interval(params.class1_rate)) {
        throw PreconditionError("class-1 rate must lie in [0, 1]");
    }
}

void validate_one_r(const OneRParams& params, Eigen::Index input_dim) {
    if (params.feature < 0 || params.feature >= input_dim) {
        throw PreconditionError("one-r feature index out of range");
    }
    if (params.cell_scores.size() != params.cut_points.size() + 1) {
        throw ShapeError("one-r needs one score per cell");
    }
    for (std::size_t i = 1; i < params.cut_points.size(); ++i) {
        if (!(params.cut_points[i] > params.cut_points[i - 1])) {
            throw PreconditionError("one-r cut points must be strictly ascending");
        }
    }
    for (double cut : params.cut_points) {
        if (!std::isfinite(cut)) {
            throw PreconditionError("one-r cut points must be finite");
        }
    }
    for (double score : params.cell_scores) {
        if (!in_unit_interval(score)) {
            throw PreconditionError("one-r cell scores must lie in [0, 1]");
        }
    }
}

void validate_lda(const LdaParams& params, Eigen::Index input_dim) {
    if (params.weights.size() != input_dim) {
        throw ShapeError("lda weight length does not match the input dimension");
    }
    if (!params.weights.allFinite() || !std::isfinite(params.bias)) {
        throw PreconditionError("lda weights must be finite");
    }
    if (!(params.ridge_used >= 0.0)) {
        throw PreconditionError("lda ridge must be nonnegative");
    }
}

void validate_tree(const TreeParams& params, Eigen::Index input_dim) {
    const int node_count = static_cast<int>(params.nodes.size());
    if (node_count < 1) {
        throw PreconditionError("tree must have at least one node");
    }
    int leaves = 0;
    for (int id = 0; id < node_count; ++id) {
        const TreeNode& node = params.nodes[static_cast<std::size_t>(id)];
        if (!in_unit_interval(node.score)) {
            throw PreconditionError("tree node scores must lie in [0, 1]");
        }
        if (node.feature == -1) {
            ++leaves;
            if (node.left != -1 || node.right != -1) {
                throw PreconditionError("leaf nodes must not reference children");
            }
            continue;
        }
        if (node.feature < 0 || node.feature >= input_dim) {
            throw PreconditionError("tree split feature out of range");
        }
        if (!std::isfinite(node.threshold)) {
            throw PreconditionError("tree thresholds must be finite");
        }
        // Children strictly after the parent keeps the structure acyclic.
        if (node.left <= id || node.right <= id || node.left >= node_count ||
            node.right >= node_count) {
            throw PreconditionError("tree child indices must point past their parent");
        }
    }
    if (params.leaf_count != leaves) {
        throw PreconditionError("tree leaf count does not match the stored nodes");
    }
}

void validate_mlp(const MlpParams& params, Eigen::Index input_dim) {
    const Eigen::Index hidden = params.hidden_weights.rows();
    if (hidden > 0 && params.hidden_weights.cols() != input_dim) {
        throw ShapeError("hidden weight columns do not match the input dimension");
    }
    if (params.hidden_bias.size() != hidden || params.output_weights.size() != hidden) {
        throw ShapeError("hidden layer parameter sizes disagree");
    }
    if (params.feature_mean.size() != input_dim || params.feature_scale.size() != input_dim) {
        throw ShapeError("standardization vector length does not match the input dimension");
    }
    if (hidden > 0 && (params.feature_scale.array() <= 0.0).any()) {
        throw PreconditionError("feature scales must be strictly positive");
    }
    if (!params.hidden_weights.allFinite() || !params.hidden_bias.allFinite() ||
        !params.output_weights.allFinite() || !std::isfinite(params.output_bias) ||
        !params.feature_mean.allFinite() || !params.feature_scale.allFinite()) {
        throw PreconditionError("network parameters must be finite");
    }
    if (!in_unit_interval(params.fallback_rate)) {
        throw PreconditionError("fallback rate must lie in [0, 1]");
    }
}

ModelKind kind_of_params(const ClassifierModel::Params& params) {
    switch (params.index()) {
    case 0: return ModelKind::default_rule;
    case 1: return ModelKind::one_r;
    case 2: return ModelKind::lda;
    case 3: return ModelKind::tree;
    default: return ModelKind::mlp;
    }
}

} // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::default_rule: return "default-rule";
    case ModelKind::one_r: return "one-r";
    case ModelKind::lda: return "lda";
    case ModelKind::tree: return "tree";
    case ModelKind::mlp: return "mlp";
    }
    throw PreconditionError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "default-rule") return ModelKind::default_rule;
    if (name == "one-r") return ModelKind::one_r;
    if (name == "lda") return ModelKind::lda;
    if (name == "tree") return ModelKind::tree;
    if (name == "mlp") return ModelKind::mlp;
    throw PreconditionError("unknown model kind '" + name + "'");
}

ClassifierModel::ClassifierModel(ModelKind kind, Eigen::Index input_dim, Params params)
    : kind_(kind), input_dim_(input_dim), params_(std::move(params)) {
    if (input_dim_ < 1) {
        throw PreconditionError("models need at least one input feature");
    }
    if (kind_of_params(params_) != kind_) {
        throw PreconditionError("parameter block does not match the declared model kind");
    }
    switch (kind_) {
    case ModelKind::default_rule:
        validate_default(std::get<DefaultRuleParams>(params_));
        break;
    case ModelKind::one_r:
        validate_one_r(std::get<OneRParams>(params_), input_dim_);
        break;
    case ModelKind::lda:
        validate_lda(std::get<LdaParams>(params_), input_dim_);
        break;
    case ModelKind::tree:
        validate_tree(std::get<TreeParams>(params_), input_dim_);
        break;
    case ModelKind::mlp:
        validate_mlp(std::get<MlpParams>(params_), input_dim_);
        break;
    }
}

int ClassifierModel::complexity() const {
    switch (kind_) {
    case ModelKind::default_rule:
    case ModelKind::one_r:
        return 1;
    case ModelKind::lda:
        return static_cast<int>(input_dim_);
    case ModelKind::tree:
        return std::get<TreeParams>(params_).leaf_count;
    case ModelKind::mlp:
        return static_cast<int>(std::get<MlpParams>(params_).hidden_weights.rows());
    }
    throw PreconditionError("unknown model kind");
}

Eigen::VectorXd predict_scores(const ClassifierModel& model, const Eigen::MatrixXd& features) {
    if (features.cols() != model.input_dim()) {
        throw ShapeError("feature count " + std::to_string(features.cols()) +
                         " does not match the model's input dimension " +
                         std::to_string(model.input_dim()));
    }
    const Eigen::Index n = features.rows();
    Eigen::VectorXd scores(n);

    if (const auto* dflt = std::get_if<DefaultRuleParams>(&model.params())) {
        scores.setConstant(dflt->class1_rate);
        return scores;
    }
    if (const auto* rule = std::get_if<OneRParams>(&model.params())) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double value = features(i, rule->feature);
            const std::size_t cell = static_cast<std::size_t>(
                std::lower_bound(rule->cut_points.begin(), rule->cut_points.end(), value) -
                rule->cut_points.begin());
            scores(i) = rule->cell_scores[cell];
        }
        return scores;
    }
    if (const auto* lda = std::get_if<LdaParams>(&model.params())) {
        const Eigen::VectorXd margin =
            (features * lda->weights).array() + lda->bias;
        for (Eigen::Index i = 0; i < n; ++i) {
            scores(i) = sigmoid(margin(i));
        }
        return scores;
    }
    if (const auto* tree = std::get_if<TreeParams>(&model.params())) {
        for (Eigen::Index i = 0; i < n; ++i) {
            int id = 0;
            while (tree->nodes[static_cast<std::size_t>(id)].feature != -1) {
                const TreeNode& node = tree->nodes[static_cast<std::size_t>(id)];
                id = features(i, node.feature) < node.threshold ? node.left : node.right;
            }
            scores(i) = tree->nodes[static_cast<std::size_t>(id)].score;
        }
        return scores;
    }
    const auto& mlp = std::get<MlpParams>(model.params());
    if (mlp.hidden_weights.rows() == 0) {
        scores.setConstant(mlp.fallback_rate);
        return scores;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd standardized =
            (features.row(i).transpose() - mlp.feature_mean).cwiseQuotient(mlp.feature_scale);
        Eigen::VectorXd activation = mlp.hidden_weights * standardized + mlp.hidden_bias;
        for (Eigen::Index h = 0; h < activation.size(); ++h) {
            activation(h) = sigmoid(activation(h));
        }
        scores(i) = sigmoid(mlp.output_weights.dot(activation) + mlp.output_bias);
    }
    return scores;
}

std::vector<int> labels_from_scores(const Eigen::VectorXd& scores, double threshold_odds) {
    if (!(threshold_odds > 0.0)) {
        throw PreconditionError("threshold odds must be positive");
    }
    std::vector<int> labels(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const double score = scores(i);
        if (!(score >= 0.0 && score <= 1.0)) {
            throw PreconditionError("scores must lie in [0, 1]");
        }
        // score/(1-score) > k, rearranged to avoid dividing by zero at 1.
        labels[static_cast<std::size_t>(i)] =
            score * (1.0 + threshold_odds) > threshold_odds ? 1 : 0;
    }
    return labels;
}

std::vector<int> predict_labels(const ClassifierModel& model,
                                const Eigen::MatrixXd& features,
                                double threshold_odds) {
    return labels_from_scores(predict_scores(model, features), threshold_odds);
}

// ============================================================================
// Persistence
// ============================================================================

namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

[[noreturn]] void malformed(const std::string& detail) {
    throw IoError("malformed model file: " + detail);
}

std::string read_token(std::istream& in, const char* what) {
    std::string token;
    if (!(in >> token)) {
        malformed(std::string("missing ") + what);
    }
    return token;
}

double read_double(std::istream& in, const char* what) {
    double value = 0.0;
    if (!(in >> value)) {
        malformed(std::string("missing or unparsable ") + what);
    }
    return value;
}

long read_long(std::istream& in, const char* what) {
    long value = 0;
    if (!(in >> value)) {
        malformed(std::string("missing or unparsable ") + what);
    }
    return value;
}

void expect_keyword(std::istream& in, const char* keyword) {
    const std::string token = read_token(in, keyword);
    if (token != keyword) {
        malformed("expected '" + std::string(keyword) + "', found '" + token + "'");
    }
}

void write_vector(std::ostream& out, const char* keyword, const Eigen::VectorXd& values) {
    out << keyword;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        out << ' ' << fmt(values(i));
    }
    out << '\n';
}

Eigen::VectorXd read_vector(std::istream& in, const char* keyword, Eigen::Index size) {
    expect_keyword(in, keyword);
    Eigen::VectorXd values(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        values(i) = read_double(in, keyword);
    }
    return values;
}

} // namespace

void save_model(const ClassifierModel& model, std::ostream& out) {
    out << "illusion-model " << kFormatVersion << '\n';
    out << "kind " << to_string(model.kind()) << '\n';
    out << "input_dim " << model.input_dim() << '\n';

    if (const auto* dflt = std::get_if<DefaultRuleParams>(&model.params())) {
        out << "majority " << dflt->majority_class << '\n';
        out << "class1_rate " << fmt(dflt->class1_rate) << '\n';
    } else if (const auto* rule = std::get_if<OneRParams>(&model.params())) {
        out << "feature " << rule->feature << '\n';
        out << "cells " << rule->cell_scores.size() << '\n';
        out << "cuts";
        for (double cut : rule->cut_points) {
            out << ' ' << fmt(cut);
        }
        out << '\n' << "scores";
        for (double score : rule->cell_scores) {
            out << ' ' << fmt(score);
        }
        out << '\n';
    } else if (const auto* lda = std::get_if<LdaParams>(&model.params())) {
        write_vector(out, "weights", lda->weights);
        out << "bias " << fmt(lda->bias) << '\n';
        out << "ridge " << fmt(lda->ridge_used) << '\n';
    } else if (const auto* tree = std::get_if<TreeParams>(&model.params())) {
        out << "nodes " << tree->nodes.size() << '\n';
        for (const TreeNode& node : tree->nodes) {
            out << "node " << node.feature << ' ' << fmt(node.threshold) << ' ' << node.left
                << ' ' << node.right << ' ' << fmt(node.score) << '\n';
        }
    } else {
        const auto& mlp = std::get<MlpParams>(model.params());
        const Eigen::Index hidden = mlp.hidden_weights.rows();
        out << "hidden " << hidden << '\n';
        out << "hidden_weights";
        for (Eigen::Index h = 0; h < hidden; ++h) {
            for (Eigen::Index j = 0; j < mlp.hidden_weights.cols(); ++j) {
                out << ' ' << fmt(mlp.hidden_weights(h, j));
            }
        }
        out << '\n';
        write_vector(out, "hidden_bias", mlp.hidden_bias);
        write_vector(out, "output_weights", mlp.output_weights);
        out << "output_bias " << fmt(mlp.output_bias) << '\n';
        write_vector(out, "feature_mean", mlp.feature_mean);
        write_vector(out, "feature_scale", mlp.feature_scale);
        out << "fallback " << fmt(mlp.fallback_rate) << '\n';
    }
    out << "end\n";
    if (!out) {
        throw IoError("failed while writing model stream");
    }
}

void save_model(const ClassifierModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    save_model(model, out);
}

ClassifierModel load_model(std::istream& in) {
    expect_keyword(in, "illusion-model");
    const long version = read_long(in, "format version");
    if (version != kFormatVersion) {
        malformed("unsupported format version " + std::to_string(version));
    }
    expect_keyword(in, "kind");
    const ModelKind kind = [&] {
        const std::string name = read_token(in, "model kind");
        try {
            return model_kind_from_string(name);
        } catch (const PreconditionError&) {
            malformed("unknown model kind '" + name + "'");
        }
    }();
    expect_keyword(in, "input_dim");
    const long input_dim = read_long(in, "input dimension");
    if (input_dim < 1) {
        malformed("input dimension must be positive");
    }
    const Eigen::Index p = static_cast<Eigen::Index>(input_dim);

    ClassifierModel::Params params;
    switch (kind) {
    case ModelKind::default_rule: {
        DefaultRuleParams block;
        expect_keyword(in, "majority");
        block.majority_class = static_cast<int>(read_long(in, "majority class"));
        expect_keyword(in, "class1_rate");
        block.class1_rate = read_double(in, "class-1 rate");
        params = block;
        break;
    }
    case ModelKind::one_r: {
        OneRParams block;
        expect_keyword(in, "feature");
        block.feature = static_cast<int>(read_long(in, "feature index"));
        expect_keyword(in, "cells");
        const long cells = read_long(in, "cell count");
        if (cells < 1) {
            malformed("cell count must be positive");
        }
        expect_keyword(in, "cuts");
        block.cut_points.resize(static_cast<std::size_t>(cells - 1));
        for (double& cut : block.cut_points) {
            cut = read_double(in, "cut point");
        }
        expect_keyword(in, "scores");
        block.cell_scores.resize(static_cast<std::size_t>(cells));
        for (double& score : block.cell_scores) {
            score = read_double(in, "cell score");
        }
        params = block;
        break;
    }
    case ModelKind::lda: {
        LdaParams block;
        block.weights = read_vector(in, "weights", p);
        expect_keyword(in, "bias");
        block.bias = read_double(in, "bias");
        expect_keyword(in, "ridge");
        block.ridge_used = read_double(in, "ridge");
        params = block;
        break;
    }
    case ModelKind::tree: {
        TreeParams block;
        expect_keyword(in, "nodes");
        const long count = read_long(in, "node count");
        if (count < 1) {
            malformed("node count must be positive");
        }
        block.nodes.resize(static_cast<std::size_t>(count));
        for (TreeNode& node : block.nodes) {
            expect_keyword(in, "node");
            node.feature = static_cast<int>(read_long(in, "split feature"));
            node.threshold = read_double(in, "threshold");
            node.left = static_cast<int>(read_long(in, "left child"));
            node.right = static_cast<int>(read_long(in, "right child"));
            node.score = read_double(in, "node score");
            if (node.feature == -1) {
                block.leaf_count += 1;
            }
        }
        params = block;
        break;
    }
    case ModelKind::mlp: {
        MlpParams block;
        expect_keyword(in, "hidden");
        const long hidden = read_long(in, "hidden unit count");
        if (hidden < 0) {
            malformed("hidden unit count must be nonnegative");
        }
        const Eigen::Index h = static_cast<Eigen::Index>(hidden);
        expect_keyword(in, "hidden_weights");
        block.hidden_weights.resize(h, p);
        for (Eigen::Index row = 0; row < h; ++row) {
            for (Eigen::Index col = 0; col < p; ++col) {
                block.hidden_weights(row, col) = read_double(in, "hidden weight");
            }
        }
        block.hidden_bias = read_vector(in, "hidden_bias", h);
        block.output_weights = read_vector(in, "output_weights", h);
        expect_keyword(in, "output_bias");
        block.output_bias = read_double(in, "output bias");
        block.feature_mean = read_vector(in, "feature_mean", p);
        block.feature_scale = read_vector(in, "feature_scale", p);
        expect_keyword(in, "fallback");
        block.fallback_rate = read_double(in, "fallback rate");
        params = block;
        break;
    }
    }
    expect_keyword(in, "end");

    try {
        return ClassifierModel(kind, p, std::move(params));
    } catch (const Error& error) {
        malformed(error.what());
    }
}

ClassifierModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    return load_model(in);
}

} // namespace illusion::classifiers
