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
#include <illusion/rng.hpp>

#include <cmath>
#include <utility>
#include <vector>

namespace illusion::classifiers {

namespace mlpmath {

namespace {

struct Unpacked {
    Eigen::MatrixXd hidden_weights; // H x p
    Eigen::VectorXd hidden_bias;    // H
    Eigen::VectorXd output_weights; // H
    double output_bias = 0.0;
};

Unpacked unpack(const Eigen::VectorXd& theta, Eigen::Index inputs, Eigen::Index hidden) {
    if (theta.size() != parameter_count(inputs, hidden)) {
        throw ShapeError("parameter vector length does not match the network layout");
    }
    Unpacked result;
    result.hidden_weights.resize(hidden, inputs);
    Eigen::Index at = 0;
    for (Eigen::Index h = 0; h < hidden; ++h) {
        for (Eigen::Index j = 0; j < inputs; ++j) {
            result.hidden_weights(h, j) = theta(at++);
        }
    }
    result.hidden_bias = theta.segment(at, hidden);
    at += hidden;
    result.output_weights = theta.segment(at, hidden);
    at += hidden;
    result.output_bias = theta(at);
    return result;
}

Eigen::MatrixXd logistic(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) {
        if (v >= 0.0) {
            return 1.0 / (1.0 + std::exp(-v));
        }
        const double e = std::exp(v);
        return e / (1.0 + e);
    });
}

/// Mean cross-entropy from raw output margins, in the overflow-safe
/// softplus form max(z, 0) - z*y + log(1 + exp(-|z|)).
double cross_entropy(const Eigen::VectorXd& margins, const Eigen::VectorXd& labels) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
        const double z = margins(i);
        total += std::max(z, 0.0) - z * labels(i) + std::log1p(std::exp(-std::abs(z)));
    }
    return total / static_cast<double>(margins.size());
}

void check_inputs(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
    if (features.rows() != labels.size()) {
        throw ShapeError("label count does not match the feature row count");
    }
    if (features.rows() < 1) {
        throw PreconditionError("loss needs at least one row");
    }
}

} // namespace

Eigen::Index parameter_count(Eigen::Index inputs, Eigen::Index hidden) {
    return hidden * inputs + hidden + hidden + 1;
}

double loss(const Eigen::VectorXd& theta, Eigen::Index hidden,
            const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
    check_inputs(features, labels);
    const Unpacked net = unpack(theta, features.cols(), hidden);
    const Eigen::MatrixXd activations =
        logistic((features * net.hidden_weights.transpose()).rowwise() +
                 net.hidden_bias.transpose());
    const Eigen::VectorXd margins =
        (activations * net.output_weights).array() + net.output_bias;
    return cross_entropy(margins, labels);
}

std::pair<double, Eigen::VectorXd> loss_with_gradient(const Eigen::VectorXd& theta,
                                                      Eigen::Index hidden,
                                                      const Eigen::MatrixXd& features,
                                                      const Eigen::VectorXd& labels) {
    check_inputs(features, labels);
    const Eigen::Index n = features.rows();
    const Eigen::Index p = features.cols();
    const Unpacked net = unpack(theta, p, hidden);

    const Eigen::MatrixXd activations =
        logistic((features * net.hidden_weights.transpose()).rowwise() +
                 net.hidden_bias.transpose());
    const Eigen::VectorXd margins =
        (activations * net.output_weights).array() + net.output_bias;
    const double value = cross_entropy(margins, labels);

    // d(mean cross-entropy)/d(margin_i) = (sigma(margin_i) - y_i)/n.
    Eigen::VectorXd margin_grad(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = margins(i);
        const double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                                  : std::exp(z) / (1.0 + std::exp(z));
        margin_grad(i) = (s - labels(i)) / static_cast<double>(n);
    }

    const Eigen::VectorXd output_weight_grad = activations.transpose() * margin_grad;
    const double output_bias_grad = margin_grad.sum();
    const Eigen::MatrixXd pre_activation_grad =
        (margin_grad * net.output_weights.transpose()).array() * activations.array() *
        (1.0 - activations.array());
    const Eigen::MatrixXd hidden_weight_grad = pre_activation_grad.transpose() * features;
    const Eigen::VectorXd hidden_bias_grad = pre_activation_grad.colwise().sum();

    Eigen::VectorXd gradient(theta.size());
    Eigen::Index at = 0;
    for (Eigen::Index h = 0; h < hidden; ++h) {
        for (Eigen::Index j = 0; j < p; ++j) {
            gradient(at++) = hidden_weight_grad(h, j);
        }
    }
    gradient.segment(at, hidden) = hidden_bias_grad;
    at += hidden;
    gradient.segment(at, hidden) = output_weight_grad;
    at += hidden;
    gradient(at) = output_bias_grad;
    return {value, std::move(gradient)};
}

Eigen::VectorXd loss_gradient(const Eigen::VectorXd& theta, Eigen::Index hidden,
                              const Eigen::MatrixXd& features,
                              const Eigen::VectorXd& labels) {
    return loss_with_gradient(theta, hidden, features, labels).second;
}

} // namespace mlpmath

ClassifierModel fit_mlp(const Dataset& data, const FitConfig& cfg) {
    data.validate();
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw PreconditionError("the network needs both classes in the design data");
    }
    if (cfg.hidden_nodes < 0) {
        throw PreconditionError("hidden unit count must be nonnegative");
    }
    if (cfg.epochs < 1) {
        throw PreconditionError("epoch count must be at least 1");
    }
    if (!(cfg.learning_rate > 0.0)) {
        throw PreconditionError("learning rate must be positive");
    }

    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();

    MlpParams params;
    params.fallback_rate =
        static_cast<double>(counts[1]) / static_cast<double>(counts[0] + counts[1]);

    if (cfg.hidden_nodes == 0) {
        // Zero hidden units degenerate to the constant default rule.
        params.hidden_weights.resize(0, p);
        params.hidden_bias.resize(0);
        params.output_weights.resize(0);
        params.feature_mean = Eigen::VectorXd::Zero(p);
        params.feature_scale = Eigen::VectorXd::Ones(p);
        const double z = params.fallback_rate;
        params.loss_trace.push_back(
            -(z > 0.0 ? static_cast<double>(counts[1]) * std::log(z) : 0.0) / n -
            (z < 1.0 ? static_cast<double>(counts[0]) * std::log1p(-z) : 0.0) / n);
        return ClassifierModel(ModelKind::mlp, p, std::move(params));
    }

    const Eigen::Index hidden = cfg.hidden_nodes;

    params.feature_mean = data.features.colwise().mean();
    Eigen::VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double variance =
            (data.features.col(j).array() - params.feature_mean(j)).square().mean();
        const double sd = std::sqrt(variance);
        // Constant features standardize to zero; a unit scale avoids 0/0.
        scale(j) = sd > 1e-12 ? sd : 1.0;
    }
    params.feature_scale = scale;

    const Eigen::MatrixXd standardized =
        (data.features.rowwise() - params.feature_mean.transpose()).array().rowwise() /
        params.feature_scale.transpose().array();
    Eigen::VectorXd labels(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        labels(i) = data.labels[static_cast<std::size_t>(i)];
    }

    // Initialization draws one substream-free uniform per parameter, in the
    // packed order (hidden weights row-major, hidden biases, output weights,
    // output bias), so the starting point depends only on cfg.seed.
    rng::Rng rng(cfg.seed);
    Eigen::VectorXd theta(mlpmath::parameter_count(p, hidden));
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        theta(i) = rng.uniform() - 0.5;
    }

    params.loss_trace.reserve(static_cast<std::size_t>(cfg.epochs) + 1);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto [value, gradient] =
            mlpmath::loss_with_gradient(theta, hidden, standardized, labels);
        params.loss_trace.push_back(value);
        theta -= cfg.learning_rate * gradient;
    }
    params.loss_trace.push_back(mlpmath::loss(theta, hidden, standardized, labels));

    Eigen::Index at = 0;
    params.hidden_weights.resize(hidden, p);
    for (Eigen::Index h = 0; h < hidden; ++h) {
        for (Eigen::Index j = 0; j < p; ++j) {
            params.hidden_weights(h, j) = theta(at++);
        }
    }
    params.hidden_bias = theta.segment(at, hidden);
    at += hidden;
    params.output_weights = theta.segment(at, hidden);
    at += hidden;
    params.output_bias = theta(at);
    return ClassifierModel(ModelKind::mlp, p, std::move(params));
}

} // namespace illusion::classifiers
