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
#include <illusion/synthdata.hpp>

#include <illusion/errors.hpp>
#include <illusion/rng.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <string>
#include <utility>

namespace illusion::synth {

namespace {

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw ValidityError(std::string(what) + " must be positive definite");
    }
    return llt.matrixL();
}

Eigen::VectorXd standard_normal_vector(rng::Rng& rng, Eigen::Index size) {
    Eigen::VectorXd z(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        z(i) = rng.normal();
    }
    return z;
}

/// Weights and offset of the centered linear class-1 score
/// sigma^-1 (mu1 - mu0) . (x - (mu0 + mu1)/2).
std::pair<Eigen::VectorXd, double> linear_score_rule(const GaussianClassSpec& spec) {
    Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
    if (llt.info() != Eigen::Success) {
        throw ValidityError("shared covariance must be positive definite");
    }
    Eigen::VectorXd weights = llt.solve(spec.mean1 - spec.mean0);
    const double offset = -0.5 * weights.dot(spec.mean0 + spec.mean1);
    return {std::move(weights), offset};
}

} // namespace

GaussianClassSpec::GaussianClassSpec(Eigen::VectorXd mean0_, Eigen::VectorXd mean1_,
                                     Eigen::MatrixXd sigma_, double prior1_)
    : mean0(std::move(mean0_)), mean1(std::move(mean1_)), sigma(std::move(sigma_)),
      prior1(prior1_) {
    const Eigen::Index p = mean0.size();
    if (p < 1) {
        throw ConstraintError("class means need at least one dimension");
    }
    if (mean1.size() != p || sigma.rows() != p || sigma.cols() != p) {
        throw ShapeError("class means and covariance dimensions disagree");
    }
    if (!mean0.allFinite() || !mean1.allFinite() || !sigma.allFinite()) {
        throw ConstraintError("class model entries must be finite");
    }
    if (!(prior1 > 0.0 && prior1 < 1.0)) {
        throw ConstraintError("class-1 prior must lie strictly between 0 and 1, got " +
                              std::to_string(prior1));
    }
    const double asymmetry = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > 1e-9) {
        throw ValidityError("shared covariance asymmetry " + std::to_string(asymmetry) +
                            " exceeds tolerance");
    }
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();
    (void)cholesky_factor(sigma, "shared covariance");
}

Eigen::Index Stream::total_rows() const {
    Eigen::Index total = 0;
    for (const Dataset& batch : batches) {
        total += batch.rows();
    }
    return total;
}

Dataset gen_equicorr_samples(const analytic::EquicorrSpec& spec, Eigen::Index n,
                             std::uint64_t seed) {
    if (n < 1) {
        throw PreconditionError("sample count must be at least 1");
    }
    const Eigen::Index d = spec.d;
    const Eigen::MatrixXd sigma = analytic::build_equicorr_sigma(spec);
    const Eigen::MatrixXd predictor_block = sigma.topLeftCorner(d, d);
    const Eigen::VectorXd cross = sigma.topRightCorner(d, 1);

    // The full matrix may be merely semidefinite (the response can be an
    // exact linear function of the predictors), so the response is sampled
    // through its regression representation: y = b.x + sqrt(V(d)) * z with
    // b = block^-1 * cross. Draw order per row: d predictor normals, then
    // one response normal.
    const Eigen::MatrixXd factor = cholesky_factor(predictor_block, "predictor correlation block");
    Eigen::LLT<Eigen::MatrixXd> llt(predictor_block);
    const Eigen::VectorXd regression = llt.solve(cross);
    const double residual_sd =
        std::sqrt(std::max(analytic::conditional_variance(spec), 0.0));

    Dataset data;
    data.features.resize(n, d + 1);
    data.labels.assign(static_cast<std::size_t>(n), 0);
    data.feature_names = default_feature_names(d);
    data.feature_names.push_back("y");
    data.latent_score.emplace(n);

    rng::Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd predictors = factor * standard_normal_vector(rng, d);
        const double response = regression.dot(predictors) + residual_sd * rng.normal();
        data.features.row(i).head(d) = predictors.transpose();
        data.features(i, d) = response;
        (*data.latent_score)(i) = response;
    }
    return data;
}

Dataset gen_gaussian_two_class(const GaussianClassSpec& spec, Eigen::Index n,
                               std::uint64_t seed) {
    if (n < 2) {
        throw PreconditionError("two-class sample count must be at least 2");
    }
    const Eigen::Index p = spec.dim();
    const Eigen::MatrixXd factor = cholesky_factor(spec.sigma, "shared covariance");
    const auto [weights, offset] = linear_score_rule(spec);

    Dataset data;
    data.features.resize(n, p);
    data.labels.reserve(static_cast<std::size_t>(n));
    data.feature_names = default_feature_names(p);
    data.latent_score.emplace(n);

    // Draw order per row: one prior uniform, then p feature normals.
    rng::Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int label = rng.bernoulli(spec.prior1) ? 1 : 0;
        const Eigen::VectorXd x =
            (label == 1 ? spec.mean1 : spec.mean0) + factor * standard_normal_vector(rng, p);
        data.features.row(i) = x.transpose();
        data.labels.push_back(label);
        (*data.latent_score)(i) = weights.dot(x) + offset;
    }
    return data;
}

Stream make_drift_stream(const DriftScenario& scenario, std::uint64_t seed) {
    const Eigen::Index p = scenario.base.dim();
    if (scenario.steps < 1) {
        throw ConfigurationError("stream needs at least one step");
    }
    if (scenario.batch_size < 1) {
        throw ConfigurationError("stream batches need at least one row");
    }
    if (scenario.mean_velocity.size() != p) {
        throw ShapeError("mean velocity length does not match the feature dimension");
    }
    if (!scenario.mean_velocity.allFinite()) {
        throw ConfigurationError("mean velocity must be finite");
    }
    if (!scenario.prior_path.empty() &&
        scenario.prior_path.size() != static_cast<std::size_t>(scenario.steps)) {
        throw ConfigurationError("prior path length must equal the step count");
    }
    for (double prior : scenario.prior_path) {
        if (!(prior > 0.0 && prior < 1.0)) {
            throw ConstraintError("prior path values must lie strictly between 0 and 1");
        }
    }
    if (!scenario.redefinition_path.empty() &&
        scenario.redefinition_path.size() != static_cast<std::size_t>(scenario.steps)) {
        throw ConfigurationError("redefinition path length must equal the step count");
    }
    if (!(scenario.label_noise_delta >= 0.0 && scenario.label_noise_delta < 0.5)) {
        throw ConstraintError("label-noise probability must lie in [0, 0.5)");
    }
    if (scenario.selection_weights && scenario.selection_weights->size() != p) {
        throw ShapeError("selection weight length does not match the feature dimension");
    }

    const Eigen::MatrixXd factor = cholesky_factor(scenario.base.sigma, "shared covariance");

    Eigen::VectorXd latent_weights;
    double latent_offset = 0.0;
    if (scenario.latent == LatentKind::linear) {
        auto rule = linear_score_rule(scenario.base);
        latent_weights = std::move(rule.first);
        latent_offset = rule.second;
    }

    // The selection score defaults to the base model's class-1 direction.
    Eigen::VectorXd selection_weights;
    if (scenario.selection_cutoff) {
        selection_weights = scenario.selection_weights
                                ? *scenario.selection_weights
                                : linear_score_rule(scenario.base).first;
    }

    Stream stream;
    stream.batches.reserve(static_cast<std::size_t>(scenario.steps));
    for (int t = 0; t < scenario.steps; ++t) {
        rng::Rng rng = rng::Rng::substream(seed, static_cast<std::uint64_t>(t));
        const Eigen::VectorXd shift = static_cast<double>(t) * scenario.mean_velocity;
        const Eigen::VectorXd mean1 = scenario.base.mean1 + shift;
        const Eigen::VectorXd mean0 =
            scenario.drift_mu0 ? (scenario.base.mean0 + shift).eval() : scenario.base.mean0;
        const double prior1 =
            scenario.prior_path.empty() ? scenario.base.prior1
                                        : scenario.prior_path[static_cast<std::size_t>(t)];

        Dataset batch;
        const Eigen::Index rows = scenario.batch_size;
        batch.features.resize(rows, p);
        batch.labels.reserve(static_cast<std::size_t>(rows));
        batch.feature_names = default_feature_names(p);
        batch.time_index.emplace(static_cast<std::size_t>(rows), t);
        batch.latent_score.emplace(rows);

        // Step 1: features (one prior uniform + p normals per row).
        for (Eigen::Index i = 0; i < rows; ++i) {
            const int label = rng.bernoulli(prior1) ? 1 : 0;
            const Eigen::VectorXd x =
                (label == 1 ? mean1 : mean0) + factor * standard_normal_vector(rng, p);
            batch.features.row(i) = x.transpose();
            batch.labels.push_back(label);
        }
        // Step 2: latent scores.
        for (Eigen::Index i = 0; i < rows; ++i) {
            (*batch.latent_score)(i) =
                scenario.latent == LatentKind::linear
                    ? latent_weights.dot(batch.features.row(i)) + latent_offset
                    : batch.features.row(i).minCoeff();
        }
        // Step 3: label redefinition by thresholding the latent.
        if (!scenario.redefinition_path.empty()) {
            const double threshold = scenario.redefinition_path[static_cast<std::size_t>(t)];
            for (Eigen::Index i = 0; i < rows; ++i) {
                batch.labels[static_cast<std::size_t>(i)] =
                    (*batch.latent_score)(i) >= threshold ? 1 : 0;
            }
        }
        // Step 4: label noise (one uniform per row, in row order).
        if (scenario.label_noise_delta > 0.0) {
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (rng.bernoulli(scenario.label_noise_delta)) {
                    batch.labels[static_cast<std::size_t>(i)] ^= 1;
                }
            }
        }
        // Step 5: selection filtering.
        if (scenario.selection_cutoff) {
            std::vector<Eigen::Index> kept;
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (selection_weights.dot(batch.features.row(i)) >= *scenario.selection_cutoff) {
                    kept.push_back(i);
                }
            }
            if (kept.empty()) {
                throw DegenerateOutputError("selection cutoff rejected every row of batch " +
                                            std::to_string(t));
            }
            batch = batch.subset(kept);
        }
        stream.batches.push_back(std::move(batch));
    }
    return stream;
}

Dataset inject_label_noise(const Dataset& data, double delta, std::uint64_t seed) {
    data.validate();
    if (!(delta >= 0.0 && delta < 0.5)) {
        throw PreconditionError("flip probability must lie in [0, 0.5)");
    }
    Dataset noisy = data;
    rng::Rng rng(seed);
    for (std::size_t i = 0; i < noisy.labels.size(); ++i) {
        if (rng.bernoulli(delta)) {
            noisy.labels[i] ^= 1;
        }
    }
    return noisy;
}

Dataset apply_class_redefinition(const Dataset& data, double threshold) {
    data.validate();
    if (!data.latent_score) {
        throw PreconditionError("class redefinition needs the latent score column");
    }
    Dataset recut = data;
    for (Eigen::Index i = 0; i < recut.rows(); ++i) {
        recut.labels[static_cast<std::size_t>(i)] =
            (*recut.latent_score)(i) >= threshold ? 1 : 0;
    }
    return recut;
}

SelectionResult apply_selection_filter(const Dataset& data,
                                       const Eigen::VectorXd& score_weights, double cutoff) {
    data.validate();
    if (score_weights.size() != data.cols()) {
        throw ShapeError("selection weight length does not match the feature count");
    }
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (score_weights.dot(data.features.row(i)) >= cutoff) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        throw DegenerateOutputError("selection cutoff rejected every row");
    }
    SelectionResult result{data.subset(kept),
                           static_cast<double>(kept.size()) / static_cast<double>(data.rows())};
    return result;
}

} // namespace illusion::synth
