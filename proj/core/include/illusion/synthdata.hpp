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

#include <illusion/analytic.hpp>
#include <illusion/dataset.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace illusion::synth {

// ============================================================================
// Specifications
// ============================================================================

/// Two-class Gaussian model with shared covariance.
///
/// Construction validates: matching dimensions (ShapeError), finite entries,
/// prior1 in (0, 1) (ConstraintError), sigma symmetric within 1e-9 and
/// positive definite (ValidityError). The stored sigma is symmetrized.
struct GaussianClassSpec {
    Eigen::VectorXd mean0;
    Eigen::VectorXd mean1;
    Eigen::MatrixXd sigma;
    double prior1;

    GaussianClassSpec(Eigen::VectorXd mean0, Eigen::VectorXd mean1, Eigen::MatrixXd sigma,
                      double prior1);

    Eigen::Index dim() const { return mean0.size(); }
};

/// The continuum that defines class membership when a scenario redefines
/// labels by thresholding.
///  - linear: the class-1 linear score sigma^-1(mu1 - mu0) . x centered
///    between the base means (the default continuum)
///  - min_coordinate: min_j x_j, a corner-shaped continuum whose level sets
///    are axis-aligned; used to give recursive partitioning genuine fine
///    structure to exploit
enum class LatentKind { linear, min_coordinate };

/// Time-indexed generative specification for a drifting stream.
///
/// Fields beyond the base model:
///  - mean_velocity: additive per-step shift of mu1; also applied to mu0
///    when drift_mu0 is set (so a single blob can drift as a whole)
///  - prior_path: optional per-step class-1 prior, length steps
///  - label_noise_delta: probability each generated label is flipped
///  - redefinition_path: optional per-step thresholds; when present, labels
///    are recomputed as latent >= redefinition_path[t] before noise
///  - latent: which continuum fills latent_score (and feeds redefinition)
///  - selection_weights / selection_cutoff: optional linear acceptance rule
///    applied last; rows with weights . x < cutoff are dropped. When the
///    cutoff is set without weights, the linear class-1 score direction of
///    the base model is used and documented as the default.
struct DriftScenario {
    GaussianClassSpec base;
    Eigen::VectorXd mean_velocity;
    bool drift_mu0 = false;
    int steps = 1;
    int batch_size = 1;
    double label_noise_delta = 0.0;
    LatentKind latent = LatentKind::linear;
    std::vector<double> prior_path;
    std::vector<double> redefinition_path;
    std::optional<Eigen::VectorXd> selection_weights;
    std::optional<double> selection_cutoff;
};

/// One Dataset per time step; every batch carries time_index (the step) and
/// latent_score. Fully reproducible from (scenario, seed).
struct Stream {
    std::vector<Dataset> batches;

    Eigen::Index total_rows() const;
};

// ============================================================================
// Generators
// ============================================================================
// Determinism contract: every generator is a pure function of its arguments;
// the same inputs give bitwise-identical outputs. Randomness comes from
// rng::Rng only (the algorithms are fixed in that header), and the draw
// order per generator is documented at its definition.

/// n draws from the zero-mean unit-variance Gaussian whose correlation
/// matrix the spec describes; the response is the last column (named "y")
/// and is also stored as latent_score. Labels are all zero (regression
/// data). Pre: n >= 1.
Dataset gen_equicorr_samples(const analytic::EquicorrSpec& spec, Eigen::Index n,
                             std::uint64_t seed);

/// n rows of the two-class Gaussian model: class drawn from prior1, features
/// from the class conditional, latent_score filled with the centered linear
/// class-1 score. Pre: n >= 2.
Dataset gen_gaussian_two_class(const GaussianClassSpec& spec, Eigen::Index n,
                               std::uint64_t seed);

/// Batches of the drifting scenario. Per batch t the generation order is
/// fixed: draw features (class from the step prior, then the conditional
/// Gaussian), compute latent scores, recut labels when a redefinition path
/// is given, flip labels with probability delta, then apply selection.
/// Batch t draws from RNG substream (seed, t), so batches can be produced
/// concurrently with identical results.
Stream make_drift_stream(const DriftScenario& scenario, std::uint64_t seed);

/// Copy of `data` with each label independently flipped with probability
/// delta (one uniform per row, in row order). Pre: 0 <= delta < 0.5.
Dataset inject_label_noise(const Dataset& data, double delta, std::uint64_t seed);

/// Copy of `data` with labels recomputed as (latent_score >= threshold).
/// Pre: latent_score present.
Dataset apply_class_redefinition(const Dataset& data, double threshold);

struct SelectionResult {
    Dataset data;
    double acceptance_rate;
};

/// Rows whose linear score weights . x >= cutoff (the accepted applicants),
/// plus the acceptance rate. Throws ShapeError on weight-length mismatch and
/// DegenerateOutputError when nothing is accepted.
SelectionResult apply_selection_filter(const Dataset& data,
                                       const Eigen::VectorXd& score_weights, double cutoff);

} // namespace illusion::synth
