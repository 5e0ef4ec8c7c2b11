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

#include <illusion/classifiers.hpp>
#include <illusion/synthdata.hpp>

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace illusion::metrics {

// ============================================================================
// Metric selection
// ============================================================================

/// quantity marks rows that carry an analytic value (a variance, a bound, a
/// rank correlation) rather than a prediction-based measure; evaluate()
/// rejects it.
enum class MetricId { error_rate, cost_weighted, brier, auc, quantity };

std::string to_string(MetricId id);
MetricId metric_id_from_string(const std::string& name);

/// A performance measure plus its cost parameterization. cost_ratio is
/// c0/c1, the cost of wrongly accepting a class-0 row relative to wrongly
/// rejecting a class-1 row; it must be positive for cost-weighted
/// (ConstraintError otherwise) and is ignored by the other measures.
struct MetricKind {
    MetricId id;
    double cost_ratio;

    explicit MetricKind(MetricId id, double cost_ratio = 1.0);

    static MetricKind error_rate() { return MetricKind(MetricId::error_rate); }
    static MetricKind cost_weighted(double ratio) {
        return MetricKind(MetricId::cost_weighted, ratio);
    }
    static MetricKind brier() { return MetricKind(MetricId::brier); }
    static MetricKind auc() { return MetricKind(MetricId::auc); }
    static MetricKind quantity() { return MetricKind(MetricId::quantity); }
};

/// One tidy result row: a position (time step or complexity level), the
/// measured value, a 95% half-width (0 for single runs), and the series
/// label used when rows are written to CSV.
struct EvalRecord {
    double index = 0.0;
    MetricKind metric = MetricKind::error_rate();
    double value = 0.0;
    double ci_half_width = 0.0;
    std::string label;
};

// ============================================================================
// Scalar metrics
// ============================================================================

/// Evaluates `metric` for class-1 scores against true labels.
///  - error-rate: misclassified fraction when predicting 1 where
///    score/(1 - score) > threshold_odds
///  - cost-weighted: (c0 * false-accepts + c1 * false-rejects) / (c1 * n),
///    thresholded the same way
///  - brier: mean squared (score - label); threshold unused
///  - auc: probability a random class-1 row outscores a random class-0 row,
///    ties counted 1/2 (midrank form); threshold unused
/// Pre: equal lengths >= 1, scores in [0, 1], threshold_odds > 0, and both
/// classes present for auc (PreconditionError otherwise).
double evaluate(const MetricKind& metric, const Eigen::VectorXd& scores,
                const std::vector<int>& labels, double threshold_odds = 1.0);

/// Fraction of the default-rule-to-best-method error gap that a simple
/// method closes: (m0 - mL)/(m0 - mT). Pre: m0 >= mL >= 0 and m0 > mT >= 0;
/// m0 == mT raises DegenerateInputError, other violations PreconditionError.
double proportion_achievable(double m0, double mL, double mT);

/// Smallest achievable error of the two-class Gaussian model: with
/// Delta the Mahalanobis distance between the means and theta = ln(pi0/pi1),
///   pi0 * Phi(-Delta/2 - theta/Delta) + pi1 * Phi(theta/Delta - Delta/2),
/// and min(pi0, pi1) when the means coincide.
double bayes_error_gaussian(const synth::GaussianClassSpec& spec);

// ============================================================================
// Curves and sequences
// ============================================================================

/// Plain lowess: for each point, a tricube-weighted linear fit over its
/// ceil(span * n) nearest neighbors by abscissa (no robustness iterations).
/// Pre: x strictly increasing, x and y the same length, span in (0, 1] with
/// ceil(span * n) >= 2 (PreconditionError otherwise).
Eigen::VectorXd lowess_smooth(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double span);

/// One record per batch, in time order; the record index is the batch's time
/// step. The decision threshold is metric.cost_ratio for cost-weighted and 1
/// otherwise, unless `threshold_odds` overrides it. Pre: nonempty stream.
std::vector<EvalRecord> temporal_evaluate(const classifiers::ClassifierModel& model,
                                          const synth::Stream& stream,
                                          const MetricKind& metric,
                                          std::optional<double> threshold_odds = std::nullopt);

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
};

/// Mean and 95% half-width 1.96 * (sample standard deviation)/sqrt(m) over
/// replicate measurements. Pre: at least two values.
ConfidenceInterval confidence_interval(const std::vector<double>& values);

// ============================================================================
// Trend and rank association
// ============================================================================

struct TrendTest {
    /// Sum over pairs of sign(later - earlier).
    double s_statistic = 0.0;
    /// Normal statistic with tie-corrected variance and continuity correction.
    double z = 0.0;
    /// Two-sided p-value under the normal approximation.
    double p_value = 1.0;
};

/// Mann-Kendall monotone-trend test on a value sequence (normal
/// approximation; adequate for the batch counts used here). Pre: n >= 3.
TrendTest mann_kendall(const std::vector<double>& values);

/// Kendall rank correlation (tau-b, tie-adjusted) between two paired value
/// sequences. Pre: equal lengths >= 2; DegenerateInputError when either
/// sequence is entirely tied.
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

} // namespace illusion::metrics
