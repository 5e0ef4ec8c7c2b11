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
#include <illusion/evalmetrics.hpp>

#include <illusion/errors.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace illusion::metrics {

namespace {

double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

void check_scores_and_labels(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    if (scores.size() != static_cast<Eigen::Index>(labels.size())) {
        throw ShapeError("score and label lengths differ");
    }
    if (scores.size() < 1) {
        throw PreconditionError("evaluation needs at least one row");
    }
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (!(scores(i) >= 0.0 && scores(i) <= 1.0)) {
            throw PreconditionError("scores must lie in [0, 1]");
        }
    }
    for (int label : labels) {
        if (label != 0 && label != 1) {
            throw PreconditionError("labels must be 0 or 1");
        }
    }
}

/// Mann-Whitney AUC through midranks: U = (sum of class-1 ranks) - n1(n1+1)/2,
/// AUC = U/(n0*n1). Midranks make tied scores count 1/2 per discordant pair.
double auc_midrank(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    const Eigen::Index n = scores.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });

    std::int64_t ones = 0;
    for (int label : labels) {
        ones += label;
    }
    const std::int64_t zeros = static_cast<std::int64_t>(n) - ones;
    if (ones == 0 || zeros == 0) {
        throw PreconditionError("ranking quality needs both classes present");
    }

    double rank_sum_ones = 0.0;
    Eigen::Index at = 0;
    while (at < n) {
        Eigen::Index stop = at;
        while (stop + 1 < n && scores(order[static_cast<std::size_t>(stop + 1)]) ==
                                   scores(order[static_cast<std::size_t>(at)])) {
            ++stop;
        }
        // 1-based ranks at..stop share the midrank.
        const double midrank = static_cast<double>(at + stop) / 2.0 + 1.0;
        for (Eigen::Index i = at; i <= stop; ++i) {
            if (labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] == 1) {
                rank_sum_ones += midrank;
            }
        }
        at = stop + 1;
    }
    const double u_statistic =
        rank_sum_ones - static_cast<double>(ones) * (static_cast<double>(ones) + 1.0) / 2.0;
    return u_statistic / (static_cast<double>(ones) * static_cast<double>(zeros));
}

} // namespace

std::string to_string(MetricId id) {
    switch (id) {
    case MetricId::error_rate: return "error-rate";
    case MetricId::cost_weighted: return "cost-weighted";
    case MetricId::brier: return "brier";
    case MetricId::auc: return "auc";
    case MetricId::quantity: return "quantity";
    }
    throw PreconditionError("unknown metric");
}

MetricId metric_id_from_string(const std::string& name) {
    if (name == "error-rate") return MetricId::error_rate;
    if (name == "cost-weighted") return MetricId::cost_weighted;
    if (name == "brier") return MetricId::brier;
    if (name == "auc") return MetricId::auc;
    if (name == "quantity") return MetricId::quantity;
    throw PreconditionError("unknown metric '" + name + "'");
}

MetricKind::MetricKind(MetricId id_, double cost_ratio_) : id(id_), cost_ratio(cost_ratio_) {
    if (id == MetricId::cost_weighted && !(cost_ratio > 0.0)) {
        throw ConstraintError("cost ratio must be positive");
    }
    if (!std::isfinite(cost_ratio)) {
        throw ConstraintError("cost ratio must be finite");
    }
}

double evaluate(const MetricKind& metric, const Eigen::VectorXd& scores,
                const std::vector<int>& labels, double threshold_odds) {
    check_scores_and_labels(scores, labels);
    const Eigen::Index n = scores.size();

    switch (metric.id) {
    case MetricId::error_rate: {
        const std::vector<int> predicted = classifiers::labels_from_scores(scores, threshold_odds);
        std::int64_t wrong = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            wrong += predicted[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(i)];
        }
        return static_cast<double>(wrong) / static_cast<double>(n);
    }
    case MetricId::cost_weighted: {
        const std::vector<int> predicted = classifiers::labels_from_scores(scores, threshold_odds);
        std::int64_t false_accepts = 0; // true 0, predicted 1; cost c0 each
        std::int64_t false_rejects = 0; // true 1, predicted 0; cost c1 each
        for (Eigen::Index i = 0; i < n; ++i) {
            const int truth = labels[static_cast<std::size_t>(i)];
            const int guess = predicted[static_cast<std::size_t>(i)];
            false_accepts += truth == 0 && guess == 1;
            false_rejects += truth == 1 && guess == 0;
        }
        return (metric.cost_ratio * static_cast<double>(false_accepts) +
                static_cast<double>(false_rejects)) /
               static_cast<double>(n);
    }
    case MetricId::brier: {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double gap = scores(i) - labels[static_cast<std::size_t>(i)];
            total += gap * gap;
        }
        return total / static_cast<double>(n);
    }
    case MetricId::auc:
        return auc_midrank(scores, labels);
    case MetricId::quantity:
        throw PreconditionError("quantity rows are not computable from predictions");
    }
    throw PreconditionError("unknown metric");
}

double proportion_achievable(double m0, double mL, double mT) {
    if (!(mL >= 0.0) || !(mT >= 0.0)) {
        throw PreconditionError("error rates must be nonnegative");
    }
    if (!(m0 >= mL)) {
        throw PreconditionError("the simple method cannot be worse than the default rule here");
    }
    if (m0 == mT) {
        throw DegenerateInputError(
            "default-rule and best-method errors coincide; the proportion is undefined");
    }
    if (!(m0 > mT)) {
        throw PreconditionError("the best method must improve on the default rule");
    }
    return (m0 - mL) / (m0 - mT);
}

double bayes_error_gaussian(const synth::GaussianClassSpec& spec) {
    const Eigen::VectorXd gap = spec.mean1 - spec.mean0;
    Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
    if (llt.info() != Eigen::Success) {
        throw ValidityError("shared covariance must be positive definite");
    }
    const double mahalanobis_sq = gap.dot(llt.solve(gap));
    const double pi1 = spec.prior1;
    const double pi0 = 1.0 - pi1;
    if (mahalanobis_sq <= 0.0) {
        return std::min(pi0, pi1);
    }
    const double delta = std::sqrt(mahalanobis_sq);
    const double theta = std::log(pi0 / pi1);
    return pi0 * standard_normal_cdf(-delta / 2.0 - theta / delta) +
           pi1 * standard_normal_cdf(theta / delta - delta / 2.0);
}

Eigen::VectorXd lowess_smooth(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double span) {
    const Eigen::Index n = x.size();
    if (y.size() != n) {
        throw ShapeError("abscissa and value lengths differ");
    }
    if (n < 2) {
        throw PreconditionError("smoothing needs at least two points");
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(x(i) > x(i - 1))) {
            throw PreconditionError("abscissae must be strictly increasing");
        }
    }
    if (!(span > 0.0 && span <= 1.0)) {
        throw PreconditionError("span must lie in (0, 1]");
    }
    const Eigen::Index window =
        std::min<Eigen::Index>(n, static_cast<Eigen::Index>(
                                      std::ceil(span * static_cast<double>(n))));
    if (window < 2) {
        throw PreconditionError("span too small: it must cover at least two points");
    }

    Eigen::VectorXd smoothed(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Nearest `window` points by abscissa distance, grown symmetrically;
        // equal distances prefer the left neighbor.
        Eigen::Index lo = i;
        Eigen::Index hi = i;
        while (hi - lo + 1 < window) {
            if (lo == 0) {
                ++hi;
            } else if (hi == n - 1) {
                --lo;
            } else if (x(i) - x(lo - 1) <= x(hi + 1) - x(i)) {
                --lo;
            } else {
                ++hi;
            }
        }
        const double reach = std::max(x(i) - x(lo), x(hi) - x(i));

        // Tricube weights and a weighted linear fit centered at x(i); the
        // smoothed value is the fitted intercept.
        double sw = 0.0, st = 0.0, stt = 0.0, sy = 0.0, sty = 0.0;
        for (Eigen::Index j = lo; j <= hi; ++j) {
            const double u = std::abs(x(j) - x(i)) / reach;
            if (u >= 1.0) {
                continue;
            }
            const double cube = 1.0 - u * u * u;
            const double weight = cube * cube * cube;
            const double t = x(j) - x(i);
            sw += weight;
            st += weight * t;
            stt += weight * t * t;
            sy += weight * y(j);
            sty += weight * t * y(j);
        }
        const double det = sw * stt - st * st;
        // A numerically flat design falls back to the weighted mean.
        if (det <= 1e-10 * sw * stt || stt == 0.0) {
            smoothed(i) = sy / sw;
        } else {
            smoothed(i) = (stt * sy - st * sty) / det;
        }
    }
    return smoothed;
}

std::vector<EvalRecord> temporal_evaluate(const classifiers::ClassifierModel& model,
                                          const synth::Stream& stream,
                                          const MetricKind& metric,
                                          std::optional<double> threshold_odds) {
    if (stream.batches.empty()) {
        throw PreconditionError("temporal evaluation needs a nonempty stream");
    }
    const double threshold = threshold_odds.value_or(
        metric.id == MetricId::cost_weighted ? metric.cost_ratio : 1.0);

    std::vector<EvalRecord> records;
    records.reserve(stream.batches.size());
    for (std::size_t t = 0; t < stream.batches.size(); ++t) {
        const Dataset& batch = stream.batches[t];
        const Eigen::VectorXd scores = classifiers::predict_scores(model, batch.features);
        EvalRecord record;
        record.index = batch.time_index && !batch.time_index->empty()
                           ? static_cast<double>(batch.time_index->front())
                           : static_cast<double>(t);
        record.metric = metric;
        record.value = evaluate(metric, scores, batch.labels, threshold);
        record.ci_half_width = 0.0;
        records.push_back(std::move(record));
    }
    return records;
}

ConfidenceInterval confidence_interval(const std::vector<double>& values) {
    if (values.size() < 2) {
        throw PreconditionError("a confidence interval needs at least two replicates");
    }
    const double m = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / m;
    double squared = 0.0;
    for (double value : values) {
        squared += (value - mean) * (value - mean);
    }
    const double sample_sd = std::sqrt(squared / (m - 1.0));
    return {mean, 1.96 * sample_sd / std::sqrt(m)};
}

TrendTest mann_kendall(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 3) {
        throw PreconditionError("the trend test needs at least three values");
    }
    std::int64_t s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (values[j] > values[i]) {
                ++s;
            } else if (values[j] < values[i]) {
                --s;
            }
        }
    }

    // Tie-corrected variance: [n(n-1)(2n+5) - sum t(t-1)(2t+5)]/18 over tie
    // groups of size t.
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const double dn = static_cast<double>(n);
    double variance = dn * (dn - 1.0) * (2.0 * dn + 5.0);
    std::size_t at = 0;
    while (at < n) {
        std::size_t stop = at;
        while (stop + 1 < n && sorted[stop + 1] == sorted[at]) {
            ++stop;
        }
        const double t = static_cast<double>(stop - at + 1);
        if (t > 1.0) {
            variance -= t * (t - 1.0) * (2.0 * t + 5.0);
        }
        at = stop + 1;
    }
    variance /= 18.0;

    TrendTest result;
    result.s_statistic = static_cast<double>(s);
    if (variance <= 0.0 || s == 0) {
        result.z = 0.0;
        result.p_value = 1.0;
        return result;
    }
    const double shifted = s > 0 ? static_cast<double>(s) - 1.0 : static_cast<double>(s) + 1.0;
    result.z = shifted / std::sqrt(variance);
    result.p_value = std::erfc(std::abs(result.z) / std::sqrt(2.0));
    return result;
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ShapeError("paired sequences must have equal length");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw PreconditionError("rank correlation needs at least two pairs");
    }
    std::int64_t concordant_minus_discordant = 0;
    std::int64_t tied_a = 0;
    std::int64_t tied_b = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double da = a[j] - a[i];
            const double db = b[j] - b[i];
            if (da == 0.0) {
                ++tied_a;
            }
            if (db == 0.0) {
                ++tied_b;
            }
            if (da != 0.0 && db != 0.0) {
                concordant_minus_discordant += (da > 0.0) == (db > 0.0) ? 1 : -1;
            }
        }
    }
    const double total_pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double denom_a = total_pairs - static_cast<double>(tied_a);
    const double denom_b = total_pairs - static_cast<double>(tied_b);
    if (denom_a <= 0.0 || denom_b <= 0.0) {
        throw DegenerateInputError("rank correlation is undefined for a fully tied sequence");
    }
    return static_cast<double>(concordant_minus_discordant) / std::sqrt(denom_a * denom_b);
}

} // namespace illusion::metrics
