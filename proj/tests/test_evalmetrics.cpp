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
#include <doctest.h>

#include <illusion/classifiers.hpp>
#include <illusion/errors.hpp>
#include <illusion/evalmetrics.hpp>
#include <illusion/rng.hpp>
#include <illusion/synthdata.hpp>

#include <Eigen/Core>

#include <cmath>
#include <numeric>
#include <vector>

using namespace illusion;
using namespace illusion::metrics;

namespace {

synth::GaussianClassSpec separated_pair(double prior1 = 0.5) {
    Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd mu1 = Eigen::VectorXd::Zero(2);
    mu1(0) = 2.0;
    return synth::GaussianClassSpec(mu0, mu1, Eigen::MatrixXd::Identity(2, 2), prior1);
}

double brute_force_auc(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    long pairs = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (labels[static_cast<std::size_t>(i)] != 1) {
            continue;
        }
        for (Eigen::Index j = 0; j < scores.size(); ++j) {
            if (labels[static_cast<std::size_t>(j)] != 0) {
                continue;
            }
            ++pairs;
            if (scores(i) > scores(j)) {
                wins += 1.0;
            } else if (scores(i) == scores(j)) {
                wins += 0.5;
            }
        }
    }
    return wins / static_cast<double>(pairs);
}

} // namespace

// ============================================================================
// Scalar metrics
// ============================================================================

TEST_CASE("perfect scores are perfect under every measure") {
    Eigen::VectorXd scores(6);
    scores << 0.0, 1.0, 1.0, 0.0, 1.0, 0.0;
    const std::vector<int> labels = {0, 1, 1, 0, 1, 0};
    CHECK(evaluate(MetricKind::error_rate(), scores, labels) == 0.0);
    CHECK(evaluate(MetricKind::cost_weighted(3.0), scores, labels, 3.0) == 0.0);
    CHECK(evaluate(MetricKind::brier(), scores, labels) == 0.0);
    CHECK(evaluate(MetricKind::auc(), scores, labels) == 1.0);
}

TEST_CASE("unit cost ratio reduces the cost measure to the error rate") {
    rng::Rng rng(17);
    Eigen::VectorXd scores(50);
    std::vector<int> labels(50);
    for (int i = 0; i < 50; ++i) {
        scores(i) = rng.uniform();
        labels[static_cast<std::size_t>(i)] = rng.bernoulli(0.4) ? 1 : 0;
    }
    const double error = evaluate(MetricKind::error_rate(), scores, labels);
    const double cost = evaluate(MetricKind::cost_weighted(1.0), scores, labels);
    CHECK(cost == error);
}

TEST_CASE("matching the cost ratio to the prior odds equalizes blanket rules") {
    // Eleven rows, eight of class 0: with c0/c1 = 3/8 the cost of rejecting
    // everyone equals the cost of accepting everyone, exactly.
    const std::vector<int> labels = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
    const double ratio = 3.0 / 8.0;
    const Eigen::VectorXd all_zero = Eigen::VectorXd::Zero(11);
    const Eigen::VectorXd all_one = Eigen::VectorXd::Ones(11);
    const MetricKind cost = MetricKind::cost_weighted(ratio);
    const double reject_everyone = evaluate(cost, all_zero, labels, 1.0);
    const double accept_everyone = evaluate(cost, all_one, labels, 1.0);
    CHECK(reject_everyone == accept_everyone);
    CHECK(reject_everyone == doctest::Approx(3.0 / 11.0).epsilon(1e-15));
}

TEST_CASE("squared-error scoring matches the hand-computed value") {
    Eigen::VectorXd scores(2);
    scores << 0.8, 0.3;
    const std::vector<int> labels = {1, 0};
    CHECK(evaluate(MetricKind::brier(), scores, labels) ==
          doctest::Approx(0.065).epsilon(1e-15));
}

TEST_CASE("ranking quality matches the worked four-row example") {
    Eigen::VectorXd scores(4);
    scores << 0.1, 0.4, 0.35, 0.8;
    const std::vector<int> labels = {0, 0, 1, 1};
    CHECK(evaluate(MetricKind::auc(), scores, labels) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("constant scores rank at exactly one half") {
    const Eigen::VectorXd scores = Eigen::VectorXd::Constant(10, 0.4);
    const std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    CHECK(evaluate(MetricKind::auc(), scores, labels) == 0.5);
}

TEST_CASE("ranking quality equals exhaustive pairwise comparison") {
    rng::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 5 + static_cast<int>(rng.uniform() * 75);
        Eigen::VectorXd scores(n);
        std::vector<int> labels(static_cast<std::size_t>(n));
        bool has_both = false;
        do {
            for (int i = 0; i < n; ++i) {
                // Coarse grid scores so ties actually occur.
                scores(i) = std::floor(rng.uniform() * 8.0) / 8.0;
                labels[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? 1 : 0;
            }
            int ones = std::accumulate(labels.begin(), labels.end(), 0);
            has_both = ones > 0 && ones < n;
        } while (!has_both);
        const double fast = evaluate(MetricKind::auc(), scores, labels);
        const double slow = brute_force_auc(scores, labels);
        CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    }
}

TEST_CASE("ranking quality is invariant to order-preserving score maps") {
    rng::Rng rng(29);
    Eigen::VectorXd scores(60);
    std::vector<int> labels(60);
    for (int i = 0; i < 60; ++i) {
        scores(i) = std::floor(rng.uniform() * 10.0) / 10.0;
        labels[static_cast<std::size_t>(i)] = i % 3 == 0 ? 1 : 0;
    }
    const Eigen::VectorXd squared = scores.array().square();
    const double before = evaluate(MetricKind::auc(), scores, labels);
    const double after = evaluate(MetricKind::auc(), squared, labels);
    CHECK(before == doctest::Approx(after).epsilon(1e-12));
}

TEST_CASE("evaluation enforces its contract") {
    Eigen::VectorXd scores(2);
    scores << 0.2, 0.8;
    const std::vector<int> labels = {0, 1};
    CHECK_THROWS_AS(evaluate(MetricKind::error_rate(), scores, {0, 1, 1}), ShapeError);
    CHECK_THROWS_AS(evaluate(MetricKind::error_rate(), Eigen::VectorXd(), {}),
                    PreconditionError);
    Eigen::VectorXd wild(2);
    wild << -0.1, 0.5;
    CHECK_THROWS_AS(evaluate(MetricKind::error_rate(), wild, labels), PreconditionError);
    CHECK_THROWS_AS(evaluate(MetricKind::error_rate(), scores, labels, 0.0),
                    PreconditionError);
    CHECK_THROWS_AS(evaluate(MetricKind::auc(), scores, {1, 1}), PreconditionError);
    CHECK_THROWS_AS(evaluate(MetricKind::quantity(), scores, labels), PreconditionError);
    CHECK_THROWS_AS(MetricKind::cost_weighted(0.0), ConstraintError);
    CHECK_THROWS_AS(MetricKind::cost_weighted(-2.0), ConstraintError);
}

TEST_CASE("metric names round-trip") {
    for (const MetricId id : {MetricId::error_rate, MetricId::cost_weighted, MetricId::brier,
                              MetricId::auc, MetricId::quantity}) {
        CHECK(metric_id_from_string(to_string(id)) == id);
    }
    CHECK_THROWS_AS(metric_id_from_string("accuracy"), Error);
}

// ============================================================================
// Achievable-gap proportion
// ============================================================================

TEST_CASE("the gap proportion reproduces the ten reference rows") {
    struct Row {
        double m0, m_simple, m_best, expected;
    };
    // Frozen from exact arithmetic on the published error-rate triples.
    const std::vector<Row> rows = {
        {0.760, 0.083, 0.0140, 0.90750670241286868},
        {0.350, 0.221, 0.1979, 0.84812623274161725},
        {0.386, 0.046, 0.0270, 0.94707520891364916},
        {0.750, 0.216, 0.1450, 0.88264462809917366},
        {0.758, 0.160, 0.0850, 0.88855869242199104},
        {0.560, 0.141, 0.1410, 1.0},
        {0.475, 0.057, 0.0330, 0.94570135746606343},
        {0.667, 0.004, 0.0035, 0.99924642049736234},
        {0.900, 0.265, 0.2650, 1.0},
        {0.345, 0.038, 0.0260, 0.96238244514106597},
    };
    for (const Row& row : rows) {
        CHECK(proportion_achievable(row.m0, row.m_simple, row.m_best) ==
              doctest::Approx(row.expected).epsilon(1e-12));
    }
}

TEST_CASE("the gap proportion is scale invariant and handles its edges") {
    const double base = proportion_achievable(0.6, 0.2, 0.1);
    CHECK(proportion_achievable(0.3, 0.1, 0.05) == doctest::Approx(base).epsilon(1e-12));
    CHECK(proportion_achievable(0.6, 0.6, 0.1) == 0.0);
    CHECK(proportion_achievable(0.6, 0.1, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(proportion_achievable(0.5, 0.5, 0.5), DegenerateInputError);
    CHECK_THROWS_AS(proportion_achievable(0.2, 0.4, 0.1), PreconditionError);
    CHECK_THROWS_AS(proportion_achievable(0.2, -0.1, 0.1), PreconditionError);
}

// ============================================================================
// Smallest achievable error
// ============================================================================

TEST_CASE("two unit-separated classes floor at about one in six") {
    Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd mu1 = Eigen::VectorXd::Ones(1) * 2.0;
    const synth::GaussianClassSpec spec(mu0, mu1, Eigen::MatrixXd::Identity(1, 1), 0.5);
    CHECK(bayes_error_gaussian(spec) ==
          doctest::Approx(0.15865525393145707).epsilon(1e-12));
}

TEST_CASE("coincident classes floor at the smaller prior") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(2);
    const synth::GaussianClassSpec spec(mu, mu, Eigen::MatrixXd::Identity(2, 2), 0.3);
    CHECK(bayes_error_gaussian(spec) == 0.3);
    const synth::GaussianClassSpec other(mu, mu, Eigen::MatrixXd::Identity(2, 2), 0.8);
    CHECK(bayes_error_gaussian(other) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("an unequal prior shifts the floor to the frozen value") {
    const synth::GaussianClassSpec spec = separated_pair(0.7);
    CHECK(bayes_error_gaussian(spec) ==
          doctest::Approx(0.13874852997086579).epsilon(1e-12));
}

TEST_CASE("the closed-form floor matches a large Monte Carlo experiment") {
    const synth::GaussianClassSpec spec = separated_pair(0.7);
    const Dataset sample = synth::gen_gaussian_two_class(spec, 1000000, 971);
    const double prior_odds = 0.7 / 0.3;
    Eigen::Index mistakes = 0;
    for (Eigen::Index i = 0; i < sample.rows(); ++i) {
        const double odds = prior_odds * std::exp((*sample.latent_score)(i));
        const int decision = odds > 1.0 ? 1 : 0;
        mistakes += decision != sample.labels[static_cast<std::size_t>(i)];
    }
    const double empirical =
        static_cast<double>(mistakes) / static_cast<double>(sample.rows());
    CHECK(std::abs(empirical - bayes_error_gaussian(spec)) < 0.002);
}

// ============================================================================
// Curve smoothing
// ============================================================================

TEST_CASE("smoothing a constant sequence returns it unchanged") {
    Eigen::VectorXd x(8);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(8, 1.7);
    for (int i = 0; i < 8; ++i) {
        x(i) = static_cast<double>(i);
    }
    const Eigen::VectorXd smooth = lowess_smooth(x, y, 0.5);
    CHECK((smooth.array() - 1.7).abs().maxCoeff() < 1e-12);
}

TEST_CASE("smoothing reproduces straight lines exactly") {
    Eigen::VectorXd x(12);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) {
        x(i) = static_cast<double>(i);
        y(i) = 0.5 * x(i) + 1.0;
    }
    for (const double span : {0.4, 0.7, 1.0}) {
        const Eigen::VectorXd smooth = lowess_smooth(x, y, span);
        CHECK((smooth - y).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("smoothing matches the weighted-least-squares reference values") {
    Eigen::VectorXd x(10);
    Eigen::VectorXd y(10);
    x << 0.0, 0.4, 1.1, 1.5, 2.2, 3.0, 3.1, 4.0, 5.2, 6.0;
    y << 1.0, 1.4, 0.9, 2.0, 2.3, 1.7, 2.9, 3.1, 2.5, 3.8;
    // Frozen from an independent tricube weighted-least-squares solver.
    Eigen::VectorXd expected(10);
    expected << 1.0756910861682401, 1.1757701546074946, 1.3918741400418484,
        1.7046879896632063, 2.1811703633172939, 2.4002460876247853, 2.4598194320111082,
        2.7294410742801856, 3.1041780458435717, 3.4734639043718545;
    const Eigen::VectorXd smooth = lowess_smooth(x, y, 0.5);
    CHECK((smooth - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("smoothing validates its inputs") {
    Eigen::VectorXd x(4);
    Eigen::VectorXd y(4);
    x << 0.0, 1.0, 2.0, 3.0;
    y << 1.0, 2.0, 1.5, 2.5;
    CHECK_THROWS_AS(lowess_smooth(x, Eigen::VectorXd::Zero(3), 0.5), ShapeError);
    CHECK_THROWS_AS(lowess_smooth(x, y, 0.0), PreconditionError);
    CHECK_THROWS_AS(lowess_smooth(x, y, 1.5), PreconditionError);
    // A span covering fewer than two points cannot fit a line.
    CHECK_THROWS_AS(lowess_smooth(x, y, 0.2), PreconditionError);
    Eigen::VectorXd unsorted(4);
    unsorted << 0.0, 2.0, 1.0, 3.0;
    CHECK_THROWS_AS(lowess_smooth(unsorted, y, 0.5), PreconditionError);
    Eigen::VectorXd tied(4);
    tied << 0.0, 1.0, 1.0, 3.0;
    CHECK_THROWS_AS(lowess_smooth(tied, y, 0.5), PreconditionError);
    CHECK_THROWS_AS(lowess_smooth(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), 1.0),
                    PreconditionError);
}

// ============================================================================
// Temporal evaluation
// ============================================================================

TEST_CASE("temporal evaluation yields one record per batch in time order") {
    const synth::GaussianClassSpec spec = separated_pair();
    const Dataset train = synth::gen_gaussian_two_class(spec, 1000, 201);
    const classifiers::ClassifierModel model = classifiers::fit_lda(train);

    synth::DriftScenario scenario{spec, Eigen::VectorXd::Zero(2)};
    scenario.steps = 24;
    scenario.batch_size = 300;
    const synth::Stream stream = synth::make_drift_stream(scenario, 42);
    const std::vector<EvalRecord> records =
        temporal_evaluate(model, stream, MetricKind::error_rate());
    REQUIRE(records.size() == 24);
    for (std::size_t t = 0; t < records.size(); ++t) {
        CHECK(records[t].index == static_cast<double>(t));
        CHECK(records[t].metric.id == MetricId::error_rate);
    }

    // A frozen model scored on a stationary stream shows no monotone trend.
    std::vector<double> values;
    for (const EvalRecord& record : records) {
        values.push_back(record.value);
    }
    CHECK(mann_kendall(values).p_value > 0.01);
}

TEST_CASE("temporal evaluation exposes drift as rising error") {
    const synth::GaussianClassSpec spec = separated_pair();
    const Dataset train = synth::gen_gaussian_two_class(spec, 1000, 202);
    const classifiers::ClassifierModel model = classifiers::fit_lda(train);

    Eigen::VectorXd velocity(2);
    velocity << 0.25, 0.0;
    synth::DriftScenario scenario{spec, velocity};
    scenario.drift_mu0 = true;
    scenario.steps = 40;
    scenario.batch_size = 200;
    const synth::Stream stream = synth::make_drift_stream(scenario, 43);
    const std::vector<EvalRecord> records =
        temporal_evaluate(model, stream, MetricKind::error_rate());
    double first_quarter = 0.0;
    double last_quarter = 0.0;
    for (int t = 0; t < 10; ++t) {
        first_quarter += records[static_cast<std::size_t>(t)].value;
        last_quarter += records[static_cast<std::size_t>(30 + t)].value;
    }
    CHECK(last_quarter > first_quarter);
}

TEST_CASE("the cost metric thresholds at its ratio unless overridden") {
    const synth::GaussianClassSpec spec = separated_pair();
    const Dataset train = synth::gen_gaussian_two_class(spec, 800, 203);
    const classifiers::ClassifierModel model = classifiers::fit_lda(train);
    synth::DriftScenario scenario{spec, Eigen::VectorXd::Zero(2)};
    scenario.steps = 5;
    scenario.batch_size = 400;
    const synth::Stream stream = synth::make_drift_stream(scenario, 44);

    const MetricKind cost = MetricKind::cost_weighted(3.0);
    const std::vector<EvalRecord> implicit = temporal_evaluate(model, stream, cost);
    const std::vector<EvalRecord> explicit_same =
        temporal_evaluate(model, stream, cost, 3.0);
    const std::vector<EvalRecord> explicit_even =
        temporal_evaluate(model, stream, cost, 1.0);
    bool any_difference = false;
    for (std::size_t t = 0; t < implicit.size(); ++t) {
        CHECK(implicit[t].value == explicit_same[t].value);
        any_difference = any_difference || implicit[t].value != explicit_even[t].value;
    }
    CHECK(any_difference);
}

// ============================================================================
// Replicate summaries
// ============================================================================

TEST_CASE("identical replicates have zero uncertainty") {
    const ConfidenceInterval ci = confidence_interval({0.4, 0.4, 0.4, 0.4});
    CHECK(ci.mean == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(ci.half_width == 0.0);
}

TEST_CASE("a coin-flip pair gives the textbook interval") {
    const ConfidenceInterval ci = confidence_interval({0.0, 1.0});
    CHECK(ci.mean == 0.5);
    CHECK(ci.half_width == doctest::Approx(0.98).epsilon(1e-9));
}

TEST_CASE("the interval shrinks like the square root of the count") {
    const std::vector<double> tiled = {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0};
    const ConfidenceInterval ci = confidence_interval(tiled);
    const double expected = 1.96 * std::sqrt(2.0 / 7.0) / std::sqrt(8.0);
    CHECK(ci.half_width == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ci.half_width < confidence_interval({0.0, 1.0}).half_width);
    CHECK_THROWS_AS(confidence_interval({0.5}), PreconditionError);
}

// ============================================================================
// Trend and rank association
// ============================================================================

TEST_CASE("the trend statistic counts ordered pairs") {
    const TrendTest test = mann_kendall({3.0, 1.0, 2.0});
    CHECK(test.s_statistic == -1.0);
}

TEST_CASE("monotone sequences are decisively trending") {
    std::vector<double> rising(10);
    for (int i = 0; i < 10; ++i) {
        rising[static_cast<std::size_t>(i)] = static_cast<double>(i);
    }
    const TrendTest up = mann_kendall(rising);
    CHECK(up.s_statistic == 45.0);
    CHECK(up.z > 0.0);
    CHECK(up.p_value < 0.01);

    std::vector<double> falling(rising.rbegin(), rising.rend());
    const TrendTest down = mann_kendall(falling);
    CHECK(down.s_statistic == -45.0);
    CHECK(down.z < 0.0);
    CHECK(down.p_value == doctest::Approx(up.p_value).epsilon(1e-12));
}

TEST_CASE("a constant sequence carries no trend evidence") {
    const TrendTest test = mann_kendall({2.0, 2.0, 2.0, 2.0});
    CHECK(test.s_statistic == 0.0);
    CHECK(test.z == 0.0);
    CHECK(test.p_value == 1.0);
    CHECK_THROWS_AS(mann_kendall({1.0, 2.0}), PreconditionError);
}

TEST_CASE("rank correlation handles ties with the tie-adjusted form") {
    CHECK(kendall_tau({1.0, 2.0, 3.0, 4.0}, {10.0, 20.0, 30.0, 40.0}) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kendall_tau({1.0, 2.0, 3.0, 4.0}, {4.0, 3.0, 2.0, 1.0}) ==
          doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(kendall_tau({1.0, 2.0, 2.0, 3.0}, {1.0, 2.0, 3.0, 3.0}) ==
          doctest::Approx(0.8).epsilon(1e-12));
    CHECK_THROWS_AS(kendall_tau({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DegenerateInputError);
    CHECK_THROWS_AS(kendall_tau({1.0, 2.0}, {1.0, 2.0, 3.0}), ShapeError);
}
