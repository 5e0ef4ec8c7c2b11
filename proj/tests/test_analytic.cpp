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

#include <illusion/analytic.hpp>
#include <illusion/errors.hpp>
#include <illusion/rng.hpp>

#include <Eigen/Core>

#include <cmath>
#include <vector>

using namespace illusion;
using namespace illusion::analytic;

namespace {

Eigen::MatrixXd equicorr_entries(int d, double rho) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, rho);
    m.diagonal().setOnes();
    return m;
}

// Valid (d, rho, tau) triple drawn from the admissible region: rho above
// -1/(d-1), below 1, and tau small enough that the full matrix stays
// positive semidefinite (tau^2 <= (1 + (d-1)rho)/d).
EquicorrSpec random_valid_spec(rng::Rng& rng, int d_max) {
    const int d = 1 + static_cast<int>(rng.uniform() * d_max);
    const double rho_low = d > 1 ? -0.9 / (d - 1) : -0.9;
    const double rho = rho_low + rng.uniform() * (0.95 - rho_low);
    const double tau_cap = std::sqrt((1.0 + (d - 1) * rho) / d);
    const double tau = (rng.uniform() * 1.9 - 0.95) * tau_cap;
    return EquicorrSpec(d, rho, tau);
}

} // namespace

// ============================================================================
// Equicorrelated variance curves
// ============================================================================

TEST_CASE("one predictor explains tau squared of the response variance") {
    const EquicorrSpec spec(1, 0.5, 0.5);
    CHECK(conditional_variance(spec) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("two equicorrelated predictors at rho 0.5 leave two thirds") {
    const EquicorrSpec spec(2, 0.5, 0.5);
    const double closed = conditional_variance(spec);
    CHECK(closed == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(conditional_variance_reduced(spec) - closed) < 1e-12);
    CHECK(std::abs(conditional_variance_numeric(spec) - closed) < 1e-10);
}

TEST_CASE("closed, reduced and numeric forms agree across the valid region") {
    rng::Rng rng(2024);
    for (int trial = 0; trial < 120; ++trial) {
        const EquicorrSpec spec = random_valid_spec(rng, 50);
        const double closed = conditional_variance(spec);
        CHECK(std::abs(closed - conditional_variance_reduced(spec)) < 1e-12);
        CHECK(std::abs(closed - conditional_variance_numeric(spec)) < 1e-10);
        CHECK(closed >= -1e-12);
        CHECK(closed <= 1.0 + 1e-12);
    }
}

TEST_CASE("adding a second predictor at rho 0.5 removes one twelfth") {
    const EquicorrSpec spec(1, 0.5, 0.5);
    CHECK(std::abs(variance_reduction(spec) - 1.0 / 12.0) < 1e-14);
}

TEST_CASE("variance reduction equals the difference of adjacent curve points") {
    for (const double rho : {0.1, 0.3, 0.6}) {
        for (int d = 1; d <= 12; ++d) {
            const EquicorrSpec here(d, rho, 0.4);
            const EquicorrSpec next(d + 1, rho, 0.4);
            const double diff = conditional_variance(here) - conditional_variance(next);
            CHECK(std::abs(variance_reduction(here) - diff) < 1e-12);
        }
    }
}

TEST_CASE("independent predictors each remove exactly tau squared") {
    const double tau = 0.3;
    for (int d = 1; d <= 10; ++d) {
        const EquicorrSpec spec(d, 0.0, tau);
        CHECK(std::abs(variance_reduction(spec) - tau * tau) < 1e-14);
    }
}

TEST_CASE("positive correlation makes successive contributions shrink") {
    for (const double rho : {0.2, 0.5, 0.8}) {
        double previous = variance_reduction(EquicorrSpec(1, rho, 0.4));
        for (int d = 2; d <= 30; ++d) {
            const double current = variance_reduction(EquicorrSpec(d, rho, 0.4));
            CHECK(current < previous);
            previous = current;
        }
    }
}

TEST_CASE("the many-predictor limit floors the curve when rho dominates") {
    const EquicorrSpec probe(1, 0.9, 0.5);
    const double limit = conditional_variance_limit(probe);
    CHECK(limit == doctest::Approx(1.0 - 0.25 / 0.9).epsilon(1e-15));
    double previous = 10.0;
    for (int d = 1; d <= 60; ++d) {
        const double v = conditional_variance(EquicorrSpec(d, 0.9, 0.5));
        CHECK(v > limit);
        CHECK(v < previous);
        previous = v;
    }
    CHECK(conditional_variance(EquicorrSpec(10, 0.9, 0.5)) - limit < 0.01);
}

TEST_CASE("the limit requires positive inter-predictor correlation") {
    const EquicorrSpec spec(1, 0.0, 0.5);
    CHECK_THROWS_AS(conditional_variance_limit(spec), PreconditionError);
}

TEST_CASE("parameter ranges are enforced at construction") {
    CHECK_THROWS_AS(EquicorrSpec(0, 0.5, 0.5), ConstraintError);
    CHECK_THROWS_AS(EquicorrSpec(2, 0.5, 1.2), ConstraintError);
    CHECK_THROWS_AS(EquicorrSpec(2, -1.0, 0.1), ConstraintError);
    CHECK_THROWS_AS(EquicorrSpec(2, 1.0, 0.1), ConstraintError);
    // Individually admissible parameters whose joint matrix is indefinite:
    // four independent predictors cannot each correlate 0.6 with the response.
    CHECK_THROWS_AS(EquicorrSpec(4, 0.0, 0.6), ValidityError);
}

TEST_CASE("the assembled matrix has the documented block structure") {
    const EquicorrSpec spec(3, 0.4, 0.2);
    const Eigen::MatrixXd sigma = build_equicorr_sigma(spec);
    REQUIRE(sigma.rows() == 4);
    REQUIRE(sigma.cols() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(sigma(i, i) == 1.0);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i != j) {
                CHECK(sigma(i, j) == 0.4);
            }
        }
        CHECK(sigma(i, 3) == 0.2);
        CHECK(sigma(3, i) == 0.2);
    }
}

// ============================================================================
// Flat-maximum bound
// ============================================================================

TEST_CASE("uncorrelated variables give a vacuous bound of zero") {
    const CorrMatrix corr(Eigen::MatrixXd::Identity(3, 3));
    CHECK(flat_maximum_bound(corr) == 0.0);
    CHECK(smallest_row_average(corr) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("equicorrelated variables give the common correlation as bound") {
    const CorrMatrix corr(equicorr_entries(3, 0.8));
    CHECK(flat_maximum_bound(corr) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(smallest_row_average(corr) == doctest::Approx(2.6 / 3.0).epsilon(1e-15));
}

TEST_CASE("the guaranteed bound never exceeds the smallest row average") {
    rng::Rng rng(11);
    for (int m = 0; m < 30; ++m) {
        const CorrMatrix corr = random_nonneg_corr(2 + m % 7, rng);
        CHECK(flat_maximum_bound(corr) <= smallest_row_average(corr) + 1e-12);
    }
}

TEST_CASE("a weighted sum correlates perfectly with itself") {
    const CorrMatrix corr(equicorr_entries(4, 0.3));
    Eigen::VectorXd w(4);
    w << 0.1, 0.2, 0.3, 0.4;
    CHECK(weighted_sum_correlation(w, w, corr) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("disjoint weights expose the underlying pairwise correlation") {
    Eigen::VectorXd w(2);
    Eigen::VectorXd v(2);
    w << 1.0, 0.0;
    v << 0.0, 1.0;
    const CorrMatrix independent(Eigen::MatrixXd::Identity(2, 2));
    CHECK(weighted_sum_correlation(w, v, independent) == doctest::Approx(0.0).scale(1));
    const CorrMatrix half(equicorr_entries(2, 0.5));
    CHECK(weighted_sum_correlation(w, v, half) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("equal weights stay within the bound over random convex weights") {
    const CorrMatrix corr(equicorr_entries(4, 0.5));
    const double bound = flat_maximum_bound(corr);
    CHECK(bound == doctest::Approx(0.5).epsilon(1e-15));
    const Eigen::VectorXd equal = Eigen::VectorXd::Constant(4, 0.25);
    rng::Rng rng(77);
    for (int i = 0; i < 2000; ++i) {
        const Eigen::VectorXd w = random_convex_weights(4, rng);
        CHECK(weighted_sum_correlation(equal, w, corr) >= bound - 1e-9);
    }
}

TEST_CASE("random nonnegative matrices also respect the bound") {
    rng::Rng rng(78);
    for (int m = 0; m < 5; ++m) {
        const int d = 3 + m;
        const CorrMatrix corr = random_nonneg_corr(d, rng);
        const double bound = flat_maximum_bound(corr);
        const Eigen::VectorXd equal = Eigen::VectorXd::Constant(d, 1.0 / d);
        for (int i = 0; i < 500; ++i) {
            const Eigen::VectorXd w = random_convex_weights(d, rng);
            CHECK(weighted_sum_correlation(equal, w, corr) >= bound - 1e-9);
        }
    }
}

TEST_CASE("bound functions demand nonnegative correlations") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, -0.5, -0.5, 1.0;
    const CorrMatrix corr(m);
    CHECK_THROWS_AS(flat_maximum_bound(corr), PreconditionError);
    CHECK_THROWS_AS(smallest_row_average(corr), PreconditionError);
}

TEST_CASE("weighted sums demand convex weights") {
    const CorrMatrix corr(equicorr_entries(2, 0.5));
    Eigen::VectorXd ok(2);
    ok << 0.5, 0.5;
    Eigen::VectorXd wrong_sum(2);
    wrong_sum << 0.5, 0.6;
    Eigen::VectorXd negative(2);
    negative << -0.1, 1.1;
    Eigen::VectorXd short_vec(1);
    short_vec << 1.0;
    CHECK_THROWS_AS(weighted_sum_correlation(wrong_sum, ok, corr), PreconditionError);
    CHECK_THROWS_AS(weighted_sum_correlation(ok, negative, corr), PreconditionError);
    CHECK_THROWS_AS(weighted_sum_correlation(short_vec, ok, corr), ShapeError);
}

TEST_CASE("a composite with zero variance has no defined correlation") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, -1.0, -1.0, 1.0;
    const CorrMatrix corr(m);
    Eigen::VectorXd w(2);
    w << 0.5, 0.5;
    Eigen::VectorXd v(2);
    v << 1.0, 0.0;
    CHECK_THROWS_AS(weighted_sum_correlation(w, v, corr), DegenerateInputError);
}

TEST_CASE("correlation matrix construction validates its input") {
    CHECK_THROWS_AS(CorrMatrix(Eigen::MatrixXd::Zero(2, 3)), ConstraintError);
    Eigen::MatrixXd bad_diag = Eigen::MatrixXd::Identity(2, 2);
    bad_diag(0, 0) = 0.9;
    CHECK_THROWS_AS(CorrMatrix{bad_diag}, ConstraintError);
    Eigen::MatrixXd asym = equicorr_entries(2, 0.5);
    asym(0, 1) = 0.2;
    CHECK_THROWS_AS(CorrMatrix{asym}, ConstraintError);
    Eigen::MatrixXd wide = equicorr_entries(2, 1.5);
    CHECK_THROWS_AS(CorrMatrix{wide}, ConstraintError);
    // Entries in range but jointly impossible: x1 and x2 both correlate 0.9
    // with x3 yet -0.9 with each other.
    Eigen::MatrixXd indefinite(3, 3);
    indefinite << 1.0, -0.9, 0.9, -0.9, 1.0, 0.9, 0.9, 0.9, 1.0;
    CHECK_THROWS_AS(CorrMatrix{indefinite}, ValidityError);
}

TEST_CASE("random correlation matrices are valid, nonnegative and seeded") {
    rng::Rng rng(13);
    const CorrMatrix corr = random_nonneg_corr(5, rng);
    CHECK(corr.size() == 5);
    CHECK(corr.entries().minCoeff() >= 0.0);
    for (int i = 0; i < 5; ++i) {
        CHECK(corr.entries()(i, i) == 1.0);
    }
    rng::Rng again(13);
    const CorrMatrix repeat = random_nonneg_corr(5, again);
    CHECK((corr.entries() - repeat.entries()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random convex weights lie on the simplex and are seeded") {
    rng::Rng rng(14);
    const Eigen::VectorXd w = random_convex_weights(6, rng);
    CHECK(w.size() == 6);
    CHECK(w.minCoeff() >= 0.0);
    CHECK(std::abs(w.sum() - 1.0) < 1e-12);
    rng::Rng again(14);
    const Eigen::VectorXd repeat = random_convex_weights(6, again);
    CHECK((w - repeat).cwiseAbs().maxCoeff() == 0.0);
}

// ============================================================================
// Label-noise odds correction
// ============================================================================

TEST_CASE("the noise model records its odds distortion") {
    const NoiseModel noise(0.1);
    CHECK(noise.delta == 0.1);
    CHECK(noise.epsilon == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("even odds are a fixed point of the noise distortion") {
    for (const double delta : {0.0, 0.1, 0.3, 0.49}) {
        CHECK(noisy_odds(1.0, NoiseModel(delta)) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("zero noise leaves odds untouched") {
    const NoiseModel clean(0.0);
    for (const double r : {0.0, 0.2, 1.0, 3.0, 50.0}) {
        CHECK(noisy_odds(r, clean) == r);
        CHECK(true_odds_from_noisy(r, clean) == r);
    }
}

TEST_CASE("ten percent noise shrinks odds of three to thirty over nine minus") {
    CHECK(noisy_odds(3.0, NoiseModel(0.1)) ==
          doctest::Approx(2.333333333333333).epsilon(1e-12));
}

TEST_CASE("threshold correction compensates the distortion") {
    CHECK(corrected_threshold(1.0, NoiseModel(0.1)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(corrected_threshold(2.0, NoiseModel(0.1)) ==
          doctest::Approx(19.0 / 11.0).epsilon(1e-12));
}

TEST_CASE("recovering clean odds inverts the distortion across a grid") {
    for (const double delta : {0.05, 0.2, 0.4}) {
        const NoiseModel noise(delta);
        for (const double r : {0.1, 0.5, 1.0, 2.0, 7.0}) {
            const double round_trip = true_odds_from_noisy(noisy_odds(r, noise), noise);
            CHECK(round_trip == doctest::Approx(r).epsilon(1e-12));
        }
    }
}

TEST_CASE("corrected decisions on noisy odds match clean decisions") {
    const std::vector<double> odds = {0.05, 0.3, 0.9, 1.5, 2.0, 3.1, 10.0};
    const std::vector<double> thresholds = {0.5, 1.0, 2.0, 3.0};
    for (const double delta : {0.05, 0.2, 0.35}) {
        const NoiseModel noise(delta);
        for (const double k : thresholds) {
            const double k_star = corrected_threshold(k, noise);
            for (const double r : odds) {
                const bool clean_decision = r > k;
                const bool noisy_decision = noisy_odds(r, noise) > k_star;
                CHECK(clean_decision == noisy_decision);
            }
        }
    }
}

TEST_CASE("noise parameters beyond a half are rejected") {
    CHECK_THROWS_AS(NoiseModel(0.5), ConstraintError);
    CHECK_THROWS_AS(NoiseModel(-0.01), ConstraintError);
    CHECK_NOTHROW(NoiseModel(0.0));
    CHECK_NOTHROW(NoiseModel(0.499));
}

TEST_CASE("odds arguments outside their reachable ranges are rejected") {
    const NoiseModel noise(0.1);
    CHECK_THROWS_AS(noisy_odds(-0.5, noise), PreconditionError);
    // Observed odds can never fall below epsilon under this noise level.
    CHECK_THROWS_AS(true_odds_from_noisy(0.05, noise), PreconditionError);
    CHECK_THROWS_AS(corrected_threshold(0.0, noise), PreconditionError);
}
