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
#include <illusion/analytic.hpp>

#include <illusion/errors.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace illusion::analytic {

namespace {

constexpr double kPsdTolerance = 1e-9;

void require_psd(const Eigen::MatrixXd& matrix, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues().minCoeff();
    if (smallest < -kPsdTolerance) {
        throw ValidityError(std::string(what) +
                            " is not positive semidefinite: smallest eigenvalue " +
                            std::to_string(smallest));
    }
}

} // namespace

// ============================================================================
// Equicorrelated predictor model
// ============================================================================

EquicorrSpec::EquicorrSpec(int d_, double rho_, double tau_) : d(d_), rho(rho_), tau(tau_) {
    if (d < 1) {
        throw ConstraintError("predictor count must be at least 1, got " + std::to_string(d));
    }
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw ConstraintError("predictor-response correlation must lie in [-1, 1], got " +
                              std::to_string(tau));
    }
    const double lower = d == 1 ? -std::numeric_limits<double>::infinity()
                                : -1.0 / static_cast<double>(d - 1);
    if (!(rho > lower && rho < 1.0)) {
        throw ConstraintError("equicorrelation " + std::to_string(rho) +
                              " outside (" + std::to_string(lower) + ", 1) for d = " +
                              std::to_string(d));
    }
    // Joint feasibility is exactly positive semidefiniteness of the full
    // correlation matrix; the predictor block is already covered by the rho
    // range above, so this catches tau being too large for (d, rho).
    Eigen::MatrixXd sigma(d + 1, d + 1);
    sigma.setConstant(rho);
    sigma.row(d).setConstant(tau);
    sigma.col(d).setConstant(tau);
    sigma.diagonal().setOnes();
    require_psd(sigma, "full correlation matrix");
}

Eigen::MatrixXd build_equicorr_sigma(const EquicorrSpec& spec) {
    Eigen::MatrixXd sigma(spec.d + 1, spec.d + 1);
    sigma.setConstant(spec.rho);
    sigma.row(spec.d).setConstant(spec.tau);
    sigma.col(spec.d).setConstant(spec.tau);
    sigma.diagonal().setOnes();
    return sigma;
}

double conditional_variance(const EquicorrSpec& spec) {
    const double d = spec.d;
    const double rho = spec.rho;
    const double tau = spec.tau;
    return 1.0 - d * tau * tau / (1.0 - rho) +
           rho * d * d * tau * tau / ((1.0 + (d - 1.0) * rho) * (1.0 - rho));
}

double conditional_variance_reduced(const EquicorrSpec& spec) {
    const double d = spec.d;
    return 1.0 - d * spec.tau * spec.tau / (1.0 + (d - 1.0) * spec.rho);
}

double conditional_variance_numeric(const EquicorrSpec& spec) {
    const Eigen::MatrixXd sigma = build_equicorr_sigma(spec);
    const int d = spec.d;
    const Eigen::MatrixXd predictor_block = sigma.topLeftCorner(d, d);
    const Eigen::VectorXd cross = sigma.topRightCorner(d, 1);
    Eigen::LLT<Eigen::MatrixXd> llt(predictor_block);
    if (llt.info() != Eigen::Success) {
        throw ValidityError("predictor correlation block is not positive definite");
    }
    return 1.0 - cross.dot(llt.solve(cross));
}

double conditional_variance_limit(const EquicorrSpec& spec) {
    if (!(spec.rho > 0.0)) {
        throw PreconditionError("the many-predictor variance limit requires rho > 0");
    }
    return 1.0 - spec.tau * spec.tau / spec.rho;
}

double variance_reduction(const EquicorrSpec& spec) {
    // Re-validates at d+1; adding a predictor can break joint feasibility
    // even when the current spec is fine.
    const EquicorrSpec next(spec.d + 1, spec.rho, spec.tau);
    const double d = spec.d;
    const double rho = spec.rho;
    const double tau2 = spec.tau * spec.tau;
    const double base = tau2 / (1.0 - rho);
    const double curvature = d * d / (1.0 + (d - 1.0) * rho) -
                             (d + 1.0) * (d + 1.0) / (1.0 + d * rho);
    return base + rho * base * curvature;
}

// ============================================================================
// Flat-maximum bound
// ============================================================================

CorrMatrix::CorrMatrix(Eigen::MatrixXd entries) {
    if (entries.rows() != entries.cols() || entries.rows() < 1) {
        throw ConstraintError("correlation matrix must be square and nonempty");
    }
    const Eigen::Index d = entries.rows();
    const double asymmetry = (entries - entries.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > kPsdTolerance) {
        throw ConstraintError("correlation matrix asymmetry " + std::to_string(asymmetry) +
                              " exceeds tolerance");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        if (entries(i, i) != 1.0) {
            throw ConstraintError("correlation matrix diagonal must be exactly 1");
        }
    }
    const double largest = entries.cwiseAbs().maxCoeff();
    if (largest > 1.0 + kPsdTolerance) {
        throw ConstraintError("correlation entries must lie in [-1, 1], largest magnitude " +
                              std::to_string(largest));
    }
    entries_ = ((entries + entries.transpose()) / 2.0)
                   .cwiseMax(-1.0)
                   .cwiseMin(1.0);
    entries_.diagonal().setOnes();
    require_psd(entries_, "correlation matrix");
}

namespace {

void require_nonnegative(const CorrMatrix& corr) {
    if (corr.entries().minCoeff() < 0.0) {
        throw PreconditionError("bound requires all correlations to be nonnegative");
    }
}

} // namespace

double flat_maximum_bound(const CorrMatrix& corr) {
    require_nonnegative(corr);
    return corr.entries().rowwise().minCoeff().mean();
}

double smallest_row_average(const CorrMatrix& corr) {
    require_nonnegative(corr);
    return corr.entries().rowwise().mean().minCoeff();
}

namespace {

// The correlation itself is scale invariant, but the bound this function
// supports is stated for convex weights, so the contract demands them.
void require_convex_weights(const Eigen::VectorXd& w, const char* which) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < 0.0) {
            throw PreconditionError(std::string(which) + " weights must be nonnegative");
        }
        total += w(i);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw PreconditionError(std::string(which) + " weights must sum to 1");
    }
}

} // namespace

double weighted_sum_correlation(const Eigen::VectorXd& w,
                                const Eigen::VectorXd& v,
                                const CorrMatrix& corr) {
    const Eigen::Index d = corr.size();
    if (w.size() != d || v.size() != d) {
        throw ShapeError("weight vector length does not match correlation matrix size");
    }
    require_convex_weights(w, "first");
    require_convex_weights(v, "second");
    const Eigen::MatrixXd& sigma = corr.entries();
    const double var_w = w.dot(sigma * w);
    const double var_v = v.dot(sigma * v);
    constexpr double kVarianceFloor = 1e-300;
    if (var_w <= kVarianceFloor || var_v <= kVarianceFloor) {
        throw DegenerateInputError("weighted sum has zero variance");
    }
    return w.dot(sigma * v) / std::sqrt(var_w * var_v);
}

CorrMatrix random_nonneg_corr(int d, rng::Rng& rng) {
    if (d < 1) {
        throw PreconditionError("correlation matrix size must be at least 1");
    }
    Eigen::MatrixXd factors(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            factors(i, j) = rng.uniform();
        }
    }
    const Eigen::MatrixXd gram = factors * factors.transpose();
    Eigen::MatrixXd corr(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            corr(i, j) = gram(i, j) / std::sqrt(gram(i, i) * gram(j, j));
        }
    }
    corr = ((corr + corr.transpose()) / 2.0).cwiseMin(1.0).eval();
    corr.diagonal().setOnes();
    return CorrMatrix(corr);
}

Eigen::VectorXd random_convex_weights(int d, rng::Rng& rng) {
    if (d < 1) {
        throw PreconditionError("weight vector length must be at least 1");
    }
    Eigen::VectorXd weights(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        // -log(1 - U) is a unit exponential; normalizing yields a uniform
        // draw from the simplex.
        weights(i) = -std::log(1.0 - rng.uniform());
    }
    return weights / weights.sum();
}

// ============================================================================
// Label-noise odds correction
// ============================================================================

NoiseModel::NoiseModel(double delta_) : delta(delta_), epsilon(0.0) {
    if (!(delta >= 0.0 && delta < 0.5)) {
        throw ConstraintError("flip probability must lie in [0, 0.5), got " +
                              std::to_string(delta));
    }
    epsilon = delta / (1.0 - delta);
}

double noisy_odds(double r, const NoiseModel& noise) {
    if (!(r >= 0.0)) {
        throw PreconditionError("conditional odds must be nonnegative");
    }
    return (r + noise.epsilon) / (noise.epsilon * r + 1.0);
}

double true_odds_from_noisy(double r_star, const NoiseModel& noise) {
    const double eps = noise.epsilon;
    if (!(r_star >= eps) || (eps > 0.0 && !(eps * r_star < 1.0))) {
        throw PreconditionError("observed odds outside the range reachable under this noise level");
    }
    return (r_star - eps) / (1.0 - eps * r_star);
}

double corrected_threshold(double k, const NoiseModel& noise) {
    if (!(k > 0.0)) {
        throw PreconditionError("threshold odds must be positive");
    }
    return (k + noise.epsilon) / (noise.epsilon * k + 1.0);
}

} // namespace illusion::analytic
