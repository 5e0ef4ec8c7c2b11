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

#include <illusion/rng.hpp>

#include <Eigen/Core>

namespace illusion::analytic {

// ============================================================================
// Equicorrelated predictor model
// ============================================================================

/// Parameters of a (d+1)-variate standard Gaussian in which the d predictors
/// are pairwise equicorrelated with correlation rho and each predictor has
/// correlation tau with the response.
///
/// Construction validates:
///  - d >= 1, |tau| <= 1, and rho in (-1/(d-1), 1) (for d = 1 any rho < 1);
///    violations raise ConstraintError
///  - the full (d+1) x (d+1) correlation matrix is positive semidefinite
///    within tolerance 1e-9; violations raise ValidityError naming the
///    smallest eigenvalue
struct EquicorrSpec {
    int d;
    double rho;
    double tau;

    EquicorrSpec(int d, double rho, double tau);
};

/// The full (d+1) x (d+1) correlation matrix: unit diagonal, rho between
/// predictors, tau between each predictor and the response (last position).
Eigen::MatrixXd build_equicorr_sigma(const EquicorrSpec& spec);

/// Residual variance of the response given the d predictors, by the closed
/// form  1 - d*tau^2/(1-rho) + rho*d^2*tau^2 / ((1+(d-1)*rho)*(1-rho)).
double conditional_variance(const EquicorrSpec& spec);

/// Same quantity in the algebraically reduced form 1 - d*tau^2/(1+(d-1)*rho).
double conditional_variance_reduced(const EquicorrSpec& spec);

/// Same quantity computed numerically as the Schur complement
/// sigma_yy - sigma_yx * sigma_xx^-1 * sigma_xy of the assembled matrix.
/// Slower; kept as an independent cross-check of the closed forms.
double conditional_variance_numeric(const EquicorrSpec& spec);

/// Formal d -> infinity limit 1 - tau^2/rho. Pre: rho > 0. The limit is the
/// infimum of the conditional variance when rho >= tau^2, in which case the
/// spec stays valid for every d.
double conditional_variance_limit(const EquicorrSpec& spec);

/// Drop in residual variance when predictor d+1 is added:
///   tau^2/(1-rho) + (rho*tau^2/(1-rho)) * (d^2/(1+(d-1)*rho)
///                                          - (d+1)^2/(1+d*rho)).
/// Pre: the spec must stay valid with d+1 predictors; violations raise the
/// corresponding construction error.
double variance_reduction(const EquicorrSpec& spec);

// ============================================================================
// Flat-maximum bound
// ============================================================================

/// A correlation matrix. Construction requires a square matrix with unit
/// diagonal, symmetry and entries in [-1, 1] within tolerance 1e-9, and
/// positive semidefiniteness within 1e-9 (ValidityError otherwise). The
/// stored matrix is symmetrized and clamped.
class CorrMatrix {
public:
    explicit CorrMatrix(Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const { return entries_; }
    Eigen::Index size() const { return entries_.rows(); }

private:
    Eigen::MatrixXd entries_;
};

/// Guaranteed lower bound on the correlation between any two convex-weighted
/// sums of variables with correlation matrix `corr`: the mean over rows of
/// the smallest entry in each row. Pre: all entries nonnegative
/// (PreconditionError otherwise).
double flat_maximum_bound(const CorrMatrix& corr);

/// The smallest row average of `corr`; never below flat_maximum_bound and
/// kept as the looser descriptive companion. Same nonnegativity pre.
double smallest_row_average(const CorrMatrix& corr);

/// Correlation between w'X and v'X when X has correlation matrix `corr`:
///   w' S v / sqrt((w' S w)(v' S v)).
/// Throws ShapeError on length mismatch and DegenerateInputError when either
/// composite has (numerically) zero variance.
double weighted_sum_correlation(const Eigen::VectorXd& w,
                                const Eigen::VectorXd& v,
                                const CorrMatrix& corr);

/// Correlation matrix with nonnegative entries, built as the normalized Gram
/// matrix of a d x d matrix of uniform [0, 1) draws. Diagonal is set to
/// exactly 1. Pre: d >= 1.
CorrMatrix random_nonneg_corr(int d, rng::Rng& rng);

/// Convex weight vector drawn uniformly from the simplex (normalized unit
/// exponentials). Pre: d >= 1.
Eigen::VectorXd random_convex_weights(int d, rng::Rng& rng);

// ============================================================================
// Label-noise odds correction
// ============================================================================

/// Symmetric label-noise model: each label is flipped independently with
/// probability delta. Construction requires delta in [0, 0.5)
/// (ConstraintError otherwise); past 0.5 the observed classes no longer
/// carry usable information about the clean ones.
struct NoiseModel {
    double delta;
    /// delta / (1 - delta); the odds distortion the noise induces.
    double epsilon;

    explicit NoiseModel(double delta);
};

/// Conditional odds r* observed under label noise when the clean conditional
/// odds are r:  r* = (r + eps)/(eps*r + 1). Pre: r >= 0.
double noisy_odds(double r, const NoiseModel& noise);

/// Inverse of noisy_odds: recovers clean odds from observed odds.
/// Pre: r_star in [eps, 1/eps) (the reachable range; PreconditionError
/// otherwise; for delta = 0 the range is [0, inf) and this is the identity).
double true_odds_from_noisy(double r_star, const NoiseModel& noise);

/// Classification threshold to apply to noisy-label odds so that decisions
/// match thresholding the clean odds at k:  k* = (k + eps)/(eps*k + 1).
/// Pre: k > 0.
double corrected_threshold(double k, const NoiseModel& noise);

} // namespace illusion::analytic
