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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>

namespace illusion::classifiers {

ClassifierModel fit_lda(const Dataset& data, const FitConfig& cfg) {
    data.validate();
    const auto counts = data.class_counts();
    if (counts[0] < 2 || counts[1] < 2) {
        throw PreconditionError("the discriminant needs at least two rows per class");
    }
    if (!(cfg.ridge >= 0.0)) {
        throw ConstraintError("ridge must be nonnegative");
    }

    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();

    Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd mean1 = Eigen::VectorXd::Zero(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        (data.labels[static_cast<std::size_t>(i)] == 1 ? mean1 : mean0) +=
            data.features.row(i).transpose();
    }
    mean0 /= static_cast<double>(counts[0]);
    mean1 /= static_cast<double>(counts[1]);

    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd centered =
            data.features.row(i).transpose() -
            (data.labels[static_cast<std::size_t>(i)] == 1 ? mean1 : mean0);
        pooled.noalias() += centered * centered.transpose();
    }
    pooled /= static_cast<double>(n - 2);

    // A singular pooled covariance (duplicated or constant features) can slip
    // through a bare Cholesky with a tiny positive pivot and produce huge
    // meaningless weights, so conditioning is judged on the eigenvalue range
    // and the ridge escalates until the smallest eigenvalue clears it.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(pooled, Eigen::EigenvaluesOnly);
    const double smallest = eigen.eigenvalues().minCoeff();
    const double largest = eigen.eigenvalues().maxCoeff();

    const std::array<double, 6> ladder{cfg.ridge, 1e-8, 1e-6, 1e-4, 1e-2, 1.0};
    const Eigen::VectorXd mean_gap = mean1 - mean0;
    Eigen::VectorXd weights;
    double ridge_used = -1.0;
    for (double ridge : ladder) {
        if (ridge < cfg.ridge) {
            continue;
        }
        const bool well_posed =
            smallest + ridge >= 1e-10 * std::max(1.0, largest + ridge);
        if (!well_posed) {
            continue;
        }
        Eigen::MatrixXd regularized = pooled;
        regularized.diagonal().array() += ridge;
        Eigen::LLT<Eigen::MatrixXd> llt(regularized);
        if (llt.info() != Eigen::Success) {
            continue;
        }
        weights = llt.solve(mean_gap);
        ridge_used = ridge;
        break;
    }
    if (ridge_used < 0.0) {
        throw ValidityError("pooled covariance could not be regularized into a solvable system");
    }

    LdaParams params;
    params.weights = std::move(weights);
    params.bias = -0.5 * params.weights.dot(mean0 + mean1) +
                  std::log(static_cast<double>(counts[1]) / static_cast<double>(counts[0]));
    params.ridge_used = ridge_used;
    return ClassifierModel(ModelKind::lda, p, std::move(params));
}

} // namespace illusion::classifiers
