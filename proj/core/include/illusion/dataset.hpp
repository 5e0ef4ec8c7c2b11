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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace illusion {

/// A fully materialized two-class sample.
///
/// Invariants, enforced by validate():
///  - features is n x p with n >= 1, p >= 1, all entries finite
///  - labels has length n with values in {0, 1}
///  - feature_names has length p
///  - time_index, when present, has length n and is nondecreasing
///  - latent_score, when present, has length n and is finite; it carries the
///    continuous score whose thresholding defined the labels, so the class
///    convention can be re-cut later
struct Dataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::optional<std::vector<std::int64_t>> time_index;
    std::optional<Eigen::VectorXd> latent_score;

    Eigen::Index rows() const { return features.rows(); }
    Eigen::Index cols() const { return features.cols(); }

    /// Throws ShapeError or PreconditionError when an invariant is broken.
    void validate() const;

    /// {count of label 0, count of label 1}.
    std::array<std::int64_t, 2> class_counts() const;

    /// Rows of this dataset selected by `keep` (indices ascending, in range).
    /// time_index and latent_score are sliced alongside.
    Dataset subset(const std::vector<Eigen::Index>& keep) const;
};

/// {"x1", ..., "xp"}.
std::vector<std::string> default_feature_names(Eigen::Index p);

} // namespace illusion
