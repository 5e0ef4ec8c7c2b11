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
#include <illusion/dataset.hpp>

#include <illusion/errors.hpp>

#include <cmath>
#include <string>

namespace illusion {

void Dataset::validate() const {
    const Eigen::Index n = features.rows();
    const Eigen::Index p = features.cols();
    if (n < 1 || p < 1) {
        throw PreconditionError("dataset must have at least one row and one feature");
    }
    if (!features.allFinite()) {
        throw PreconditionError("dataset features must be finite");
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw ShapeError("label vector length " + std::to_string(labels.size()) +
                         " does not match row count " + std::to_string(n));
    }
    for (int label : labels) {
        if (label != 0 && label != 1) {
            throw PreconditionError("labels must be 0 or 1");
        }
    }
    if (static_cast<Eigen::Index>(feature_names.size()) != p) {
        throw ShapeError("feature name count " + std::to_string(feature_names.size()) +
                         " does not match column count " + std::to_string(p));
    }
    if (time_index) {
        if (static_cast<Eigen::Index>(time_index->size()) != n) {
            throw ShapeError("time index length does not match row count");
        }
        for (std::size_t i = 1; i < time_index->size(); ++i) {
            if ((*time_index)[i] < (*time_index)[i - 1]) {
                throw PreconditionError("time index must be nondecreasing");
            }
        }
    }
    if (latent_score) {
        if (latent_score->size() != n) {
            throw ShapeError("latent score length does not match row count");
        }
        if (!latent_score->allFinite()) {
            throw PreconditionError("latent scores must be finite");
        }
    }
}

std::array<std::int64_t, 2> Dataset::class_counts() const {
    std::array<std::int64_t, 2> counts{0, 0};
    for (int label : labels) {
        if (label == 0 || label == 1) {
            ++counts[static_cast<std::size_t>(label)];
        }
    }
    return counts;
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& keep) const {
    const Eigen::Index n = features.rows();
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= n) {
            throw PreconditionError("subset index out of range");
        }
        if (i > 0 && keep[i] <= keep[i - 1]) {
            throw PreconditionError("subset indices must be strictly increasing");
        }
    }
    Dataset out;
    const Eigen::Index m = static_cast<Eigen::Index>(keep.size());
    out.features.resize(m, features.cols());
    out.labels.reserve(keep.size());
    out.feature_names = feature_names;
    if (time_index) {
        out.time_index.emplace();
        out.time_index->reserve(keep.size());
    }
    if (latent_score) {
        out.latent_score.emplace(m);
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index src = keep[static_cast<std::size_t>(i)];
        out.features.row(i) = features.row(src);
        out.labels.push_back(labels[static_cast<std::size_t>(src)]);
        if (time_index) {
            out.time_index->push_back((*time_index)[static_cast<std::size_t>(src)]);
        }
        if (latent_score) {
            (*out.latent_score)(i) = (*latent_score)(src);
        }
    }
    return out;
}

std::vector<std::string> default_feature_names(Eigen::Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        names.push_back("x" + std::to_string(j + 1));
    }
    return names;
}

} // namespace illusion
