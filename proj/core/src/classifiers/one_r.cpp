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

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace illusion::classifiers {

namespace {

struct Candidate {
    std::int64_t misses = 0;
    int feature = 0;
    int cells = 0;
    std::vector<double> cut_points;
    std::vector<double> cell_scores;

    // Ascending on (misses, feature, cells); all counts are integers so the
    // comparison is exact.
    bool better_than(const Candidate& other) const {
        if (misses != other.misses) return misses < other.misses;
        if (feature != other.feature) return feature < other.feature;
        return cells < other.cells;
    }
};

} // namespace

ClassifierModel fit_one_r(const Dataset& data, const FitConfig& cfg) {
    data.validate();
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw PreconditionError("one-r needs both classes in the design data");
    }
    if (cfg.bins < 2) {
        throw ConstraintError("one-r needs a cell budget of at least 2");
    }

    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();

    bool have_best = false;
    Candidate best;

    std::vector<std::pair<double, int>> ordered(static_cast<std::size_t>(n));
    for (int feature = 0; feature < p; ++feature) {
        for (Eigen::Index i = 0; i < n; ++i) {
            ordered[static_cast<std::size_t>(i)] = {data.features(i, feature),
                                                    data.labels[static_cast<std::size_t>(i)]};
        }
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        for (int cells = 1; cells <= cfg.bins; ++cells) {
            // Equal-frequency boundaries; a boundary inside a run of equal
            // values is unusable, which merges the adjacent cells.
            std::vector<Eigen::Index> edges;
            for (int k = 1; k < cells; ++k) {
                const Eigen::Index edge = n * k / cells;
                const auto low = ordered[static_cast<std::size_t>(edge - 1)].first;
                const auto high = ordered[static_cast<std::size_t>(edge)].first;
                if (low < high && (edges.empty() || edges.back() != edge)) {
                    edges.push_back(edge);
                }
            }

            Candidate candidate;
            candidate.feature = feature;
            candidate.cells = static_cast<int>(edges.size()) + 1;
            Eigen::Index start = 0;
            for (std::size_t cell = 0; cell <= edges.size(); ++cell) {
                const Eigen::Index stop = cell < edges.size() ? edges[cell] : n;
                std::int64_t ones = 0;
                for (Eigen::Index i = start; i < stop; ++i) {
                    ones += ordered[static_cast<std::size_t>(i)].second;
                }
                const std::int64_t total = stop - start;
                candidate.misses += std::min(ones, total - ones);
                candidate.cell_scores.push_back(static_cast<double>(ones) /
                                                static_cast<double>(total));
                if (cell < edges.size()) {
                    candidate.cut_points.push_back(
                        (ordered[static_cast<std::size_t>(stop - 1)].first +
                         ordered[static_cast<std::size_t>(stop)].first) /
                        2.0);
                }
                start = stop;
            }

            if (!have_best || candidate.better_than(best)) {
                best = std::move(candidate);
                have_best = true;
            }
        }
    }

    OneRParams params;
    params.feature = best.feature;
    params.cut_points = std::move(best.cut_points);
    params.cell_scores = std::move(best.cell_scores);
    return ClassifierModel(ModelKind::one_r, p, std::move(params));
}

} // namespace illusion::classifiers
