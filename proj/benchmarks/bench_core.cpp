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
#include <benchmark/benchmark.h>

#include <illusion/analytic.hpp>
#include <illusion/classifiers.hpp>
#include <illusion/evalmetrics.hpp>
#include <illusion/presets.hpp>
#include <illusion/rng.hpp>
#include <illusion/synthdata.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace {

using namespace illusion;

Dataset gaussian_sample(Eigen::Index n, std::uint64_t seed) {
    const synth::GaussianClassSpec spec = harness::presets::gaussian("delta2");
    return synth::gen_gaussian_two_class(spec, n, seed);
}

void bm_conditional_variance_closed(benchmark::State& state) {
    const analytic::EquicorrSpec spec(50, 0.4, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic::conditional_variance(spec));
    }
}
BENCHMARK(bm_conditional_variance_closed);

void bm_conditional_variance_numeric(benchmark::State& state) {
    const analytic::EquicorrSpec spec(50, 0.4, 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic::conditional_variance_numeric(spec));
    }
}
BENCHMARK(bm_conditional_variance_numeric);

void bm_flat_maximum_bound(benchmark::State& state) {
    rng::Rng rng(11);
    const analytic::CorrMatrix corr = analytic::random_nonneg_corr(8, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic::flat_maximum_bound(corr));
    }
}
BENCHMARK(bm_flat_maximum_bound);

void bm_fit_lda(benchmark::State& state) {
    const Dataset data = gaussian_sample(2000, 31);
    for (auto _ : state) {
        benchmark::DoNotOptimize(classifiers::fit_lda(data));
    }
}
BENCHMARK(bm_fit_lda);

void bm_fit_tree(benchmark::State& state) {
    const Dataset data = gaussian_sample(2000, 32);
    classifiers::FitConfig cfg;
    cfg.max_leaves = 8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classifiers::fit_tree(data, cfg));
    }
}
BENCHMARK(bm_fit_tree);

void bm_predict_mlp(benchmark::State& state) {
    const Dataset data = gaussian_sample(2000, 33);
    classifiers::FitConfig cfg;
    cfg.hidden_nodes = 4;
    cfg.epochs = 20;
    cfg.seed = 5;
    const classifiers::ClassifierModel model = classifiers::fit_mlp(data, cfg);
    for (auto _ : state) {
        benchmark::DoNotOptimize(classifiers::predict_scores(model, data.features));
    }
}
BENCHMARK(bm_predict_mlp);

void bm_auc(benchmark::State& state) {
    rng::Rng rng(44);
    const Eigen::Index n = 10000;
    Eigen::VectorXd scores(n);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        scores(i) = rng.uniform();
        labels[static_cast<std::size_t>(i)] = rng.bernoulli(0.5) ? 1 : 0;
    }
    labels[0] = 0;
    labels[1] = 1;
    const metrics::MetricKind metric = metrics::MetricKind::auc();
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::evaluate(metric, scores, labels));
    }
}
BENCHMARK(bm_auc);

void bm_lowess(benchmark::State& state) {
    rng::Rng rng(55);
    const Eigen::Index n = 2000;
    Eigen::VectorXd x(n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = static_cast<double>(i) + rng.uniform() * 0.5;
        y(i) = std::sin(0.01 * static_cast<double>(i)) + rng.normal() * 0.1;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::lowess_smooth(x, y, 0.3));
    }
}
BENCHMARK(bm_lowess);

void bm_drift_stream(benchmark::State& state) {
    const synth::DriftScenario scenario = harness::presets::drift("stationary-control");
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(synth::make_drift_stream(scenario, seed++));
    }
}
BENCHMARK(bm_drift_stream);

} // namespace

BENCHMARK_MAIN();
