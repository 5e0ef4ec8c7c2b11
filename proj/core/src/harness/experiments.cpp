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
#include <illusion/classifiers.hpp>
#include <illusion/errors.hpp>
#include <illusion/evalmetrics.hpp>
#include <illusion/harness.hpp>
#include <illusion/presets.hpp>
#include <illusion/rng.hpp>
#include <illusion/synthdata.hpp>
#include <illusion/version.hpp>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

namespace illusion::harness {

namespace {

using classifiers::ClassifierModel;
using classifiers::FitConfig;
using metrics::EvalRecord;
using metrics::MetricKind;

// ============================================================================
// Small utilities
// ============================================================================

std::string fmt_g(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%g", v);
    return buffer;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(v));
    return buffer;
}

// Substream indices reserved for one-off draws; replicate r owns (seed, r),
// so these live in the top half of the index space.
constexpr std::uint64_t kDatasetStream = 0x8000000000000000ull;
constexpr std::uint64_t kModelStream = 0x8000000000000001ull;

/// Runs body(0..count-1); with parallel set, worker w takes replicates
/// w, w + workers, ... Bodies write disjoint preallocated slots, so the
/// schedule cannot affect results. The first exception is rethrown after all
/// workers finish.
void for_each_replicate(long count, bool parallel, const std::function<void(long)>& body) {
    if (!parallel || count <= 1) {
        for (long r = 0; r < count; ++r) {
            body(r);
        }
        return;
    }
    unsigned hardware = std::thread::hardware_concurrency();
    if (hardware == 0) {
        hardware = 4;
    }
    const long workers = std::min<long>({count, static_cast<long>(hardware), 8});
    std::vector<std::thread> pool;
    std::mutex gate;
    std::exception_ptr first;
    for (long w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (long r = w; r < count; r += workers) {
                try {
                    body(r);
                } catch (...) {
                    const std::lock_guard<std::mutex> hold(gate);
                    if (!first) {
                        first = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (first) {
        std::rethrow_exception(first);
    }
}

std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, rng::Rng& rng) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.uniform() *
                                                 static_cast<double>(i + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    return order;
}

struct SplitHalves {
    std::vector<Eigen::Index> design;
    std::vector<Eigen::Index> test;
};

/// Shuffles 0..n-1 and assigns the first floor(n/2) positions to the design
/// half. Both index lists come back sorted, as Dataset::subset requires.
SplitHalves half_split(Eigen::Index n, rng::Rng& rng) {
    const std::vector<Eigen::Index> order = shuffled_indices(n, rng);
    SplitHalves split;
    const auto cut = static_cast<std::size_t>(n / 2);
    split.design.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
    std::sort(split.design.begin(), split.design.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

void require_valid_classifier_name(const std::string& name) {
    try {
        classifiers::model_kind_from_string(name);
    } catch (const Error&) {
        throw ConfigurationError("unknown classifier '" + name +
                                 "' (available: default-rule, one-r, lda, tree, mlp)");
    }
}

ClassifierModel fit_by_name(const std::string& name, const Dataset& design,
                            const FitConfig& cfg) {
    const classifiers::ModelKind kind = classifiers::model_kind_from_string(name);
    switch (kind) {
    case classifiers::ModelKind::default_rule:
        return classifiers::fit_default(design);
    case classifiers::ModelKind::one_r:
        return classifiers::fit_one_r(design, cfg);
    case classifiers::ModelKind::lda:
        return classifiers::fit_lda(design, cfg);
    case classifiers::ModelKind::tree:
        return classifiers::fit_tree(design, cfg);
    case classifiers::ModelKind::mlp:
        return classifiers::fit_mlp(design, cfg);
    }
    throw PreconditionError("unknown classifier kind");
}

/// Reads the per-classifier knobs "<name>.bins", "<name>.ridge",
/// "<name>.max_leaves", "<name>.min_leaf", "<name>.hidden_nodes",
/// "<name>.epochs" and "<name>.learning_rate" from `section`. Absent keys
/// keep the FitConfig defaults; range checking happens in the fit routines.
FitConfig parse_fit_config(ConfigView& view, const std::string& section,
                           const std::string& name) {
    FitConfig cfg;
    cfg.bins = static_cast<int>(view.optional_int(section, name + ".bins", cfg.bins));
    cfg.ridge = view.optional_double(section, name + ".ridge", cfg.ridge);
    cfg.max_leaves =
            static_cast<int>(view.optional_int(section, name + ".max_leaves", cfg.max_leaves));
    cfg.min_leaf =
            static_cast<int>(view.optional_int(section, name + ".min_leaf", cfg.min_leaf));
    cfg.hidden_nodes = static_cast<int>(
            view.optional_int(section, name + ".hidden_nodes", cfg.hidden_nodes));
    cfg.epochs = static_cast<int>(view.optional_int(section, name + ".epochs", cfg.epochs));
    cfg.learning_rate =
            view.optional_double(section, name + ".learning_rate", cfg.learning_rate);
    return cfg;
}

// ----------------------------------------------------------------------------
// Shared dataset source: either a named population preset sampled once per
// run, or a CSV on disk.
//   source = preset        requires: preset = <name>, n = <rows>
//   source = csv           requires: csv = <path>, label = <column>
// ----------------------------------------------------------------------------

struct DataSource {
    bool from_csv = false;
    std::string preset;
    long n = 0;
    std::string csv;
    std::string label;
};

DataSource parse_data_source(ConfigView& view, const std::string& section) {
    DataSource src;
    const std::string mode = view.require_string(section, "source");
    if (mode == "preset") {
        src.from_csv = false;
        src.preset = view.require_string(section, "preset");
        presets::gaussian(src.preset);
        src.n = view.require_int(section, "n");
        if (src.n < 4) {
            throw ConfigurationError("n must be at least 4 rows, got " +
                                     std::to_string(src.n));
        }
    } else if (mode == "csv") {
        src.from_csv = true;
        src.csv = view.require_string(section, "csv");
        src.label = view.require_string(section, "label");
    } else {
        throw ConfigurationError("source must be 'preset' or 'csv', got '" + mode + "'");
    }
    return src;
}

/// The preset branch draws from the reserved dataset substream, never from a
/// replicate stream.
Dataset load_data_source(const DataSource& src, std::uint64_t seed) {
    if (src.from_csv) {
        return load_dataset_csv(src.csv, src.label).data;
    }
    const synth::GaussianClassSpec spec = presets::gaussian(src.preset);
    return synth::gen_gaussian_two_class(
            spec, src.n, rng::derive_substream_seed(seed, kDatasetStream));
}

void require_replicates_exactly(const ExperimentConfig& cfg, long value) {
    if (cfg.replicates != value) {
        throw ConfigurationError("experiment '" + to_string(cfg.kind) +
                                 "' does not replicate; set replicates = " +
                                 std::to_string(value) + " or omit it");
    }
}

void require_replicates_at_least(const ExperimentConfig& cfg, long lowest) {
    if (cfg.replicates < lowest) {
        throw ConfigurationError("experiment '" + to_string(cfg.kind) +
                                 "' reports confidence intervals and needs replicates >= " +
                                 std::to_string(lowest) + ", got " +
                                 std::to_string(cfg.replicates));
    }
}

double checked_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigurationError(std::string(what) + " must be positive and finite");
    }
    return v;
}

// ============================================================================
// variance-curves: residual-variance curves over a (tau, rho, d) grid
// ============================================================================

struct VarianceCurvesParams {
    double tau = 0.0;
    std::vector<double> rhos;
    long d_max = 0;
};

VarianceCurvesParams parse_variance_curves(const ExperimentConfig& cfg, ConfigView& view) {
    require_replicates_exactly(cfg, 1);
    const std::string section = to_string(cfg.kind);
    VarianceCurvesParams p;
    p.tau = view.require_double(section, "tau");
    if (!std::isfinite(p.tau) || std::abs(p.tau) > 1.0) {
        throw ConfigurationError("tau must lie in [-1, 1]");
    }
    p.rhos = view.require_double_list(section, "rho_list");
    p.d_max = view.require_int(section, "d_max");
    if (p.d_max < 1) {
        throw ConfigurationError("d_max must be at least 1");
    }
    return p;
}

/// One row per valid (rho, d) grid point; combinations whose correlation
/// matrix is not positive semidefinite are omitted rather than reported.
void run_variance_curves(const VarianceCurvesParams& p, ResultTable& table) {
    for (const double rho : p.rhos) {
        const std::string label = "rho=" + fmt_g(rho);
        for (long d = 1; d <= p.d_max; ++d) {
            double value = 0.0;
            try {
                const analytic::EquicorrSpec spec(static_cast<int>(d), rho, p.tau);
                value = analytic::conditional_variance(spec);
            } catch (const Error&) {
                continue;
            }
            EvalRecord row;
            row.index = static_cast<double>(d);
            row.metric = MetricKind::quantity();
            row.value = value;
            row.label = label;
            table.rows.push_back(std::move(row));
        }
    }
}

// ============================================================================
// flat-max: guaranteed bound vs observed minimum correlation
// ============================================================================

struct FlatMaxParams {
    long d = 0;
    long matrices = 0;
    long draws = 0;
};

FlatMaxParams parse_flat_max(const ExperimentConfig& cfg, ConfigView& view) {
    require_replicates_exactly(cfg, 1);
    const std::string section = to_string(cfg.kind);
    FlatMaxParams p;
    p.d = view.require_int(section, "d");
    p.matrices = view.require_int(section, "matrices");
    p.draws = view.require_int(section, "draws");
    if (p.d < 2) {
        throw ConfigurationError("d must be at least 2");
    }
    if (p.matrices < 1 || p.draws < 1) {
        throw ConfigurationError("matrices and draws must be at least 1");
    }
    return p;
}

/// Matrix m consumes substream (seed, m): first the matrix entries, then one
/// convex weight vector per draw. Each draw's composite is correlated with
/// the equal-weights composite; the minimum over draws lands beside the
/// guaranteed bound and the smallest row average.
void run_flat_max(const FlatMaxParams& p, const ExperimentConfig& cfg, ResultTable& table) {
    struct Summary {
        double bound = 0.0;
        double row_average = 0.0;
        double min_observed = 0.0;
    };
    std::vector<Summary> out(static_cast<std::size_t>(p.matrices));
    const Eigen::VectorXd equal = Eigen::VectorXd::Constant(
            p.d, 1.0 / static_cast<double>(p.d));

    for_each_replicate(p.matrices, cfg.parallel, [&](long m) {
        rng::Rng rng = rng::Rng::substream(cfg.seed, static_cast<std::uint64_t>(m));
        const analytic::CorrMatrix corr =
                analytic::random_nonneg_corr(static_cast<int>(p.d), rng);
        Summary s;
        s.bound = analytic::flat_maximum_bound(corr);
        s.row_average = analytic::smallest_row_average(corr);
        s.min_observed = std::numeric_limits<double>::infinity();
        for (long k = 0; k < p.draws; ++k) {
            const Eigen::VectorXd w =
                    analytic::random_convex_weights(static_cast<int>(p.d), rng);
            s.min_observed =
                    std::min(s.min_observed, analytic::weighted_sum_correlation(equal, w, corr));
        }
        out[static_cast<std::size_t>(m)] = s;
    });

    for (long m = 0; m < p.matrices; ++m) {
        const Summary& s = out[static_cast<std::size_t>(m)];
        const double index = static_cast<double>(m);
        table.rows.push_back({index, MetricKind::quantity(), s.bound, 0.0, "bound"});
        table.rows.push_back(
                {index, MetricKind::quantity(), s.row_average, 0.0, "smallest-row-average"});
        table.rows.push_back(
                {index, MetricKind::quantity(), s.min_observed, 0.0, "min-observed"});
    }
}

// ============================================================================
// label-noise: cost of thresholding noisy odds at k versus the corrected k*
// ============================================================================

struct LabelNoiseParams {
    std::string preset;
    long n = 0;
    std::vector<double> deltas;
    double threshold = 1.0;
    bool fit_lda = true;
};

LabelNoiseParams parse_label_noise(const ExperimentConfig& cfg, ConfigView& view) {
    require_replicates_at_least(cfg, 2);
    const std::string section = to_string(cfg.kind);
    LabelNoiseParams p;
    p.preset = view.require_string(section, "preset");
    presets::gaussian(p.preset);
    p.n = view.require_int(section, "n");
    if (p.n < 4) {
        throw ConfigurationError("n must be at least 4 rows");
    }
    p.deltas = view.require_double_list(section, "delta_list");
    for (const double delta : p.deltas) {
        if (!(delta >= 0.0 && delta < 0.5)) {
            throw ConfigurationError("delta_list entries must lie in [0, 0.5), got " +
                                     fmt_g(delta));
        }
    }
    p.threshold = checked_positive(
            view.optional_double(section, "threshold_odds", 1.0), "threshold_odds");
    p.fit_lda = view.optional_bool(section, "fit_lda", true);
    return p;
}

/// Costs are always charged against the clean labels: the noise afflicts
/// what a fitted model sees, not what mistakes cost. Per replicate one clean
/// sample is drawn; per delta the same sample is label-flipped, so arms are
/// paired. Arms:
///   oracle          true posterior odds thresholded at k on clean ground
///   naive           noisy odds thresholded at the uncorrected k
///   corrected       noisy odds thresholded at the corrected threshold
///   lda-naive/-corrected   same pair for a linear rule fit on noisy labels
void run_label_noise(const LabelNoiseParams& p, const ExperimentConfig& cfg,
                     ResultTable& table) {
    const synth::GaussianClassSpec spec = presets::gaussian(p.preset);
    const double prior_odds = spec.prior1 / (1.0 - spec.prior1);
    const MetricKind cost = MetricKind::cost_weighted(p.threshold);

    std::vector<std::string> arms = {"oracle", "naive", "corrected"};
    if (p.fit_lda) {
        arms.emplace_back("lda-naive");
        arms.emplace_back("lda-corrected");
    }
    const std::size_t n_deltas = p.deltas.size();
    const std::size_t n_arms = arms.size();
    // slot layout: [replicate][delta * n_arms + arm]
    std::vector<std::vector<double>> slot(
            static_cast<std::size_t>(cfg.replicates),
            std::vector<double>(n_deltas * n_arms, 0.0));

    for_each_replicate(cfg.replicates, cfg.parallel, [&](long r) {
        rng::Rng rng = rng::Rng::substream(cfg.seed, static_cast<std::uint64_t>(r));
        const std::uint64_t data_seed = rng.next_u64();
        const Dataset data = synth::gen_gaussian_two_class(spec, p.n, data_seed);
        const Eigen::VectorXd& latent = *data.latent_score;

        Eigen::VectorXd true_odds(data.rows());
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            true_odds(i) = prior_odds * std::exp(latent(i));
        }

        Eigen::VectorXd oracle_pred(data.rows());
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            oracle_pred(i) = true_odds(i) > p.threshold ? 1.0 : 0.0;
        }

        for (std::size_t j = 0; j < n_deltas; ++j) {
            const double delta = p.deltas[j];
            const std::uint64_t noise_seed = rng.next_u64();
            const Dataset noisy = synth::inject_label_noise(data, delta, noise_seed);
            const analytic::NoiseModel noise(delta);
            const double k_star = analytic::corrected_threshold(p.threshold, noise);

            Eigen::VectorXd naive_pred(data.rows());
            Eigen::VectorXd corrected_pred(data.rows());
            for (Eigen::Index i = 0; i < data.rows(); ++i) {
                const double r_star = analytic::noisy_odds(true_odds(i), noise);
                naive_pred(i) = r_star > p.threshold ? 1.0 : 0.0;
                corrected_pred(i) = r_star > k_star ? 1.0 : 0.0;
            }

            double* row = slot[static_cast<std::size_t>(r)].data() + j * n_arms;
            row[0] = metrics::evaluate(cost, oracle_pred, data.labels, 1.0);
            row[1] = metrics::evaluate(cost, naive_pred, data.labels, 1.0);
            row[2] = metrics::evaluate(cost, corrected_pred, data.labels, 1.0);

            if (p.fit_lda) {
                FitConfig fit_cfg;
                fit_cfg.seed = rng.next_u64();
                const ClassifierModel lda = classifiers::fit_lda(noisy, fit_cfg);
                const Eigen::VectorXd scores =
                        classifiers::predict_scores(lda, data.features);
                row[3] = metrics::evaluate(cost, scores, data.labels, p.threshold);
                row[4] = metrics::evaluate(cost, scores, data.labels, k_star);
            }
        }
    });

    for (std::size_t j = 0; j < n_deltas; ++j) {
        for (std::size_t a = 0; a < n_arms; ++a) {
            std::vector<double> values(static_cast<std::size_t>(cfg.replicates));
            for (long r = 0; r < cfg.replicates; ++r) {
                values[static_cast<std::size_t>(r)] =
                        slot[static_cast<std::size_t>(r)][j * n_arms + a];
            }
            const metrics::ConfidenceInterval ci = metrics::confidence_interval(values);
            table.rows.push_back({p.deltas[j], cost, ci.mean, ci.half_width, arms[a]});
        }
    }
}

// ============================================================================
// diminishing-returns: test error against model complexity
// ============================================================================

struct DiminishingReturnsParams {
    DataSource source;
    std::string family;
    std::vector<long> levels;
    FitConfig base;
};

DiminishingReturnsParams parse_diminishing_returns(const ExperimentConfig& cfg,
                                                   ConfigView& view) {
    require_replicates_at_least(cfg, 2);
    const std::string section = to_string(cfg.kind);
    DiminishingReturnsParams p;
    p.source = parse_data_source(view, section);
    p.family = view.require_string(section, "family");
    if (p.family != "tree" && p.family != "mlp") {
        throw ConfigurationError("family must be 'tree' or 'mlp', got '" + p.family + "'");
    }
    p.levels = view.require_int_list(section, "levels");
    const long lowest = p.family == "tree" ? 1 : 0;
    for (const long level : p.levels) {
        if (level < lowest) {
            throw ConfigurationError("levels for family '" + p.family +
                                     "' must be >= " + std::to_string(lowest));
        }
    }
    p.base = parse_fit_config(view, section, p.family);
    return p;
}

/// Per replicate: a fresh random half/half split of the one shared dataset,
/// a refit at every complexity level (tree: leaf budget, mlp: hidden units),
/// and the test-half error rate. Rows aggregate each level across
/// replicates.
void run_diminishing_returns(const DiminishingReturnsParams& p, const ExperimentConfig& cfg,
                             ResultTable& table) {
    const Dataset data = load_data_source(p.source, cfg.seed);
    const std::size_t n_levels = p.levels.size();
    std::vector<std::vector<double>> errors(
            n_levels, std::vector<double>(static_cast<std::size_t>(cfg.replicates), 0.0));

    for_each_replicate(cfg.replicates, cfg.parallel, [&](long r) {
        rng::Rng rng = rng::Rng::substream(cfg.seed, static_cast<std::uint64_t>(r));
        const SplitHalves split = half_split(data.rows(), rng);
        const Dataset design = data.subset(split.design);
        const Dataset test = data.subset(split.test);
        for (std::size_t li = 0; li < n_levels; ++li) {
            FitConfig fit_cfg = p.base;
            fit_cfg.seed = rng.next_u64();
            ClassifierModel model = [&] {
                if (p.family == "tree") {
                    fit_cfg.max_leaves = static_cast<int>(p.levels[li]);
                    return classifiers::fit_tree(design, fit_cfg);
                }
                fit_cfg.hidden_nodes = static_cast<int>(p.levels[li]);
                return classifiers::fit_mlp(design, fit_cfg);
            }();
            const Eigen::VectorXd scores = classifiers::predict_scores(model, test.features);
            errors[li][static_cast<std::size_t>(r)] =
                    metrics::evaluate(MetricKind::error_rate(), scores, test.labels);
        }
    });

    for (std::size_t li = 0; li < n_levels; ++li) {
        const metrics::ConfidenceInterval ci = metrics::confidence_interval(errors[li]);
        table.rows.push_back({static_cast<double>(p.levels[li]), MetricKind::error_rate(),
                              ci.mean, ci.half_width, p.family});
    }
}

// ============================================================================
// drift-replay: frozen rules scored down a drifting stream
// ============================================================================

struct DriftReplayParams {
    std::string scenario;
    long window = 0;
    double span = 0.3;
    std::vector<std::string> names;
    std::vector<FitConfig> fit_cfgs;
};

DriftReplayParams parse_drift_replay(const ExperimentConfig& cfg, ConfigView& view) {
    require_replicates_exactly(cfg, 1);
    const std::string section = to_string(cfg.kind);
    DriftReplayParams p;
    p.scenario = view.require_string(section, "scenario");
    const synth::DriftScenario scenario = presets::drift(p.scenario);
    p.window = view.require_int(section, "window");
    if (p.window < 1 || p.window >= scenario.steps) {
        throw ConfigurationError("window must lie in [1, steps-1] = [1, " +
                                 std::to_string(scenario.steps - 1) + "], got " +
                                 std::to_string(p.window));
    }
    p.span = view.optional_double(section, "span", 0.3);
    if (!(p.span > 0.0 && p.span <= 1.0)) {
        throw ConfigurationError("span must lie in (0, 1]");
    }
    p.names = view.require_string_list(section, "classifiers");
    for (const std::string& name : p.names) {
        require_valid_classifier_name(name);
        p.fit_cfgs.push_back(parse_fit_config(view, section, name));
    }
    return p;
}

/// Protocol: the odd-indexed rows (1, 3, 5, ...) of each window batch form
/// the design set; every batch, window included, is then scored on its
/// even-indexed rows, so design and evaluation rows never overlap. The cost
/// ratio c0/c1 is the design class ratio n1/n0 and doubles as the decision
/// threshold. Each classifier contributes a raw cost series and its
/// smoothed companion ("<name>-cost", "<name>-cost-smooth").
void run_drift_replay(const DriftReplayParams& p, const ExperimentConfig& cfg,
                      ResultTable& table) {
    const synth::Stream stream = synth::make_drift_stream(presets::drift(p.scenario),
                                                          cfg.seed);
    const auto total = static_cast<long>(stream.batches.size());

    std::vector<Eigen::Index> design_rows;
    Eigen::Index design_count = 0;
    for (long t = 0; t < p.window; ++t) {
        design_count += (stream.batches[static_cast<std::size_t>(t)].rows()) / 2;
    }
    const Eigen::Index p_cols = stream.batches.front().cols();
    Dataset design;
    design.features.resize(design_count, p_cols);
    design.labels.reserve(static_cast<std::size_t>(design_count));
    design.feature_names = stream.batches.front().feature_names;
    Eigen::Index at = 0;
    for (long t = 0; t < p.window; ++t) {
        const Dataset& batch = stream.batches[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 1; i < batch.rows(); i += 2) {
            design.features.row(at++) = batch.features.row(i);
            design.labels.push_back(batch.labels[static_cast<std::size_t>(i)]);
        }
    }
    design.validate();

    const std::array<std::int64_t, 2> counts = design.class_counts();
    if (counts[0] == 0 || counts[1] == 0) {
        throw DegenerateInputError("design window holds a single class; the cost ratio "
                                   "n1/n0 is undefined");
    }
    const double ratio = static_cast<double>(counts[1]) / static_cast<double>(counts[0]);
    const MetricKind cost = MetricKind::cost_weighted(ratio);

    rng::Rng fit_rng = rng::Rng::substream(cfg.seed, kModelStream);
    for (std::size_t ci = 0; ci < p.names.size(); ++ci) {
        FitConfig fit_cfg = p.fit_cfgs[ci];
        fit_cfg.seed = fit_rng.next_u64();
        const ClassifierModel model = fit_by_name(p.names[ci], design, fit_cfg);

        Eigen::VectorXd xs(total);
        Eigen::VectorXd raw(total);
        for (long t = 0; t < total; ++t) {
            const Dataset& batch = stream.batches[static_cast<std::size_t>(t)];
            std::vector<Eigen::Index> keep;
            keep.reserve(static_cast<std::size_t>(batch.rows() / 2 + 1));
            for (Eigen::Index i = 0; i < batch.rows(); i += 2) {
                keep.push_back(i);
            }
            const Dataset sub = batch.subset(keep);
            const Eigen::VectorXd scores = classifiers::predict_scores(model, sub.features);
            xs(t) = batch.time_index ? static_cast<double>(batch.time_index->front())
                                     : static_cast<double>(t);
            raw(t) = metrics::evaluate(cost, scores, sub.labels, ratio);
        }
        for (long t = 0; t < total; ++t) {
            table.rows.push_back({xs(t), cost, raw(t), 0.0, p.names[ci] + "-cost"});
        }
        const Eigen::VectorXd smooth = metrics::lowess_smooth(xs, raw, p.span);
        for (long t = 0; t < total; ++t) {
            table.rows.push_back(
                    {xs(t), cost, smooth(t), 0.0, p.names[ci] + "-cost-smooth"});
        }
    }
}

// ============================================================================
// proportion: share of the default-to-best gap closed by a simple rule
// ============================================================================

struct ProportionRowSpec {
    std::string name;
    double m0 = 0.0;
    double m_simple = 0.0;
    double m_best = 0.0;
};

struct ProportionParams {
    bool rows_mode = true;
    std::vector<ProportionRowSpec> rows;
    DataSource source;
    std::vector<std::string> names;
    std::vector<FitConfig> fit_cfgs;
    FitConfig lda_cfg;
};

ProportionParams parse_proportion(const ExperimentConfig& cfg, ConfigView& view) {
    const std::string section = to_string(cfg.kind);
    ProportionParams p;
    const std::string mode = view.require_string(section, "mode");
    if (mode == "rows") {
        p.rows_mode = true;
        require_replicates_exactly(cfg, 1);
        for (const std::string& key : cfg.file.keys_in(section)) {
            if (key.rfind("row", 0) != 0 || key == "row") {
                continue;
            }
            const bool digits = std::all_of(key.begin() + 3, key.end(), [](char c) {
                return c >= '0' && c <= '9';
            });
            if (!digits) {
                continue;
            }
            const std::vector<std::string> items = view.require_string_list(section, key);
            if (items.size() != 4) {
                throw ConfigurationError("key '" + key +
                                         "' must hold 'name, m0, m_simple, m_best'");
            }
            ProportionRowSpec row;
            row.name = items[0];
            auto number = [&](const std::string& text) {
                errno = 0;
                char* end = nullptr;
                const double v = std::strtod(text.c_str(), &end);
                if (text.empty() || end != text.c_str() + text.size()) {
                    throw ConfigurationError("key '" + key + "': cannot parse '" + text +
                                             "' as a number");
                }
                return v;
            };
            row.m0 = number(items[1]);
            row.m_simple = number(items[2]);
            row.m_best = number(items[3]);
            try {
                metrics::proportion_achievable(row.m0, row.m_simple, row.m_best);
            } catch (const Error& e) {
                throw ConfigurationError("key '" + key + "': " + std::string(e.what()));
            }
            p.rows.push_back(std::move(row));
        }
        if (p.rows.empty()) {
            throw ConfigurationError("mode = rows needs at least one rowN key");
        }
        return p;
    }
    if (mode == "dataset") {
        p.rows_mode = false;
        if (cfg.replicates < 1) {
            throw ConfigurationError("replicates must be >= 1");
        }
        p.source = parse_data_source(view, section);
        p.names = view.require_string_list(section, "classifiers");
        for (const std::string& name : p.names) {
            require_valid_classifier_name(name);
            p.fit_cfgs.push_back(parse_fit_config(view, section, name));
        }
        p.lda_cfg = parse_fit_config(view, section, "lda");
        return p;
    }
    throw ConfigurationError("mode must be 'rows' or 'dataset', got '" + mode + "'");
}

/// rows mode: one proportion per supplied (m0, m_simple, m_best) triple.
/// dataset mode: per replicate split, m0 = default-rule test error,
/// m_simple = linear-rule test error, m_best = best configured classifier;
/// the proportion is computed from the replicate means, which are reported
/// alongside it.
void run_proportion(const ProportionParams& p, const ExperimentConfig& cfg,
                    ResultTable& table) {
    if (p.rows_mode) {
        for (std::size_t i = 0; i < p.rows.size(); ++i) {
            const ProportionRowSpec& row = p.rows[i];
            const double value =
                    metrics::proportion_achievable(row.m0, row.m_simple, row.m_best);
            table.rows.push_back({static_cast<double>(i + 1), MetricKind::quantity(),
                                  value, 0.0, row.name});
        }
        return;
    }

    const Dataset data = load_data_source(p.source, cfg.seed);
    std::vector<double> m0(static_cast<std::size_t>(cfg.replicates));
    std::vector<double> m_simple(static_cast<std::size_t>(cfg.replicates));
    std::vector<double> m_best(static_cast<std::size_t>(cfg.replicates));

    for_each_replicate(cfg.replicates, cfg.parallel, [&](long r) {
        rng::Rng rng = rng::Rng::substream(cfg.seed, static_cast<std::uint64_t>(r));
        const SplitHalves split = half_split(data.rows(), rng);
        const Dataset design = data.subset(split.design);
        const Dataset test = data.subset(split.test);
        auto test_error = [&](const ClassifierModel& model) {
            const Eigen::VectorXd scores = classifiers::predict_scores(model, test.features);
            return metrics::evaluate(MetricKind::error_rate(), scores, test.labels);
        };
        m0[static_cast<std::size_t>(r)] = test_error(classifiers::fit_default(design));
        FitConfig lda_cfg = p.lda_cfg;
        lda_cfg.seed = rng.next_u64();
        m_simple[static_cast<std::size_t>(r)] =
                test_error(classifiers::fit_lda(design, lda_cfg));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t ci = 0; ci < p.names.size(); ++ci) {
            FitConfig fit_cfg = p.fit_cfgs[ci];
            fit_cfg.seed = rng.next_u64();
            best = std::min(best, test_error(fit_by_name(p.names[ci], design, fit_cfg)));
        }
        m_best[static_cast<std::size_t>(r)] = best;
    });

    auto mean_of = [](const std::vector<double>& values) {
        double total = 0.0;
        for (const double v : values) {
            total += v;
        }
        return total / static_cast<double>(values.size());
    };
    const double m0_mean = mean_of(m0);
    const double simple_mean = mean_of(m_simple);
    const double best_mean = mean_of(m_best);
    const double value = metrics::proportion_achievable(m0_mean, simple_mean, best_mean);
    table.rows.push_back({0.0, MetricKind::error_rate(), m0_mean, 0.0, "m0"});
    table.rows.push_back({0.0, MetricKind::error_rate(), simple_mean, 0.0, "m_simple"});
    table.rows.push_back({0.0, MetricKind::error_rate(), best_mean, 0.0, "m_best"});
    table.rows.push_back({0.0, MetricKind::quantity(), value, 0.0, "proportion"});
}

// ============================================================================
// rank-disagreement: does the metric choose the winner?
// ============================================================================

struct RankDisagreementParams {
    DataSource source;
    std::vector<std::string> names;
    std::vector<FitConfig> fit_cfgs;
    double cost_ratio = 2.0;
};

RankDisagreementParams parse_rank_disagreement(const ExperimentConfig& cfg,
                                               ConfigView& view) {
    require_replicates_exactly(cfg, 1);
    const std::string section = to_string(cfg.kind);
    RankDisagreementParams p;
    p.source = parse_data_source(view, section);
    p.names = view.require_string_list(section, "classifiers");
    if (p.names.size() < 2) {
        throw ConfigurationError("rank comparison needs at least 2 classifiers");
    }
    for (const std::string& name : p.names) {
        require_valid_classifier_name(name);
        p.fit_cfgs.push_back(parse_fit_config(view, section, name));
    }
    p.cost_ratio = checked_positive(view.optional_double(section, "cost_ratio", 2.0),
                                    "cost_ratio");
    return p;
}

/// One half/half split; every classifier is scored under every metric, then
/// each metric pair gets a rank correlation over the classifier list. Error
/// style metrics enter the rank correlation negated so that "better" points
/// the same way for all of them; a pair ties at NaN when one metric cannot
/// distinguish the classifiers at all.
void run_rank_disagreement(const RankDisagreementParams& p, const ExperimentConfig& cfg,
                           ResultTable& table) {
    const Dataset data = load_data_source(p.source, cfg.seed);
    rng::Rng rng = rng::Rng::substream(cfg.seed, 0);
    const SplitHalves split = half_split(data.rows(), rng);
    const Dataset design = data.subset(split.design);
    const Dataset test = data.subset(split.test);

    const std::vector<MetricKind> kinds = {
            MetricKind::error_rate(),
            MetricKind::cost_weighted(p.cost_ratio),
            MetricKind::brier(),
            MetricKind::auc(),
    };

    std::vector<Eigen::VectorXd> scores;
    scores.reserve(p.names.size());
    for (std::size_t ci = 0; ci < p.names.size(); ++ci) {
        FitConfig fit_cfg = p.fit_cfgs[ci];
        fit_cfg.seed = rng.next_u64();
        const ClassifierModel model = fit_by_name(p.names[ci], design, fit_cfg);
        scores.push_back(classifiers::predict_scores(model, test.features));
    }

    std::vector<std::vector<double>> goodness(kinds.size());
    for (std::size_t mi = 0; mi < kinds.size(); ++mi) {
        const MetricKind& metric = kinds[mi];
        const double threshold =
                metric.id == metrics::MetricId::cost_weighted ? metric.cost_ratio : 1.0;
        for (std::size_t ci = 0; ci < p.names.size(); ++ci) {
            const double value =
                    metrics::evaluate(metric, scores[ci], test.labels, threshold);
            table.rows.push_back({static_cast<double>(ci + 1), metric, value, 0.0,
                                  p.names[ci]});
            goodness[mi].push_back(metric.id == metrics::MetricId::auc ? value : -value);
        }
    }

    long pair_no = 0;
    for (std::size_t a = 0; a < kinds.size(); ++a) {
        for (std::size_t b = a + 1; b < kinds.size(); ++b) {
            ++pair_no;
            double tau = std::numeric_limits<double>::quiet_NaN();
            try {
                tau = metrics::kendall_tau(goodness[a], goodness[b]);
            } catch (const DegenerateInputError&) {
                // One metric ties every classifier; leave the row at NaN.
            }
            table.rows.push_back({static_cast<double>(pair_no), MetricKind::quantity(),
                                  tau, 0.0,
                                  "tau:" + metrics::to_string(kinds[a].id) + "|" +
                                          metrics::to_string(kinds[b].id)});
        }
    }
}

} // namespace

// ============================================================================
// Kind names, configuration loading, dispatch
// ============================================================================

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::variance_curves: return "variance-curves";
    case ExperimentKind::flat_max: return "flat-max";
    case ExperimentKind::label_noise: return "label-noise";
    case ExperimentKind::diminishing_returns: return "diminishing-returns";
    case ExperimentKind::drift_replay: return "drift-replay";
    case ExperimentKind::proportion: return "proportion";
    case ExperimentKind::rank_disagreement: return "rank-disagreement";
    }
    throw PreconditionError("unknown experiment kind");
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "variance-curves") return ExperimentKind::variance_curves;
    if (name == "flat-max") return ExperimentKind::flat_max;
    if (name == "label-noise") return ExperimentKind::label_noise;
    if (name == "diminishing-returns") return ExperimentKind::diminishing_returns;
    if (name == "drift-replay") return ExperimentKind::drift_replay;
    if (name == "proportion") return ExperimentKind::proportion;
    if (name == "rank-disagreement") return ExperimentKind::rank_disagreement;
    throw ConfigurationError(
            "unknown experiment kind '" + name +
            "' (available: variance-curves, flat-max, label-noise, diminishing-returns, "
            "drift-replay, proportion, rank-disagreement)");
}

ExperimentConfig ExperimentConfig::from_file(ConfigFile file) {
    ExperimentConfig cfg;
    cfg.file = std::move(file);
    ConfigView view(cfg.file);
    cfg.kind = experiment_kind_from_string(view.require_string("", "kind"));
    cfg.seed = view.optional_u64("", "seed", 0);
    cfg.replicates = view.optional_int("", "replicates", 1);
    if (cfg.replicates < 1) {
        throw ConfigurationError("replicates must be >= 1, got " +
                                 std::to_string(cfg.replicates));
    }
    cfg.parallel = view.optional_bool("", "parallel", false);
    cfg.output_path = view.optional_string("", "out").value_or(to_string(cfg.kind) + ".csv");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_file(ConfigFile::parse_file(path));
}

std::string config_hash(const ExperimentConfig& cfg) {
    // out/parallel/quiet cannot change results; the effective seed is hashed
    // explicitly so a command line override and a file key agree.
    std::string canon = cfg.file.canonical({"out", "parallel", "quiet", "seed"});
    canon += "seed=" + std::to_string(cfg.seed) + "\n";
    return hex64(fnv1a64(canon));
}

namespace {

void consume_top_level(ConfigView& view) {
    view.ignore("", "kind");
    view.ignore("", "seed");
    view.ignore("", "replicates");
    view.ignore("", "parallel");
    view.ignore("", "out");
}

} // namespace

void validate_experiment_config(const ExperimentConfig& cfg) {
    ConfigView view(cfg.file);
    consume_top_level(view);
    switch (cfg.kind) {
    case ExperimentKind::variance_curves: parse_variance_curves(cfg, view); break;
    case ExperimentKind::flat_max: parse_flat_max(cfg, view); break;
    case ExperimentKind::label_noise: parse_label_noise(cfg, view); break;
    case ExperimentKind::diminishing_returns: parse_diminishing_returns(cfg, view); break;
    case ExperimentKind::drift_replay: parse_drift_replay(cfg, view); break;
    case ExperimentKind::proportion: parse_proportion(cfg, view); break;
    case ExperimentKind::rank_disagreement: parse_rank_disagreement(cfg, view); break;
    }
    view.forbid_unconsumed();
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
    ConfigView view(cfg.file);
    consume_top_level(view);

    ResultTable table;
    table.kind = to_string(cfg.kind);
    table.seed = cfg.seed;
    table.config_digest = config_hash(cfg);
    table.version = kVersion;

    switch (cfg.kind) {
    case ExperimentKind::variance_curves: {
        const VarianceCurvesParams p = parse_variance_curves(cfg, view);
        view.forbid_unconsumed();
        run_variance_curves(p, table);
        break;
    }
    case ExperimentKind::flat_max: {
        const FlatMaxParams p = parse_flat_max(cfg, view);
        view.forbid_unconsumed();
        run_flat_max(p, cfg, table);
        break;
    }
    case ExperimentKind::label_noise: {
        const LabelNoiseParams p = parse_label_noise(cfg, view);
        view.forbid_unconsumed();
        run_label_noise(p, cfg, table);
        break;
    }
    case ExperimentKind::diminishing_returns: {
        const DiminishingReturnsParams p = parse_diminishing_returns(cfg, view);
        view.forbid_unconsumed();
        run_diminishing_returns(p, cfg, table);
        break;
    }
    case ExperimentKind::drift_replay: {
        const DriftReplayParams p = parse_drift_replay(cfg, view);
        view.forbid_unconsumed();
        run_drift_replay(p, cfg, table);
        break;
    }
    case ExperimentKind::proportion: {
        const ProportionParams p = parse_proportion(cfg, view);
        view.forbid_unconsumed();
        run_proportion(p, cfg, table);
        break;
    }
    case ExperimentKind::rank_disagreement: {
        const RankDisagreementParams p = parse_rank_disagreement(cfg, view);
        view.forbid_unconsumed();
        run_rank_disagreement(p, cfg, table);
        break;
    }
    }
    return table;
}

} // namespace illusion::harness
