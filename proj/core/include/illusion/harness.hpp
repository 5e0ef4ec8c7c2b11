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

#include <illusion/config.hpp>
#include <illusion/dataset.hpp>
#include <illusion/evalmetrics.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace illusion::harness {

/// The seven experiment families the command line exposes.
enum class ExperimentKind {
    variance_curves,
    flat_max,
    label_noise,
    diminishing_returns,
    drift_replay,
    proportion,
    rank_disagreement,
};

std::string to_string(ExperimentKind kind);
/// Accepts the hyphenated names ("variance-curves", ...); unknown names raise
/// ConfigurationError listing the valid set.
ExperimentKind experiment_kind_from_string(const std::string& name);

/// A fully parsed experiment configuration. `file` keeps every key-value
/// pair; kind-specific keys live in the section named after the kind.
///
/// Top-level keys:
///   kind        required, one of the seven experiment names
///   seed        optional unsigned integer, default 0
///   replicates  optional, default 1; must be >= 2 whenever the experiment
///               reports confidence intervals
///   parallel    optional bool, default false; replicate r always consumes
///               the substream derived from (seed, r), so the flag cannot
///               change any result byte
///   out         optional output path, default "<kind>.csv"
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::variance_curves;
    std::uint64_t seed = 0;
    long replicates = 1;
    bool parallel = false;
    std::string output_path;
    ConfigFile file;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_file(ConfigFile file);
};

/// Hex FNV-1a 64-bit digest of the canonical configuration text with the
/// effective seed appended. Keys that cannot affect results (out, parallel,
/// quiet) are excluded, so re-running with a different output path or thread
/// count reproduces the digest.
std::string config_hash(const ExperimentConfig& cfg);

/// Experiment output: metric rows plus the provenance needed to reproduce
/// them. Writing the same table twice yields identical bytes.
struct ResultTable {
    std::string kind;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::string version;
    std::vector<metrics::EvalRecord> rows;
};

enum class ResultFormat {
    csv,      ///< '#'-prefixed metadata comments, then header and rows.
    csv_bare, ///< Identical rows without the comment lines.
};

/// Writes index,metric,value,ci_half_width,label rows with 17 significant
/// digits so doubles round-trip exactly.
void write_results(const ResultTable& table, const std::string& path,
                   ResultFormat format = ResultFormat::csv);
std::string render_results(const ResultTable& table,
                           ResultFormat format = ResultFormat::csv);
/// Reads a file produced by write_results (either format; bare files come
/// back with empty metadata). Malformed input raises IngestionError.
ResultTable read_results(const std::string& path);

/// Dataset read from CSV along with the label mapping that was applied:
/// the label column's first-seen value becomes class 0, the second distinct
/// value class 1. A third distinct value raises UnsupportedClassError.
struct LoadedDataset {
    Dataset data;
    std::string label_column;
    std::string class0_name;
    std::string class1_name;
};

/// Loads a header-bearing CSV. Every column except the label column, an
/// optional integer `t` column (time order) and an optional numeric `latent`
/// column must parse as a double feature. Failures raise IngestionError
/// naming the row and column.
LoadedDataset load_dataset_csv(const std::string& path, const std::string& label_column);

/// Checks every key of the configuration, including kind-specific sections,
/// without running anything. Unknown or ill-typed keys raise
/// ConfigurationError.
void validate_experiment_config(const ExperimentConfig& cfg);

/// Runs the configured experiment and returns its table. Deterministic for
/// fixed (config, seed) regardless of the parallel flag.
ResultTable run_experiment(const ExperimentConfig& cfg);

} // namespace illusion::harness
