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
#include <illusion/errors.hpp>
#include <illusion/harness.hpp>
#include <illusion/version.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

// Exit codes: 0 success, 2 configuration error, 3 data ingestion error,
// 1 anything else. No environment variables are consulted.
constexpr int kOk = 0;
constexpr int kOtherError = 1;
constexpr int kConfigError = 2;
constexpr int kIngestError = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool quiet = false;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config_path, "experiment configuration file")
            ->required();
    sub->add_option("--seed", opts.seed, "override the configured seed");
    sub->add_option("--out", opts.out, "override the configured output path");
    sub->add_flag("--quiet", opts.quiet, "suppress the summary line");
}

illusion::harness::ExperimentConfig load_for_kind(const CommonOptions& opts,
                                                  const std::string& kind_name) {
    using illusion::harness::ConfigFile;
    using illusion::harness::ExperimentConfig;

    ConfigFile file = ConfigFile::parse_file(opts.config_path);
    const std::string* configured = file.find("", "kind");
    if (configured == nullptr) {
        file.set("", "kind", kind_name);
    } else if (*configured != kind_name) {
        throw illusion::ConfigurationError("configuration file declares kind '" +
                                           *configured + "' but the command line asked "
                                           "for '" + kind_name + "'");
    }
    ExperimentConfig cfg = ExperimentConfig::from_file(std::move(file));
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    if (opts.out) {
        cfg.output_path = *opts.out;
    }
    return cfg;
}

int run_kind(const CommonOptions& opts, const std::string& kind_name) {
    using namespace illusion::harness;
    const ExperimentConfig cfg = load_for_kind(opts, kind_name);
    validate_experiment_config(cfg);
    const ResultTable table = run_experiment(cfg);
    write_results(table, cfg.output_path);
    if (!opts.quiet) {
        std::cout << "kind " << table.kind << ", seed " << table.seed << ", config "
                  << table.config_digest << ": " << table.rows.size()
                  << " rows written to " << cfg.output_path << "\n";
    }
    return kOk;
}

int run_validate(const CommonOptions& opts) {
    using namespace illusion::harness;
    const ExperimentConfig cfg = ExperimentConfig::load(opts.config_path);
    validate_experiment_config(cfg);
    if (!opts.quiet) {
        std::cout << "configuration OK: kind " << to_string(cfg.kind) << ", seed "
                  << cfg.seed << ", replicates " << cfg.replicates << ", config "
                  << config_hash(cfg) << "\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"illusion-lab: simple-classifier effectiveness experiments"};
    app.set_version_flag("--version", std::string(illusion::kVersion));
    app.require_subcommand(1);

    const std::vector<std::string> kinds = {
            "variance-curves",     "flat-max",  "label-noise", "diminishing-returns",
            "drift-replay",        "proportion", "rank-disagreement",
    };

    std::vector<CommonOptions> options(kinds.size() + 1);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        CLI::App* sub = app.add_subcommand(kinds[i], "run the " + kinds[i] + " experiment");
        add_common(sub, options[i]);
    }
    CLI::App* validate =
            app.add_subcommand("validate-config", "check a configuration without running");
    add_common(validate, options.back());

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (validate->parsed()) {
            return run_validate(options.back());
        }
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            if (app.get_subcommand(kinds[i])->parsed()) {
                return run_kind(options[i], kinds[i]);
            }
        }
        std::cerr << "error: no subcommand selected\n";
        return kConfigError;
    } catch (const illusion::ConfigurationError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfigError;
    } catch (const illusion::IngestionError& e) {
        std::cerr << "ingestion error: " << e.what() << "\n";
        return kIngestError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOtherError;
    }
}
