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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <illusion/version.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

namespace {

// Result of one command-line invocation: exit code plus merged output.
struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_tool(const std::string& args) {
    const std::string command = std::string("\"") + ILLUSION_LAB_BINARY + "\" " + args +
                                " 2>&1";
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    while (std::fgets(buffer, sizeof(buffer), pipe) != nullptr) {
        result.output += buffer;
    }
    const int status = pclose(pipe);
    REQUIRE(status != -1);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

struct ScratchDir {
    std::filesystem::path path;

    ScratchDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("illusion-cli-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string curves_config() {
    return "kind = variance-curves\n"
           "seed = 5\n"
           "[variance-curves]\n"
           "tau = 0.5\n"
           "rho_list = 0, 0.5\n"
           "d_max = 8\n";
}

} // namespace

TEST_CASE("a run writes its results file and reports a summary line") {
    ScratchDir dir;
    const std::string cfg = dir.file("curves.ini");
    const std::string out = dir.file("curves.csv");
    write_text(cfg, curves_config());
    const RunResult result =
        run_tool("variance-curves --config \"" + cfg + "\" --out \"" + out + "\"");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find("rows written to") != std::string::npos);
    CHECK(result.output.find("kind variance-curves") != std::string::npos);
    REQUIRE(std::filesystem::exists(out));
    const std::string bytes = read_bytes(out);
    CHECK(bytes.rfind("# kind: variance-curves", 0) == 0);
    CHECK(bytes.find("# seed: 5") != std::string::npos);
}

TEST_CASE("the seed override is recorded in the output metadata") {
    ScratchDir dir;
    const std::string cfg = dir.file("curves.ini");
    const std::string out = dir.file("curves.csv");
    write_text(cfg, curves_config());
    const RunResult result = run_tool("variance-curves --config \"" + cfg +
                                      "\" --out \"" + out + "\" --seed 99");
    CHECK(result.exit_code == 0);
    CHECK(read_bytes(out).find("# seed: 99") != std::string::npos);
    CHECK(result.output.find("seed 99") != std::string::npos);
}

TEST_CASE("quiet mode suppresses the summary but not the work") {
    ScratchDir dir;
    const std::string cfg = dir.file("curves.ini");
    const std::string out = dir.file("curves.csv");
    write_text(cfg, curves_config());
    const RunResult result = run_tool("variance-curves --config \"" + cfg +
                                      "\" --out \"" + out + "\" --quiet");
    CHECK(result.exit_code == 0);
    CHECK(result.output.empty());
    CHECK(std::filesystem::exists(out));
}

TEST_CASE("repeated runs of one configuration produce identical bytes") {
    ScratchDir dir;
    const std::string cfg = dir.file("noise.ini");
    write_text(cfg,
               "kind = label-noise\n"
               "seed = 17\n"
               "replicates = 3\n"
               "[label-noise]\n"
               "preset = delta2\n"
               "n = 300\n"
               "delta_list = 0.1, 0.2\n");
    const std::string out_a = dir.file("a.csv");
    const std::string out_b = dir.file("b.csv");
    CHECK(run_tool("label-noise --config \"" + cfg + "\" --out \"" + out_a +
                   "\" --quiet")
              .exit_code == 0);
    CHECK(run_tool("label-noise --config \"" + cfg + "\" --out \"" + out_b +
                   "\" --quiet")
              .exit_code == 0);
    const std::string bytes_a = read_bytes(out_a);
    CHECK(!bytes_a.empty());
    CHECK(bytes_a == read_bytes(out_b));
}

TEST_CASE("usage errors exit with the configuration code") {
    ScratchDir dir;
    const std::string cfg = dir.file("curves.ini");
    write_text(cfg, curves_config());
    CHECK(run_tool("variance-curves --config \"" + cfg + "\" --frobnicate").exit_code ==
          2);
    CHECK(run_tool("variance-curves").exit_code == 2);
    CHECK(run_tool("").exit_code == 2);
    CHECK(run_tool("unknown-subcommand --config \"" + cfg + "\"").exit_code == 2);
}

TEST_CASE("a config whose kind disagrees with the subcommand is refused") {
    ScratchDir dir;
    const std::string cfg = dir.file("curves.ini");
    write_text(cfg, curves_config());
    const RunResult result = run_tool("flat-max --config \"" + cfg + "\"");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("variance-curves") != std::string::npos);
    CHECK(result.output.find("flat-max") != std::string::npos);
}

TEST_CASE("the subcommand fills in a missing kind key") {
    ScratchDir dir;
    const std::string cfg = dir.file("kindless.ini");
    const std::string out = dir.file("out.csv");
    write_text(cfg,
               "seed = 4\n"
               "[variance-curves]\n"
               "tau = 0.5\n"
               "rho_list = 0.5\n"
               "d_max = 5\n");
    const RunResult result =
        run_tool("variance-curves --config \"" + cfg + "\" --out \"" + out + "\"");
    CHECK(result.exit_code == 0);
    CHECK(std::filesystem::exists(out));
}

TEST_CASE("config syntax and semantic errors exit with the configuration code") {
    ScratchDir dir;
    const std::string bad_syntax = dir.file("broken.ini");
    write_text(bad_syntax, "this line has no equals sign\n");
    CHECK(run_tool("variance-curves --config \"" + bad_syntax + "\"").exit_code == 2);

    const std::string bad_key = dir.file("stray.ini");
    write_text(bad_key, curves_config() + "mystery = 1\n");
    const RunResult result = run_tool("variance-curves --config \"" + bad_key + "\"");
    CHECK(result.exit_code == 2);
    CHECK(result.output.find("mystery") != std::string::npos);

    CHECK(run_tool("variance-curves --config \"" + dir.file("absent.ini") + "\"")
              .exit_code == 2);
}

TEST_CASE("a missing dataset file exits with the ingestion code") {
    ScratchDir dir;
    const std::string cfg = dir.file("sweep.ini");
    write_text(cfg,
               "kind = diminishing-returns\n"
               "replicates = 2\n"
               "[diminishing-returns]\n"
               "source = csv\n"
               "csv = " + dir.file("not-there.csv") + "\n"
               "label = class\n"
               "family = tree\n"
               "levels = 1, 2\n");
    const RunResult result = run_tool("diminishing-returns --config \"" + cfg + "\"");
    CHECK(result.exit_code == 3);
}

TEST_CASE("validate-config checks without running") {
    ScratchDir dir;
    const std::string cfg = dir.file("curves.ini");
    write_text(cfg, curves_config());
    const RunResult good = run_tool("validate-config --config \"" + cfg + "\"");
    CHECK(good.exit_code == 0);
    CHECK(good.output.find("configuration OK") != std::string::npos);
    CHECK(!std::filesystem::exists(dir.file("variance-curves.csv")));

    const std::string bad = dir.file("bad.ini");
    write_text(bad, curves_config() + "mystery = 1\n");
    CHECK(run_tool("validate-config --config \"" + bad + "\"").exit_code == 2);
}

TEST_CASE("the version flag prints the library version") {
    const RunResult result = run_tool("--version");
    CHECK(result.exit_code == 0);
    CHECK(result.output.find(illusion::kVersion) != std::string::npos);
}
