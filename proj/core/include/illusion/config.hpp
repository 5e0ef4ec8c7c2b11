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

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace illusion::harness {

/// Flat sectioned key-value configuration file. The complete grammar:
///
///   file     = { line }
///   line     = blank | comment | section | pair
///   comment  = ws '#' any-text
///   section  = ws '[' name ']' ws
///   pair     = ws key ws '=' ws value ws
///   name,key = 1*( ALPHA | DIGIT | '_' | '-' | '.' )
///   value    = any text, trimmed of surrounding whitespace
///
/// Pairs before the first section header belong to the top-level section,
/// addressed as "". List-valued keys hold comma-separated items. Repeating
/// a key within a section or repeating a section header is an error; every
/// violation raises ConfigurationError naming the line.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text,
                                   const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    /// Value pointer, or nullptr when absent.
    const std::string* find(const std::string& section, const std::string& key) const;
    /// Keys of one section in file order.
    std::vector<std::string> keys_in(const std::string& section) const;
    /// All (section, key) pairs in file order.
    std::vector<std::pair<std::string, std::string>> entries() const;

    /// Stable normalized rendering: "section.key=value" lines sorted
    /// lexicographically. Used for hashing a configuration's identity.
    std::string canonical(const std::set<std::string>& exclude_top_level_keys = {}) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    struct Entry {
        std::string section;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries_;
};

/// Typed, consumption-tracking reader over a ConfigFile. Every getter marks
/// its key consumed; forbid_unconsumed() then rejects configurations with
/// unknown keys, which catches misspellings. Conversion failures raise
/// ConfigurationError naming the key.
class ConfigView {
public:
    explicit ConfigView(const ConfigFile& file) : file_(&file) {}

    std::string require_string(const std::string& section, const std::string& key);
    std::optional<std::string> optional_string(const std::string& section,
                                               const std::string& key);

    double require_double(const std::string& section, const std::string& key);
    double optional_double(const std::string& section, const std::string& key,
                           double fallback);

    long require_int(const std::string& section, const std::string& key);
    long optional_int(const std::string& section, const std::string& key, long fallback);

    std::uint64_t optional_u64(const std::string& section, const std::string& key,
                               std::uint64_t fallback);

    bool optional_bool(const std::string& section, const std::string& key, bool fallback);

    std::vector<double> require_double_list(const std::string& section,
                                            const std::string& key);
    std::vector<long> require_int_list(const std::string& section, const std::string& key);
    std::vector<std::string> require_string_list(const std::string& section,
                                                 const std::string& key);
    std::optional<std::vector<double>> optional_double_list(const std::string& section,
                                                            const std::string& key);

    /// Marks a key consumed without reading it.
    void ignore(const std::string& section, const std::string& key);

    /// Throws ConfigurationError listing every present key that was never
    /// consumed.
    void forbid_unconsumed() const;

private:
    const std::string* take(const std::string& section, const std::string& key);

    const ConfigFile* file_;
    std::set<std::pair<std::string, std::string>> consumed_;
};

} // namespace illusion::harness
