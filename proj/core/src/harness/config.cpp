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
#include <illusion/config.hpp>
#include <illusion/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace illusion::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])) != 0) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])) != 0) {
        --end;
    }
    return s.substr(begin, end - begin);
}

bool valid_name(const std::string& s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' ||
                  c == '-' || c == '.';
        if (!ok) {
            return false;
        }
    }
    return true;
}

std::string spot(const std::string& origin, std::size_t line) {
    return origin + ":" + std::to_string(line);
}

std::string address(const std::string& section, const std::string& key) {
    if (section.empty()) {
        return key;
    }
    return section + "." + key;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::string current;
    std::stringstream in(value);
    while (std::getline(in, current, ',')) {
        items.push_back(trim(current));
    }
    if (!value.empty() && value.back() == ',') {
        items.emplace_back();
    }
    return items;
}

double parse_double_item(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigurationError("empty numeric value for " + where);
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) {
        throw ConfigurationError("cannot parse '" + t + "' as a number for " + where);
    }
    return v;
}

long parse_long_item(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigurationError("empty integer value for " + where);
    }
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE) {
        throw ConfigurationError("cannot parse '" + t + "' as an integer for " + where);
    }
    return v;
}

} // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile out;
    std::set<std::string> seen_sections;
    std::set<std::pair<std::string, std::string>> seen_keys;
    std::string section;
    seen_sections.insert(section);

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigurationError(spot(origin, line_no) +
                                         ": section header missing closing ']'");
            }
            const std::string name = trim(line.substr(1, line.size() - 2));
            if (!valid_name(name)) {
                throw ConfigurationError(spot(origin, line_no) +
                                         ": invalid section name '" + name + "'");
            }
            if (!seen_sections.insert(name).second) {
                throw ConfigurationError(spot(origin, line_no) + ": duplicate section [" +
                                         name + "]");
            }
            section = name;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError(spot(origin, line_no) +
                                     ": expected 'key = value' or a section header");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_name(key)) {
            throw ConfigurationError(spot(origin, line_no) + ": invalid key '" + key + "'");
        }
        if (!seen_keys.insert({section, key}).second) {
            throw ConfigurationError(spot(origin, line_no) + ": duplicate key '" +
                                     address(section, key) + "'");
        }
        out.entries_.push_back({section, key, value});
    }
    return out;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigurationError("cannot open configuration file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const std::string* ConfigFile::find(const std::string& section,
                                    const std::string& key) const {
    for (const Entry& e : entries_) {
        if (e.section == section && e.key == key) {
            return &e.value;
        }
    }
    return nullptr;
}

std::vector<std::string> ConfigFile::keys_in(const std::string& section) const {
    std::vector<std::string> keys;
    for (const Entry& e : entries_) {
        if (e.section == section) {
            keys.push_back(e.key);
        }
    }
    return keys;
}

std::vector<std::pair<std::string, std::string>> ConfigFile::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(entries_.size());
    for (const Entry& e : entries_) {
        out.emplace_back(e.section, e.key);
    }
    return out;
}

std::string ConfigFile::canonical(const std::set<std::string>& exclude_top_level_keys) const {
    std::vector<std::string> lines;
    lines.reserve(entries_.size());
    for (const Entry& e : entries_) {
        if (e.section.empty() && exclude_top_level_keys.count(e.key) > 0) {
            continue;
        }
        lines.push_back(address(e.section, e.key) + "=" + e.value);
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const std::string& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

void ConfigFile::set(const std::string& section, const std::string& key,
                     const std::string& value) {
    for (Entry& e : entries_) {
        if (e.section == section && e.key == key) {
            e.value = value;
            return;
        }
    }
    entries_.push_back({section, key, value});
}

const std::string* ConfigView::take(const std::string& section, const std::string& key) {
    consumed_.insert({section, key});
    return file_->find(section, key);
}

std::string ConfigView::require_string(const std::string& section, const std::string& key) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        throw ConfigurationError("missing required key '" + address(section, key) + "'");
    }
    return *v;
}

std::optional<std::string> ConfigView::optional_string(const std::string& section,
                                                       const std::string& key) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        return std::nullopt;
    }
    return *v;
}

double ConfigView::require_double(const std::string& section, const std::string& key) {
    return parse_double_item(require_string(section, key), address(section, key));
}

double ConfigView::optional_double(const std::string& section, const std::string& key,
                                   double fallback) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        return fallback;
    }
    return parse_double_item(*v, address(section, key));
}

long ConfigView::require_int(const std::string& section, const std::string& key) {
    return parse_long_item(require_string(section, key), address(section, key));
}

long ConfigView::optional_int(const std::string& section, const std::string& key,
                              long fallback) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        return fallback;
    }
    return parse_long_item(*v, address(section, key));
}

std::uint64_t ConfigView::optional_u64(const std::string& section, const std::string& key,
                                       std::uint64_t fallback) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        return fallback;
    }
    const std::string t = trim(*v);
    if (t.empty()) {
        throw ConfigurationError("empty integer value for " + address(section, key));
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE || t.front() == '-') {
        throw ConfigurationError("cannot parse '" + t + "' as an unsigned integer for " +
                                 address(section, key));
    }
    return static_cast<std::uint64_t>(parsed);
}

bool ConfigView::optional_bool(const std::string& section, const std::string& key,
                               bool fallback) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        return fallback;
    }
    const std::string t = trim(*v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no" || t == "off") {
        return false;
    }
    throw ConfigurationError("cannot parse '" + t + "' as a boolean for " +
                             address(section, key));
}

std::vector<double> ConfigView::require_double_list(const std::string& section,
                                                    const std::string& key) {
    const std::string raw = require_string(section, key);
    std::vector<double> out;
    for (const std::string& item : split_list(raw)) {
        out.push_back(parse_double_item(item, address(section, key)));
    }
    if (out.empty()) {
        throw ConfigurationError("empty list for " + address(section, key));
    }
    return out;
}

std::vector<long> ConfigView::require_int_list(const std::string& section,
                                               const std::string& key) {
    const std::string raw = require_string(section, key);
    std::vector<long> out;
    for (const std::string& item : split_list(raw)) {
        out.push_back(parse_long_item(item, address(section, key)));
    }
    if (out.empty()) {
        throw ConfigurationError("empty list for " + address(section, key));
    }
    return out;
}

std::vector<std::string> ConfigView::require_string_list(const std::string& section,
                                                         const std::string& key) {
    const std::string raw = require_string(section, key);
    std::vector<std::string> out;
    for (const std::string& item : split_list(raw)) {
        if (item.empty()) {
            throw ConfigurationError("empty list item for " + address(section, key));
        }
        out.push_back(item);
    }
    if (out.empty()) {
        throw ConfigurationError("empty list for " + address(section, key));
    }
    return out;
}

std::optional<std::vector<double>> ConfigView::optional_double_list(
        const std::string& section, const std::string& key) {
    const std::string* v = take(section, key);
    if (v == nullptr) {
        return std::nullopt;
    }
    std::vector<double> out;
    for (const std::string& item : split_list(*v)) {
        out.push_back(parse_double_item(item, address(section, key)));
    }
    if (out.empty()) {
        throw ConfigurationError("empty list for " + address(section, key));
    }
    return out;
}

void ConfigView::ignore(const std::string& section, const std::string& key) {
    consumed_.insert({section, key});
}

void ConfigView::forbid_unconsumed() const {
    std::vector<std::string> strays;
    for (const auto& [section, key] : file_->entries()) {
        if (consumed_.count({section, key}) == 0) {
            strays.push_back(address(section, key));
        }
    }
    if (!strays.empty()) {
        std::string joined;
        for (std::size_t i = 0; i < strays.size(); ++i) {
            if (i > 0) {
                joined += ", ";
            }
            joined += "'" + strays[i] + "'";
        }
        throw ConfigurationError("unknown configuration keys: " + joined);
    }
}

} // namespace illusion::harness
