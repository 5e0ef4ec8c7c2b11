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

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace illusion::harness {

namespace {

constexpr const char* kHeader = "index,metric,value,ci_half_width,label";

std::string fmt(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void check_field(const std::string& text, const char* what) {
    for (char c : text) {
        if (c == ',' || c == '\n' || c == '\r') {
            throw PreconditionError(std::string(what) +
                                    " must not contain commas or line breaks: '" + text +
                                    "'");
        }
    }
}

double parse_double_field(const std::string& text, std::size_t line_no,
                          const char* column) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw IngestionError("results line " + std::to_string(line_no) + ", column " +
                             column + ": cannot parse '" + text + "' as a number");
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

// Metadata comments look like "# name: value".
bool parse_meta(const std::string& line, std::string& name, std::string& value) {
    if (line.size() < 2 || line[0] != '#' || line[1] != ' ') {
        return false;
    }
    const std::size_t colon = line.find(": ", 2);
    if (colon == std::string::npos) {
        return false;
    }
    name = line.substr(2, colon - 2);
    value = line.substr(colon + 2);
    return true;
}

} // namespace

std::string render_results(const ResultTable& table, ResultFormat format) {
    check_field(table.kind, "table kind");
    check_field(table.config_digest, "config digest");
    check_field(table.version, "version");

    std::string out;
    if (format == ResultFormat::csv) {
        out += "# kind: " + table.kind + "\n";
        out += "# version: " + table.version + "\n";
        out += "# seed: " + std::to_string(table.seed) + "\n";
        out += "# config: " + table.config_digest + "\n";
    }
    out += kHeader;
    out += '\n';
    for (const metrics::EvalRecord& row : table.rows) {
        check_field(row.label, "row label");
        out += fmt(row.index);
        out += ',';
        out += metrics::to_string(row.metric.id);
        out += ',';
        out += fmt(row.value);
        out += ',';
        out += fmt(row.ci_half_width);
        out += ',';
        out += row.label;
        out += '\n';
    }
    return out;
}

void write_results(const ResultTable& table, const std::string& path,
                   ResultFormat format) {
    const std::string text = render_results(table, format);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw IoError("failed while writing '" + path + "'");
    }
}

ResultTable read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open results file '" + path + "'");
    }
    ResultTable table;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::string name;
            std::string value;
            if (parse_meta(line, name, value)) {
                if (name == "kind") {
                    table.kind = value;
                } else if (name == "version") {
                    table.version = value;
                } else if (name == "seed") {
                    table.seed = static_cast<std::uint64_t>(
                            std::strtoull(value.c_str(), nullptr, 10));
                } else if (name == "config") {
                    table.config_digest = value;
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line != kHeader) {
                throw IngestionError("results line " + std::to_string(line_no) +
                                     ": expected header '" + kHeader + "', found '" +
                                     line + "'");
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 5) {
            throw IngestionError("results line " + std::to_string(line_no) + ": expected 5 fields, found " +
                                 std::to_string(fields.size()));
        }
        metrics::EvalRecord row;
        row.index = parse_double_field(fields[0], line_no, "index");
        try {
            row.metric = metrics::MetricKind(metrics::metric_id_from_string(fields[1]));
        } catch (const Error& e) {
            throw IngestionError("results line " + std::to_string(line_no) + ": " +
                                 e.what());
        }
        row.value = parse_double_field(fields[2], line_no, "value");
        row.ci_half_width = parse_double_field(fields[3], line_no, "ci_half_width");
        row.label = fields[4];
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw IngestionError("results file '" + path + "' has no header line");
    }
    return table;
}

} // namespace illusion::harness
