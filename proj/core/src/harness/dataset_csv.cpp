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

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>
#include <vector>

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

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

[[noreturn]] void fail_cell(std::size_t line_no, const std::string& column,
                            const std::string& text, const char* expected) {
    throw IngestionError("line " + std::to_string(line_no) + ", column '" + column +
                         "': cannot parse '" + text + "' as " + expected);
}

double parse_double_cell(const std::string& text, std::size_t line_no,
                         const std::string& column) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        fail_cell(line_no, column, text, "a number");
    }
    return v;
}

std::int64_t parse_int_cell(const std::string& text, std::size_t line_no,
                            const std::string& column) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        fail_cell(line_no, column, text, "an integer");
    }
    return static_cast<std::int64_t>(v);
}

} // namespace

LoadedDataset load_dataset_csv(const std::string& path, const std::string& label_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError("cannot open dataset file '" + path + "'");
    }

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw IngestionError("dataset file '" + path + "' is empty");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const std::vector<std::string> header = split_line(line);

    std::set<std::string> seen_names;
    for (const std::string& name : header) {
        if (name.empty()) {
            throw IngestionError("line 1: empty column name in header");
        }
        if (!seen_names.insert(name).second) {
            throw IngestionError("line 1: duplicate column name '" + name + "'");
        }
    }

    std::size_t label_at = header.size();
    std::size_t time_at = header.size();
    std::size_t latent_at = header.size();
    std::vector<std::string> feature_names;
    std::vector<std::size_t> feature_at;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == label_column) {
            label_at = j;
        } else if (header[j] == "t") {
            time_at = j;
        } else if (header[j] == "latent") {
            latent_at = j;
        } else {
            feature_names.push_back(header[j]);
            feature_at.push_back(j);
        }
    }
    if (label_at == header.size()) {
        throw IngestionError("dataset file '" + path + "' has no column named '" +
                             label_column + "'");
    }
    if (feature_names.empty()) {
        throw IngestionError("dataset file '" + path + "' has no feature columns");
    }

    std::vector<std::vector<double>> feature_rows;
    std::vector<int> labels;
    std::vector<std::int64_t> times;
    std::vector<double> latents;
    std::vector<std::string> class_names;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size()) {
            throw IngestionError("line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }

        std::vector<double> row(feature_at.size());
        for (std::size_t k = 0; k < feature_at.size(); ++k) {
            row[k] = parse_double_cell(fields[feature_at[k]], line_no, feature_names[k]);
        }
        feature_rows.push_back(std::move(row));

        const std::string& label_text = fields[label_at];
        if (label_text.empty()) {
            fail_cell(line_no, label_column, label_text, "a class label");
        }
        std::size_t which = class_names.size();
        for (std::size_t c = 0; c < class_names.size(); ++c) {
            if (class_names[c] == label_text) {
                which = c;
                break;
            }
        }
        if (which == class_names.size()) {
            if (class_names.size() == 2) {
                throw UnsupportedClassError("line " + std::to_string(line_no) +
                                            ", column '" + label_column +
                                            "': third class value '" + label_text +
                                            "' (only two classes are supported)");
            }
            class_names.push_back(label_text);
        }
        labels.push_back(static_cast<int>(which));

        if (time_at < header.size()) {
            times.push_back(parse_int_cell(fields[time_at], line_no, "t"));
        }
        if (latent_at < header.size()) {
            latents.push_back(parse_double_cell(fields[latent_at], line_no, "latent"));
        }
    }

    if (feature_rows.empty()) {
        throw IngestionError("dataset file '" + path + "' has no data rows");
    }

    LoadedDataset out;
    out.label_column = label_column;
    out.class0_name = class_names.at(0);
    out.class1_name = class_names.size() > 1 ? class_names[1] : "";

    const auto n = static_cast<Eigen::Index>(feature_rows.size());
    const auto p = static_cast<Eigen::Index>(feature_names.size());
    out.data.features.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            out.data.features(i, j) =
                    feature_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    out.data.labels = std::move(labels);
    out.data.feature_names = std::move(feature_names);
    if (!times.empty()) {
        out.data.time_index = std::move(times);
    }
    if (!latents.empty()) {
        out.data.latent_score = Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                latents.data(), static_cast<Eigen::Index>(latents.size())));
    }

    try {
        out.data.validate();
    } catch (const Error& e) {
        throw IngestionError("dataset file '" + path + "' is not usable: " +
                             std::string(e.what()));
    }
    return out;
}

} // namespace illusion::harness
