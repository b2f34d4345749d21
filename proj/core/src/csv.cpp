/*
 * Copyright 2026 The cwishart Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cwishart/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cwishart/error.hpp"

namespace cwishart {

std::size_t CsvTable::rows() const
{
    return columns.empty() ? 0 : columns.front().size();
}

void CsvTable::add_column(std::string name, std::vector<double> values)
{
    if (!columns.empty() && values.size() != rows()) {
        throw ValueError("column '" + name + "' has " + std::to_string(values.size()) +
                         " rows, expected " + std::to_string(rows()));
    }
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
}

const std::vector<double>& CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return columns[i];
        }
    }
    throw ValueError("no column named '" + name + "'");
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const CsvTable& table)
{
    for (const auto& [key, value] : table.metadata) {
        out << "# " << key << ": " << value << '\n';
    }
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        out << (c ? "," : "") << table.header[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            out << (c ? "," : "") << format_double(table.columns[c][r]);
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_csv(out, table);
    if (!out) {
        throw IoError("error while writing " + path.string());
    }
}

void write_text_csv(std::ostream& out,
                    const std::vector<std::pair<std::string, std::string>>& metadata,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows)
{
    for (const auto& [key, value] : metadata) {
        out << "# " << key << ": " << value << '\n';
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw ValueError("row has " + std::to_string(row.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << row[c];
        }
        out << '\n';
    }
}

void write_text_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& metadata,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_text_csv(out, metadata, header, rows);
    if (!out) {
        throw IoError("error while writing " + path.string());
    }
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const auto colon = line.find(':');
            const auto key_begin = line.find_first_not_of(" #");
            if (colon != std::string::npos && key_begin < colon) {
                std::string value = line.substr(colon + 1);
                if (!value.empty() && value.front() == ' ') {
                    value.erase(0, 1);
                }
                table.metadata.emplace_back(line.substr(key_begin, colon - key_begin),
                                            value);
            }
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!have_header) {
            while (std::getline(ss, cell, ',')) {
                table.header.push_back(cell);
            }
            table.columns.resize(table.header.size());
            have_header = true;
            continue;
        }
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= table.columns.size()) {
                throw ValueError("line " + std::to_string(line_no) + ": too many fields");
            }
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                throw ValueError("line " + std::to_string(line_no) +
                                 ": invalid number '" + cell + "'");
            }
            table.columns[c++].push_back(v);
        }
        if (c != table.columns.size()) {
            throw ValueError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.columns.size()) + " fields");
        }
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_csv(in);
}

}  // namespace cwishart
