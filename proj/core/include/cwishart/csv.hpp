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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cwishart {

/// A numeric table with named columns and `#`-prefixed metadata lines.
///
/// The text layout is: metadata lines "# key: value", one header row, then
/// comma-separated rows printed with 17 significant digits so that reading
/// a table back reproduces every value exactly.
struct CsvTable
{
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const;
    /// Append a column; throws ValueError if its length differs from the
    /// existing columns.
    void add_column(std::string name, std::vector<double> values);
    /// Column by name; throws ValueError if absent.
    const std::vector<double>& column(const std::string& name) const;
};

void write_csv(std::ostream& out, const CsvTable& table);
/// Throws IoError when the file cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parse the layout written by write_csv.  Throws ValueError on malformed
/// rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Write rows of preformatted text cells in the same layout (used for
/// tables that mix labels and numbers).
void write_text_csv(std::ostream& out,
                    const std::vector<std::pair<std::string, std::string>>& metadata,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);
void write_text_csv(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& metadata,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

/// Shortest decimal text that round-trips a double.
std::string format_double(double v);

}  // namespace cwishart
