/*
   Copyright 2026 The brwlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace brw {

/// printf("%.17g") equivalent; round-trips every finite double.
std::string format_double(double v);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Minimal CSV builder; cells are appended in order and rows end with '\n'.
class CsvBuilder {
public:
    explicit CsvBuilder(std::initializer_list<std::string_view> header);
    explicit CsvBuilder(const std::vector<std::string>& header);

    CsvBuilder& cell(double v);
    CsvBuilder& cell(long long v);
    CsvBuilder& cell(unsigned long long v);
    CsvBuilder& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvBuilder& cell(unsigned long v) { return cell(static_cast<unsigned long long>(v)); }
    CsvBuilder& cell(long v) { return cell(static_cast<long long>(v)); }
    CsvBuilder& cell(std::string_view v);
    CsvBuilder& cell(bool v) { return cell(static_cast<long long>(v ? 1 : 0)); }
    CsvBuilder& end_row();

    const std::string& str() const { return out_; }

private:
    void sep();
    std::string out_;
    bool row_open_ = false;
};

/// Parses a CSV with a header row into columns of strings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const; ///< throws ConfigError if absent
};

CsvTable parse_csv(std::string_view text);
double parse_double(std::string_view s);

} // namespace brw
