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

#include "brw/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "brw/error.hpp"

namespace brw {

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec)
            throw Error(ErrorKind::IoError, "cannot create " + path.parent_path().string());
    }
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(static_cast<long>(::getpid()));
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw Error(ErrorKind::IoError, "cannot open " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            os.close();
            fs::remove(tmp, ec);
            throw Error(ErrorKind::IoError, "write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot rename into " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorKind::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

CsvBuilder::CsvBuilder(std::initializer_list<std::string_view> header)
{
    for (auto h : header)
        cell(h);
    end_row();
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header)
{
    for (const auto& h : header)
        cell(std::string_view(h));
    end_row();
}

void CsvBuilder::sep()
{
    if (row_open_)
        out_ += ',';
    row_open_ = true;
}

CsvBuilder& CsvBuilder::cell(double v)
{
    sep();
    out_ += format_double(v);
    return *this;
}

CsvBuilder& CsvBuilder::cell(long long v)
{
    sep();
    out_ += std::to_string(v);
    return *this;
}

CsvBuilder& CsvBuilder::cell(unsigned long long v)
{
    sep();
    out_ += std::to_string(v);
    return *this;
}

CsvBuilder& CsvBuilder::cell(std::string_view v)
{
    sep();
    out_.append(v);
    return *this;
}

CsvBuilder& CsvBuilder::end_row()
{
    out_ += '\n';
    row_open_ = false;
    return *this;
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name)
            return i;
    }
    throw Error(ErrorKind::ConfigError, "missing CSV column " + std::string(name));
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable t;
    bool first = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                cells.emplace_back(line.substr(start));
                break;
            }
            cells.emplace_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

double parse_double(std::string_view s)
{
    if (s == "inf")
        return INFINITY;
    if (s == "-inf")
        return -INFINITY;
    if (s == "nan")
        return NAN;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::ConfigError, "not a number: " + std::string(s));
    return v;
}

} // namespace brw
