#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "caa/types.hpp"

namespace caa::detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline long parse_long(const std::string& s, std::size_t row, const char* field) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw DataError("row " + std::to_string(row) + ": field '" + field + "' is not an integer: '" + s + "'");
    return v;
}

inline double parse_double(const std::string& s, std::size_t row, const char* field) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("row " + std::to_string(row) + ": field '" + field + "' is not a number: '" + s + "'");
    }
}

// Opens a TSV file, checks the header, and calls fn(row_number, columns) per
// data line. Blank lines and lines starting with '#' are skipped.
template <typename Fn>
void for_each_row(const std::filesystem::path& path, const std::vector<std::string>& expected_header,
                  Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::string line;
    std::size_t row = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cols = split(line, '\t');
        if (!saw_header) {
            if (cols != expected_header) {
                std::ostringstream msg;
                msg << path.string() << ": unexpected header, expected:";
                for (const auto& h : expected_header) msg << " " << h;
                throw DataError(msg.str());
            }
            saw_header = true;
            continue;
        }
        if (cols.size() != expected_header.size())
            throw DataError(path.string() + " row " + std::to_string(row) + ": expected " +
                            std::to_string(expected_header.size()) + " columns, got " +
                            std::to_string(cols.size()));
        fn(row, cols);
    }
    if (!saw_header) throw DataError(path.string() + ": no records");
}

}  // namespace caa::detail
