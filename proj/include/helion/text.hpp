#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace helion {

// Small line/field helpers shared by the TSV readers.

inline void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Fixed notation with `digits` decimals; locale independent.
std::string format_fixed(double value, int digits);

/// Writes `contents` to a sibling temp file, then renames it over `path`.
/// Throws Error{IoFailure}.
void write_file_atomic(const std::string& path, std::string_view contents);

std::string read_file(const std::string& path);

}  // namespace helion
