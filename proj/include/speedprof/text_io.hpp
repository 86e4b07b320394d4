#pragma once

// Small helpers shared by the CSV readers/writers. Parsing works on
// string_views over a file slurped into memory; numbers go through
// std::from_chars so large history files parse quickly.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <fmt/format.h>

#include "speedprof/error.hpp"

namespace speedprof::text {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInput(path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io.write_failed", "cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("io.write_failed", "write failed: " + path.string());
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Iterates over the lines of a buffer, tracking 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::string_view buf) : buf_(buf) {}

    bool next(std::string_view& line) {
        if (pos_ >= buf_.size()) return false;
        const auto end = buf_.find('\n', pos_);
        const auto stop = end == std::string_view::npos ? buf_.size() : end;
        line = buf_.substr(pos_, stop - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = stop + 1;
        ++line_no_;
        return true;
    }

    /// Like next() but skips blank lines.
    bool next_nonblank(std::string_view& line) {
        while (next(line)) {
            if (!trim(line).empty()) return true;
        }
        return false;
    }

    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::string_view buf_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

inline void split(std::string_view line, char sep, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const auto p = line.find(sep, start);
        if (p == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return;
        }
        out.push_back(trim(line.substr(start, p - start)));
        start = p + 1;
    }
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    split(line, sep, out);
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && !s.empty();
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, out);
    return res.ec == std::errc{} && res.ptr == last && !s.empty();
}

/// Shortest representation that round-trips to the same double.
inline std::string num(double v) { return fmt::format("{}", v); }

/// Checks that a header row matches the expected field names.
inline bool header_matches(std::string_view line, const std::vector<std::string_view>& expected) {
    const auto fields = split(line, ',');
    if (fields.size() != expected.size()) return false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != expected[i]) return false;
    }
    return true;
}

} // namespace speedprof::text
