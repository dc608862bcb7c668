#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hywave/errors.hpp"

namespace hywave {

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    if (delim == ' ') { // any-whitespace split
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) out.push_back(tok);
        return out;
    }
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& context) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    double v{};
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{}) fail(errc::schema, "bad numeric field '" + s + "' in " + context);
    (void)p;
    return v;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(errc::missing_artifact, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(errc::io, "cannot write " + path);
    f << text;
    if (!f) fail(errc::io, "short write to " + path);
}

// Reads a delimited numeric table; '#'-prefixed lines and blank lines are skipped.
// header_rows leading (non-comment) lines are returned separately as raw strings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline Table read_table(const std::string& path, char delim = ',', int header_rows = 0) {
    std::ifstream f(path);
    if (!f) fail(errc::missing_artifact, "cannot open " + path);
    Table t;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (static_cast<int>(t.header.size()) < header_rows) {
            t.header.push_back(line);
            continue;
        }
        auto fields = split_fields(line, delim);
        if (fields.empty()) continue;
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& s : fields)
            row.push_back(parse_double(s, path + ":" + std::to_string(lineno)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace hywave
