#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gridev/common.hpp"

namespace gridev {

// Minimal CSV: comma-separated, no quoting (none of our fields contain commas).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name, const std::string& file) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw ParseError(file + ": missing column '" + name + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    std::size_t width = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (first) {
            t.header = std::move(fields);
            width = t.header.size();
            first = false;
        } else {
            if (fields.size() != width)
                throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(width) + " fields, got " +
                                 std::to_string(fields.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    if (first) throw ParseError(path + ": empty file (no header)");
    return t;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path), path_(path) {
        if (!out_) throw ParseError("cannot open " + path + " for writing");
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw ParseError("write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace gridev
