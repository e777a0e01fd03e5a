#include "frfpce/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "frfpce/errors.hpp"

namespace frfpce::io {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    std::ostringstream line;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) line << ',';
        line << header[i];
    }
    line << '\n';
    body_ = line.str();
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw IoError("csv: row width does not match header");
    std::ostringstream line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line << ',';
        line << cells[i];
    }
    line << '\n';
    body_ += line.str();
}

void CsvWriter::add_row(const std::vector<double>& cells) {
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (double v : cells) text.push_back(format_number(v));
    add_row(text);
}

void CsvWriter::write(const std::filesystem::path& path) const {
    atomic_write(path, body_);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace frfpce::io
