#ifndef FRFPCE_IO_HPP
#define FRFPCE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace frfpce::io {

/// Formats a double with enough digits to round-trip ("%.12g").
std::string format_number(double v);

/// Writes text to path atomically (temp file + rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Comma-separated table with one header row; every cell pre-formatted.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);
    void write(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::string body_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace frfpce::io

#endif
