// io.hpp — Deterministic CSV and file output: 17 significant digits so
// doubles round-trip exactly, RFC-4180 row format, and atomic writes
// (temp file + rename) so failures never leave partial outputs.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rlg::io {

// Shortest-exact decimal formatting (printf %.17g trimmed).
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(std::span<const double> values);
    void add_row(std::span<const std::string> values);

    const std::string& content() const { return buffer_; }

private:
    std::size_t n_columns_;
    std::string buffer_;
};

// Writes to `<path>.tmp` in the target directory, then renames into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rlg::io
