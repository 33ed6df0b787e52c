#include "rlg/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rlg::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : n_columns_(columns.size()) {
    if (columns.empty()) {
        throw std::invalid_argument("CsvWriter: no columns");
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) {
            buffer_ += ',';
        }
        buffer_ += columns[i];
    }
    buffer_ += "\r\n";
}

void CsvWriter::add_row(std::span<const double> values) {
    if (values.size() != n_columns_) {
        throw std::invalid_argument("CsvWriter: wrong number of values");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            buffer_ += ',';
        }
        buffer_ += format_double(values[i]);
    }
    buffer_ += "\r\n";
}

void CsvWriter::add_row(std::span<const std::string> values) {
    if (values.size() != n_columns_) {
        throw std::invalid_argument("CsvWriter: wrong number of values");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            buffer_ += ',';
        }
        buffer_ += values[i];
    }
    buffer_ += "\r\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw std::runtime_error("write_file_atomic: write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace rlg::io
