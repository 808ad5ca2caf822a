#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "conceptseg/common.hpp"

namespace conceptseg {

/// Raw multivariate series: one row per time step, one column per channel.
struct SeriesMatrix {
    Matrix values;                           // T x d
    std::vector<std::string> channel_names;  // size d

    Index steps() const { return values.rows(); }
    Index channels() const { return values.cols(); }
};

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NormalizeMode { none, zscore_per_channel };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

inline bool parse_cell(const std::string& cell, double& out) {
    // strtod accepts surrounding spaces via manual trim; a cell must parse
    // fully and be finite.
    std::size_t begin = cell.find_first_not_of(" \t");
    if (begin == std::string::npos) return false;
    std::size_t end = cell.find_last_not_of(" \t");
    const std::string body = cell.substr(begin, end - begin + 1);
    char* stop = nullptr;
    out = std::strtod(body.c_str(), &stop);
    return stop == body.c_str() + body.size() && std::isfinite(out);
}

}  // namespace detail

/// Loads a comma-separated series file. Rows are time steps, columns are
/// channels, '.' is the decimal point. Row numbers in error messages are
/// 1-based file lines (a header line counts as line 1).
inline SeriesMatrix load_csv(const std::string& path, bool has_header = false) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open CSV file: " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw CsvError(path + ": file is empty");

    std::size_t first_data = 0;
    std::vector<std::string> names;
    if (has_header) {
        names = detail::split_csv_line(lines[0]);
        first_data = 1;
    }
    if (first_data >= lines.size())
        throw CsvError(path + ": no data rows after header");

    const std::size_t d = detail::split_csv_line(lines[first_data]).size();
    const std::size_t rows = lines.size() - first_data;

    SeriesMatrix series;
    series.values.resize(static_cast<Index>(rows), static_cast<Index>(d));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t file_row = first_data + r + 1;  // 1-based
        const auto cells = detail::split_csv_line(lines[first_data + r]);
        if (cells.size() != d)
            throw CsvError(path + ": row " + std::to_string(file_row) +
                           " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(d));
        for (std::size_t c = 0; c < d; ++c) {
            double v;
            if (!detail::parse_cell(cells[c], v))
                throw CsvError(path + ": row " + std::to_string(file_row) +
                               ", column " + std::to_string(c + 1) +
                               ": non-numeric cell '" + cells[c] + "'");
            series.values(static_cast<Index>(r), static_cast<Index>(c)) = v;
        }
    }

    if (has_header) {
        if (names.size() != d)
            throw CsvError(path + ": header has " + std::to_string(names.size()) +
                           " cells, expected " + std::to_string(d));
        series.channel_names = names;
    } else {
        series.channel_names.reserve(d);
        for (std::size_t c = 0; c < d; ++c)
            series.channel_names.push_back("c" + std::to_string(c));
    }
    return series;
}

/// Per-channel z-scoring with the unbiased sample std. Channels whose std is
/// below 1e-12 (constant channels, or T = 1) are centered only.
inline SeriesMatrix normalize(const SeriesMatrix& series, NormalizeMode mode) {
    if (mode == NormalizeMode::none) return series;

    SeriesMatrix out = series;
    const Index t = series.steps();
    for (Index c = 0; c < series.channels(); ++c) {
        auto col = out.values.col(c);
        const double mean = col.mean();
        col.array() -= mean;
        if (t > 1) {
            const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(t - 1));
            if (sd >= 1e-12) col /= sd;
        }
    }
    return out;
}

}  // namespace conceptseg
