#pragma once

// Time-series CSV: a fixed 16-column schema written with full double
// precision (%.17g) so a read-back reproduces the run bit for bit.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nls6/run_types.hpp"

namespace nls6 {

inline constexpr const char* series_csv_header =
    "t,M,E,H,R,K,Px,Py,Pz,I,Idot,Iddot_formula,Iddot_fd,S_accum,lambda_scale,dt";

namespace detail {

inline void append_g17(std::string& out, double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

}  // namespace detail

inline std::string format_series_row(const SeriesRow& row) {
    const double cols[16] = {row.t,     row.M,    row.E,
                             row.H,     row.R,    row.K,
                             row.P[0],  row.P[1], row.P[2],
                             row.I,     row.Idot, row.Iddot_formula,
                             row.Iddot_fd, row.S_accum, row.lambda_scale,
                             row.dt};
    std::string line;
    line.reserve(16 * 26);
    for (int i = 0; i < 16; ++i) {
        if (i) line += ',';
        detail::append_g17(line, cols[i]);
    }
    return line;
}

inline void write_series_csv(const std::string& path, const std::vector<SeriesRow>& series) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("series: cannot open " + path + " for writing");
    os << series_csv_header << '\n';
    for (const SeriesRow& row : series) os << format_series_row(row) << '\n';
    if (!os) throw std::runtime_error("series: write to " + path + " failed");
}

inline std::vector<SeriesRow> read_series_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("series: cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("series: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != series_csv_header)
        throw std::runtime_error("series: " + path + " has an unexpected header");

    std::vector<SeriesRow> series;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double cols[16];
        const char* p = line.c_str();
        for (int i = 0; i < 16; ++i) {
            char* end = nullptr;
            cols[i] = std::strtod(p, &end);
            if (end == p)
                throw std::runtime_error("series: " + path + ": bad number at line " +
                                         std::to_string(lineno));
            p = end;
            const bool last = (i == 15);
            if (!last) {
                if (*p != ',')
                    throw std::runtime_error("series: " + path + ": expected 16 columns at line " +
                                             std::to_string(lineno));
                ++p;
            }
        }
        if (*p != '\0')
            throw std::runtime_error("series: " + path + ": trailing characters at line " +
                                     std::to_string(lineno));
        SeriesRow row;
        row.t = cols[0];
        row.M = cols[1];
        row.E = cols[2];
        row.H = cols[3];
        row.R = cols[4];
        row.K = cols[5];
        row.P = {cols[6], cols[7], cols[8]};
        row.I = cols[9];
        row.Idot = cols[10];
        row.Iddot_formula = cols[11];
        row.Iddot_fd = cols[12];
        row.S_accum = cols[13];
        row.lambda_scale = cols[14];
        row.dt = cols[15];
        series.push_back(row);
    }
    return series;
}

}  // namespace nls6
