#pragma once

#include "congesta/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace congesta {

/// Format a double with 17 significant digits (round-trip exact).
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Deterministic CSV emitter: header row then rows of %.17g doubles.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path), ncols_(columns.size()) {
        if (!out_) fail(errc::config, "cannot open output file " + path.string());
        for (size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(std::initializer_list<double> values) {
        row(std::vector<double>(values));
    }
    void row(const std::vector<double>& values) {
        if (values.size() != ncols_)
            fail(errc::config, "csv row width mismatch");
        for (size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << fmt17(values[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
    size_t ncols_;
};

} // namespace congesta
