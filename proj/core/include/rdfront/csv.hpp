#ifndef RDFRONT_CSV_HPP
#define RDFRONT_CSV_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "rdfront/errors.hpp"

namespace rdfront {

/** Comma-separated writer emitting doubles with 17 significant digits. */
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw IoFault("csv: cannot open " + path);
    }

    void header(const std::vector<std::string>& names) {
        for (size_t i = 0; i < names.size(); ++i) {
            if (i) out_ << ',';
            out_ << names[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& values) {
        char buf[40];
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << buf;
        }
        out_ << '\n';
    }

    // Mixed row: leading text cells followed by numeric cells.
    void row(const std::vector<std::string>& text, const std::vector<double>& values) {
        for (size_t i = 0; i < text.size(); ++i) {
            if (i) out_ << ',';
            out_ << text[i];
        }
        char buf[40];
        for (double v : values) {
            out_ << ',';
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out_ << buf;
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace rdfront

#endif
