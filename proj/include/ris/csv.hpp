#ifndef RIS_CSV_HPP
#define RIS_CSV_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ris {

/// Locale-independent numeric formatting for CSV cells.
inline std::string csv_number(double v, int precision = 9) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path) {
        out_.open(path);
        if (!out_)
            throw std::runtime_error("cannot open output file: " + path.string());
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

    void close() {
        out_.close();
        if (out_.fail())
            throw std::runtime_error("failed writing output file: " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

} // namespace ris

#endif
