#pragma once

// Minimal CSV emission. Doubles are printed via to_chars (shortest form that
// round-trips exactly), so identical runs produce byte-identical files.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace sparseopt {

inline std::string csv_double(double x) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& cols) { line(cols); }

    void line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

inline std::string cell(double x) { return csv_double(x); }
inline std::string cell(int x) { return std::to_string(x); }
inline std::string cell(std::uint64_t x) { return std::to_string(x); }
inline std::string cell(const std::string& s) { return s; }
inline std::string cell(const char* s) { return s; }

} // namespace sparseopt
