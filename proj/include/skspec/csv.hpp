#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace skspec {

/// RFC-4180 CSV writer: CRLF line endings, UTF-8, '.' decimal separator,
/// floats at 17 significant digits so reruns are byte-identical.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) { row(header); }

    CsvWriter& row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) buf_ << ',';
            buf_ << quote(cells[i]);
        }
        buf_ << "\r\n";
        return *this;
    }

    static std::string num(double v) {
        char tmp[40];
        std::snprintf(tmp, sizeof tmp, "%.17g", v);
        return tmp;
    }
    static std::string num(long long v) { return std::to_string(v); }
    static std::string num(int v) { return std::to_string(v); }
    static std::string num(std::uint64_t v) { return std::to_string(v); }

    std::string str() const { return buf_.str(); }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("csv: cannot open " + path);
        const auto s = buf_.str();
        out.write(s.data(), std::streamsize(s.size()));
    }

private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    }

    std::ostringstream buf_;
};

}  // namespace skspec
