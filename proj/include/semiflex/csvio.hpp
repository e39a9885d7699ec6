#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace semiflex {

// %.17g rendering used for every numeric CSV cell, so reruns are
// byte-identical.
std::string format_g17(double v);

// SHA-1 of a byte string, lowercase hex. Used to stamp output headers with a
// content hash of the resolved configuration.
std::string sha1_hex(const std::string& bytes);

// RFC-4180 quoting: wrap in quotes when the cell contains a comma, quote, or
// newline; double any embedded quotes.
std::string csv_escape(const std::string& cell);

// CSV writer with a leading '#' comment block (regime, resolved parameters,
// seed, config hash) followed by one header row. Throws IOFailure on any
// stream error.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void comment(const std::string& line);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& values);
    void close();

  private:
    struct Impl;
    Impl* impl_;
};

// Minimal SVG polyline plot: one series per polyline, auto-scaled viewport,
// axis frame, series labels.
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};
void write_svg_polylines(const std::string& path, const std::string& title,
                         const std::vector<SvgSeries>& series);

// Worker cap: SEMIFLEX_THREADS when set and positive, else 1.
int max_threads();

} // namespace semiflex
