#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace celldiff {

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double x);

/// RFC 4180 field: quoted when it contains a comma, quote, CR or LF.
std::string csv_field(const std::string& s);

struct CsvTable {
    std::vector<std::string> comments;  // written as leading "# ..." lines
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);

/// Writes text to a file, creating parent directories. IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
};

/// SVG 1.1 line chart. Series longer than `max_points` are thinned by keeping the
/// first, last, minimum and maximum sample of each bucket, in order.
/// Non-finite points (and non-positive ones on a log axis) are skipped.
std::string render_svg(const LineChart& chart, std::size_t max_points = 4000);

/// Vertices of the i-th polyline of an SVG produced by render_svg, in drawing order.
std::vector<std::pair<double, double>> svg_polyline_points(const std::string& svg,
                                                           std::size_t index);

}  // namespace celldiff
