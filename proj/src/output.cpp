#include "celldiff/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "celldiff/errors.hpp"

namespace celldiff {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    for (const auto& c : table.comments) out += "# " + c + "\r\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += csv_field(table.header[i]);
    }
    out += "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += "\r\n";
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

namespace {

constexpr double kWidth = 820, kHeight = 500;
constexpr double kLeft = 90, kRight = 170, kTop = 50, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<std::pair<double, double>> usable(const Series& s, bool log_y) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = s.y[i];
        if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
        if (log_y) {
            if (!(y > 0.0)) continue;
            y = std::log10(y);
        }
        pts.emplace_back(s.x[i], y);
    }
    return pts;
}

std::vector<std::pair<double, double>> thin(const std::vector<std::pair<double, double>>& pts,
                                            std::size_t max_points) {
    if (max_points < 8 || pts.size() <= max_points) return pts;
    const std::size_t buckets = max_points / 4;
    std::vector<std::pair<double, double>> out;
    out.reserve(buckets * 4);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t lo = pts.size() * b / buckets;
        const std::size_t hi = pts.size() * (b + 1) / buckets;
        if (lo >= hi) continue;
        std::size_t imin = lo, imax = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            if (pts[i].second < pts[imin].second) imin = i;
            if (pts[i].second > pts[imax].second) imax = i;
        }
        std::vector<std::size_t> keep{lo, imin, imax, hi - 1};
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        for (auto i : keep) out.push_back(pts[i]);
    }
    return out;
}

void pad_range(double& lo, double& hi) {
    if (!(lo <= hi)) {
        lo = 0.0;
        hi = 1.0;
    } else if (hi == lo) {
        const double d = lo == 0.0 ? 0.5 : 0.05 * std::abs(lo);
        lo -= d;
        hi += d;
    }
}

}  // namespace

std::string render_svg(const LineChart& chart, std::size_t max_points) {
    std::vector<std::vector<std::pair<double, double>>> data;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : chart.series) {
        data.push_back(thin(usable(s, chart.log_y), max_points));
        for (const auto& [x, y] : data.back()) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    pad_range(x0, x1);
    pad_range(y0, y1);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(chart.title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = x0 + (x1 - x0) * i / kTicks;
        const double yv = y0 + (y1 - y0) * i / kTicks;
        const std::string px = fmt("%.3f", sx(xv)), py = fmt("%.3f", sy(yv));
        o << "<line x1=\"" << px << "\" y1=\"" << kTop + ph << "\" x2=\"" << px << "\" y2=\""
          << kTop + ph + 5 << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << px << "\" y=\"" << kTop + ph + 20
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << fmt("%.4g", xv) << "</text>\n"
          << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\"" << py
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << kLeft - 8 << "\" y=\"" << py
          << "\" text-anchor=\"end\" dominant-baseline=\"middle\" font-family=\"sans-serif\" "
             "font-size=\"11\">"
          << (chart.log_y ? "1e" + fmt("%.3g", yv) : fmt("%.4g", yv)) << "</text>\n";
    }
    o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(chart.x_label) << "</text>\n"
      << "<text x=\"20\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 20 " << kTop + ph / 2
      << ")\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(chart.y_label)
      << (chart.log_y ? " (log10)" : "") << "</text>\n";

    for (std::size_t s = 0; s < data.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < data[s].size(); ++i) {
            if (i) o << ' ';
            o << fmt("%.3f", sx(data[s][i].first)) << ',' << fmt("%.3f", sy(data[s][i].second));
        }
        o << "\"/>\n";
        const double ly = kTop + 15 + 18.0 * static_cast<double>(s);
        o << "<line x1=\"" << kLeft + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + pw + 30
          << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << kLeft + pw + 35 << "\" y=\"" << ly
          << "\" dominant-baseline=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << xml_escape(chart.series[s].name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<std::pair<double, double>> svg_polyline_points(const std::string& svg,
                                                           std::size_t index) {
    std::size_t pos = 0;
    for (std::size_t i = 0;; ++i) {
        pos = svg.find("<polyline", pos);
        if (pos == std::string::npos) throw DomainError("svg has no polyline " + std::to_string(index));
        if (i == index) break;
        ++pos;
    }
    const std::string key = "points=\"";
    const std::size_t start = svg.find(key, pos) + key.size();
    const std::size_t end = svg.find('"', start);
    std::istringstream in(svg.substr(start, end - start));
    std::vector<std::pair<double, double>> pts;
    std::string tok;
    while (in >> tok) {
        const auto comma = tok.find(',');
        pts.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    return pts;
}

}  // namespace celldiff
