#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "celldiff/errors.hpp"
#include "celldiff/output.hpp"

using namespace celldiff;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("celldiff_test_output_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("format_double", "[output]") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("format_double round-trips", "[output][property]") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> e(-300.0, 300.0), m(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = m(rng) * std::pow(10.0, e(rng));
        REQUIRE(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("csv_field quoting", "[output]") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("") == "");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
    CHECK(csv_field("cr\r") == "\"cr\r\"");
}

TEST_CASE("to_csv layout", "[output]") {
    CsvTable t;
    t.comments = {"model: test", "I = 10"};
    t.header = {"t", "v,total"};
    t.rows = {{0.0, 1.5}, {0.5, std::numeric_limits<double>::quiet_NaN()}};
    const std::string s = to_csv(t);
    CHECK(s == "# model: test\r\n# I = 10\r\nt,\"v,total\"\r\n0,1.5\r\n0.5,nan\r\n");
    CHECK(to_csv(t) == s);

    CsvTable empty;
    empty.header = {"x"};
    CHECK(to_csv(empty) == "x\r\n");
}

TEST_CASE("write_text creates directories and reports failures", "[output]") {
    const auto dir = scratch("write");
    const auto file = dir / "a" / "b" / "c.txt";
    write_text(file, "hello\r\n");
    CHECK(slurp(file) == "hello\r\n");
    write_text(file, "x");
    CHECK(slurp(file) == "x");

    // A regular file standing where a directory is needed.
    CHECK_THROWS_AS(write_text(file / "child.txt", "y"), IoError);
    // A directory standing where the file is needed.
    CHECK_THROWS_AS(write_text(dir / "a", "y"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("empty charts render", "[output]") {
    LineChart c;
    c.title = "nothing <here>";
    const std::string svg = render_svg(c);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("nothing &lt;here&gt;") != std::string::npos);
    CHECK_THROWS_AS(svg_polyline_points(svg, 0), DomainError);

    c.series.push_back({"empty", {}, {}});
    c.series.push_back({"all nan", {0.0, 1.0}, {std::nan(""), std::nan("")}});
    const std::string svg2 = render_svg(c);
    CHECK(svg_polyline_points(svg2, 0).empty());
    CHECK(svg_polyline_points(svg2, 1).empty());
}

TEST_CASE("polyline preserves data ordering", "[output]") {
    LineChart c;
    Series s{"profile", {}, {}};
    for (int i = 0; i <= 50; ++i) {
        s.x.push_back(0.02 * i);
        s.y.push_back(std::exp(0.02 * i));
    }
    c.series.push_back(s);
    Series flat{"flat", {0.0, 1.0}, {1.5, 1.5}};
    c.series.push_back(flat);
    const auto pts = svg_polyline_points(render_svg(c), 0);
    REQUIRE(pts.size() == 51);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].first > pts[i - 1].first);
        CHECK(pts[i].second < pts[i - 1].second);  // screen y grows downward
    }
    const auto fp = svg_polyline_points(render_svg(c), 1);
    REQUIRE(fp.size() == 2);
    CHECK(fp[0].second == fp[1].second);
}

TEST_CASE("log axis drops non-positive samples", "[output]") {
    LineChart c;
    c.log_y = true;
    c.series.push_back({"decay", {0.0, 1.0, 2.0, 3.0}, {1.0, 0.0, -1.0, 1e-3}});
    const auto pts = svg_polyline_points(render_svg(c), 0);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].second > pts[0].second);
}

TEST_CASE("thinning keeps endpoints and extremes", "[output]") {
    LineChart c;
    Series s{"noise", {}, {}};
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
        s.x.push_back(i);
        s.y.push_back(n(rng));
    }
    s.y[31337] = 50.0;
    s.y[77777] = -50.0;
    c.series.push_back(s);
    const std::string svg = render_svg(c, 4000);
    const auto pts = svg_polyline_points(svg, 0);
    CHECK(pts.size() <= 4000);
    CHECK(pts.size() >= 2000);
    double top = pts[0].second, bottom = pts[0].second;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        REQUIRE(pts[i].first >= pts[i - 1].first);
        top = std::min(top, pts[i].second);
        bottom = std::max(bottom, pts[i].second);
    }
    // The plot area spans y in [50, 440]; the spikes set both ends of the range.
    CHECK(top == Catch::Approx(50.0).margin(1e-3));
    CHECK(bottom == Catch::Approx(440.0).margin(1e-3));
    CHECK(pts.front().first == Catch::Approx(90.0).margin(1e-3));
    CHECK(pts.back().first == Catch::Approx(650.0).margin(1e-3));

    CHECK(render_svg(c, 4000) == svg);
    CHECK(svg_polyline_points(render_svg(c, 0), 0).size() == static_cast<std::size_t>(N));
}
