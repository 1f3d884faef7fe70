#pragma once

// CSV with a commented key=value header block, and a minimal self-contained
// SVG scatter plot. Numbers are written in shortest round-trip form.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qduffing/error.hpp"
#include "qduffing/trajectory.hpp"

namespace qduffing {

inline constexpr const char* kVersion = "1.0.0";

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string format_number(double v) { return fmt::format("{}", v); }

/// A CSV cell is either a number or raw text.
class CsvCell {
public:
    CsvCell(double v) : text_(format_number(v)) {}
    CsvCell(int v) : text_(std::to_string(v)) {}
    CsvCell(long v) : text_(std::to_string(v)) {}
    CsvCell(long long v) : text_(std::to_string(v)) {}
    CsvCell(unsigned long v) : text_(std::to_string(v)) {}
    CsvCell(unsigned long long v) : text_(std::to_string(v)) {}
    CsvCell(std::string s) : text_(quote(std::move(s))) {}
    CsvCell(const char* s) : text_(quote(s)) {}

    const std::string& text() const { return text_; }

private:
    static std::string quote(std::string s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + '"';
    }
    std::string text_;
};

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const Metadata& meta) {
        for (const auto& [k, v] : meta) {
            std::string line = v;
            std::replace(line.begin(), line.end(), '\n', ' ');
            os_ << "# " << k << '=' << line << '\n';
        }
    }

    void columns(const std::vector<std::string>& names) { row_text(names); }

    void row(const std::vector<CsvCell>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i].text();
        }
        os_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) os_ << ',';
            os_ << format_number(values[i]);
        }
        os_ << '\n';
    }

private:
    void row_text(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) os_ << ',';
            os_ << names[i];
        }
        os_ << '\n';
    }
    std::ostream& os_;
};

inline void write_table(std::ostream& os, const Metadata& meta, const Table& table) {
    CsvWriter w(os);
    w.header(meta);
    w.columns(table.columns);
    for (const auto& r : table.rows) w.row(r);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f.exceptions(std::ios::badbit);
    return f;
}

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<SvgSeries> series;
    double point_radius = 1.2;
    int width = 800;
    int height = 560;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

/// Roughly five round-valued ticks covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return ticks;
}

}  // namespace detail

inline void write_svg(std::ostream& os, const SvgPlot& plot) {
    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    auto pad = [](double& lo, double& hi) {
        const double span = hi - lo;
        const double m = span > 0 ? 0.04 * span : std::max(1e-3, 0.05 * std::abs(lo));
        lo -= m;
        hi += m;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = plot.width - left - right, ph = plot.height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    os << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)",
                      plot.width, plot.height, plot.width, plot.height)
       << '\n';
    os << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", plot.width, plot.height) << '\n';
    os << fmt::format(R"(<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>)",
                      plot.width / 2, detail::xml_escape(plot.title))
       << '\n';
    os << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)", left, top, pw, ph)
       << '\n';
    for (double t : detail::nice_ticks(xmin, xmax)) {
        const double px = sx(t);
        os << fmt::format(R"(<line x1="{:.2f}" y1="{}" x2="{:.2f}" y2="{}" stroke="black"/>)", px, top + ph, px,
                          top + ph + 5)
           << '\n';
        os << fmt::format(
                  R"(<text x="{:.2f}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{:.4g}</text>)",
                  px, top + ph + 18, t)
           << '\n';
    }
    for (double t : detail::nice_ticks(ymin, ymax)) {
        const double py = sy(t);
        os << fmt::format(R"(<line x1="{}" y1="{:.2f}" x2="{}" y2="{:.2f}" stroke="black"/>)", left - 5, py, left, py)
           << '\n';
        os << fmt::format(
                  R"(<text x="{}" y="{:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{:.4g}</text>)",
                  left - 8, py + 4, t)
           << '\n';
    }
    os << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>)",
                      left + pw / 2, plot.height - 15, detail::xml_escape(plot.x_label))
       << '\n';
    os << fmt::format(
              R"svg(<text x="18" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {})">{}</text>)svg",
              top + ph / 2, top + ph / 2, detail::xml_escape(plot.y_label))
       << '\n';

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* colour = palette[k % std::size(palette)];
        os << fmt::format(R"(<g fill="{}">)", colour) << '\n';
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{}"/>)", sx(s.x[i]), sy(s.y[i]),
                              plot.point_radius)
               << '\n';
        }
        os << "</g>\n";
        if (plot.series.size() > 1) {
            const double ly = top + 16 + 16 * static_cast<double>(k);
            os << fmt::format(R"(<circle cx="{}" cy="{}" r="4" fill="{}"/>)", left + pw - 120, ly - 4, colour)
               << '\n';
            os << fmt::format(R"(<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>)",
                              left + pw - 110, ly, detail::xml_escape(s.label))
               << '\n';
        }
    }
    os << "</svg>\n";
}

}  // namespace qduffing
