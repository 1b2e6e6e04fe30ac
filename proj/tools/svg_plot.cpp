#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace mimodoa::cli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
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

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

void write_line_plot(std::ostream& out, const std::vector<Series>& series, const PlotOptions& opts) {
    const double left = 70, right = 150, top = 40, bottom = 50;
    const double pw = opts.width - left - right;
    const double ph = opts.height - top - bottom;

    auto ty = [&](double y) { return opts.log_y ? std::log10(y) : y; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.y[i]) || (opts.log_y && s.y[i] <= 0.0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (ty(y) - y0) / (y1 - y0) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(opts.title) << "</text>\n";
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = x0 + (x1 - x0) * i / 4.0;
        const double fy = y0 + (y1 - y0) * i / 4.0;
        const double gx = left + pw * i / 4.0;
        const double gy = top + ph - ph * i / 4.0;
        out << "<text x=\"" << num(gx) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
            << tick(fx) << "</text>\n";
        out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\">"
            << tick(opts.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
        out << "<line x1=\"" << num(left) << "\" y1=\"" << num(gy) << "\" x2=\"" << num(left + pw) << "\" y2=\""
            << num(gy) << "\" stroke=\"#ddd\"/>\n";
    }
    out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(opts.height - 12.0)
        << "\" text-anchor=\"middle\">" << escape(opts.x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(opts.y_label) << (opts.log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.y[i]) || (opts.log_y && s.y[i] <= 0.0)) continue;
            out << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
        }
        out << "\"/>\n";
        const double ly = top + 14.0 + 16.0 * static_cast<double>(k);
        out << "<line x1=\"" << num(left + pw + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
            << num(left + pw + 30) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << num(left + pw + 34) << "\" y=\"" << num(ly) << "\">" << escape(s.name)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace mimodoa::cli
