#pragma once

// Minimal SVG line charts.

#include <iosfwd>
#include <string>
#include <vector>

namespace mimodoa::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

void write_line_plot(std::ostream& out, const std::vector<Series>& series, const PlotOptions& opts);

}  // namespace mimodoa::cli
