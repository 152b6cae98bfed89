#pragma once

#include <string>
#include <vector>

namespace couette::exp {

/// Log-log scatter with one fitted line and one reference line, both given
/// as ln y = intercept + slope ln x.
struct LogLogPlot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<double> x;
    std::vector<double> y;
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
    double ref_slope = 0.0;
    double ref_intercept = 0.0;
    std::string fit_label;
    std::string ref_label;
};

std::string render_svg(const LogLogPlot& p);

} // namespace couette::exp
