#include "couette/exp/svg.hpp"

#include "couette/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace couette::exp {

namespace {

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        case '"': o += "&quot;"; break;
        default: o.push_back(c);
        }
    }
    return o;
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return b;
}

} // namespace

std::string render_svg(const LogLogPlot& p) {
    if (p.x.empty() || p.x.size() != p.y.size()) throw ArgumentError("render_svg: need matched, nonempty data");
    const double W = 640, H = 480, ml = 80, mr = 30, mt = 40, mb = 60;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (std::size_t i = 0; i < p.x.size(); ++i) {
        x0 = std::min(x0, std::log10(p.x[i]));
        x1 = std::max(x1, std::log10(p.x[i]));
        y0 = std::min(y0, std::log10(p.y[i]));
        y1 = std::max(y1, std::log10(p.y[i]));
    }
    auto line_y = [&](double slope, double icpt, double lx) { return (icpt + slope * lx * std::log(10.0)) / std::log(10.0); };
    for (double lx : {x0, x1})
        for (auto [s, c] : {std::pair{p.fit_slope, p.fit_intercept}, std::pair{p.ref_slope, p.ref_intercept}}) {
            y0 = std::min(y0, line_y(s, c, lx));
            y1 = std::max(y1, line_y(s, c, lx));
        }
    if (x1 - x0 < 1e-9) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
    const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
    x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
    auto X = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (W - ml - mr); };
    auto Y = [&](double ly) { return H - mb - (ly - y0) / (y1 - y0) * (H - mt - mb); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << ' '
      << H << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << esc(p.title) << "</text>\n";
    s << "<path class=\"axis\" d=\"M" << ml << ',' << mt << " V" << H - mb << " H" << W - mr << "\" stroke=\"black\" fill=\"none\"/>\n";
    for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d)
        s << "<text class=\"tick\" x=\"" << num(X(d)) << "\" y=\"" << H - mb + 20 << "\" text-anchor=\"middle\" font-size=\"12\">1e"
          << d << "</text>\n";
    for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d)
        s << "<text class=\"tick\" x=\"" << ml - 8 << "\" y=\"" << num(Y(d) + 4) << "\" text-anchor=\"end\" font-size=\"12\">1e"
          << d << "</text>\n";
    s << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"14\">" << esc(p.xlabel)
      << "</text>\n";
    s << "<text x=\"20\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
      << (mt + H - mb) / 2 << ")\">" << esc(p.ylabel) << "</text>\n";
    const double lx0 = x0 + padx, lx1 = x1 - padx;
    s << "<line class=\"fit\" x1=\"" << num(X(lx0)) << "\" y1=\"" << num(Y(line_y(p.fit_slope, p.fit_intercept, lx0)))
      << "\" x2=\"" << num(X(lx1)) << "\" y2=\"" << num(Y(line_y(p.fit_slope, p.fit_intercept, lx1)))
      << "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
    s << "<line class=\"reference\" x1=\"" << num(X(lx0)) << "\" y1=\"" << num(Y(line_y(p.ref_slope, p.ref_intercept, lx0)))
      << "\" x2=\"" << num(X(lx1)) << "\" y2=\"" << num(Y(line_y(p.ref_slope, p.ref_intercept, lx1)))
      << "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
    for (std::size_t i = 0; i < p.x.size(); ++i)
        s << "<circle class=\"data\" cx=\"" << num(X(std::log10(p.x[i]))) << "\" cy=\"" << num(Y(std::log10(p.y[i])))
          << "\" r=\"4\" fill=\"black\"/>\n";
    s << "<text class=\"legend\" x=\"" << ml + 10 << "\" y=\"" << mt + 16 << "\" font-size=\"12\" fill=\"#1f77b4\">" << esc(p.fit_label)
      << "</text>\n";
    s << "<text class=\"legend\" x=\"" << ml + 10 << "\" y=\"" << mt + 32 << "\" font-size=\"12\" fill=\"#d62728\">" << esc(p.ref_label)
      << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

} // namespace couette::exp
