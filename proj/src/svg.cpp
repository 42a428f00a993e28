#include "modspace/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace modspace {

namespace {
const char* kColors[] = {"#1f6fb2", "#c23b22", "#2e8540", "#8031a7", "#b8860b", "#444444"};
}

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series) {
    const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
        << "</text>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double x = xmin + i * (xmax - xmin) / 4;
        double y = ymin + i * (ymax - ymin) / 4;
        svg << "<text x=\"" << px(x) << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << x << "</text>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << y << "</text>\n";
    }
    svg << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kColors[si % 6];
        std::ostringstream pts;
        for (const auto& [x, y] : series[si].points) pts << px(x) << "," << py(y) << " ";
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\""
            << pts.str() << "\"/>\n";
        for (const auto& [x, y] : series[si].points)
            svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.6\" fill=\""
                << color << "\"/>\n";
        svg << "<text x=\"" << W - mr - 6 << "\" y=\"" << mt + 16 * (si + 1)
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
            << series[si].name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string series_to_csv(const std::vector<ChartSeries>& series) {
    std::ostringstream csv;
    csv.precision(17);
    for (const auto& s : series) {
        csv << "x," << s.name << "\n";
        for (const auto& [x, y] : s.points) csv << x << "," << y << "\n";
    }
    return csv.str();
}

}  // namespace modspace
