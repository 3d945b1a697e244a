#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace rxn {

/// Minimal self-contained SVG line plotter: axes, optional log-scale x,
/// legend. Enough for trajectory figures without an external renderer.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotOptions {
    int width = 800, height = 500;
    bool log_x = false;
    std::string title;
    std::string x_label = "t";
    std::string y_label;
};

inline std::string svg_line_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt = {}) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    const double ml = 70, mr = 20, mt = opt.title.empty() ? 20 : 40, mb = 50;
    const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xv = s.x[i];
            if (opt.log_x && xv <= 0) continue;
            xmin = std::min(xmin, xv);
            xmax = std::max(xmax, xv);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin) || xmin == xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (!std::isfinite(ymin) || ymin == ymax) {
        ymin -= 0.5;
        ymax += 0.5;
        if (!std::isfinite(ymin)) { ymin = 0; ymax = 1; }
    }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto tx = [&](double x) {
        double u = opt.log_x ? (std::log10(x) - std::log10(xmin)) /
                                   (std::log10(xmax) - std::log10(xmin))
                             : (x - xmin) / (xmax - xmin);
        return ml + u * pw;
    };
    auto ty = [&](double y) { return mt + (1 - (y - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        svg << "<text x=\"" << opt.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << opt.title << "</text>\n";

    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";

    const int n_ticks = 6;
    for (int i = 0; i <= n_ticks; ++i) {
        double frac = static_cast<double>(i) / n_ticks;
        double xv = opt.log_x ? std::pow(10, std::log10(xmin) +
                                                 frac * (std::log10(xmax) - std::log10(xmin)))
                              : xmin + frac * (xmax - xmin);
        double yv = ymin + frac * (ymax - ymin);
        double px = ml + frac * pw, py = mt + (1 - frac) * ph;
        svg << "<line x1=\"" << px << "\" y1=\"" << mt + ph << "\" x2=\"" << px << "\" y2=\""
            << mt + ph + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << mt + ph + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", xv);
        svg << buf << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.3g", yv);
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py << "\" x2=\"" << ml << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
            << "</text>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << opt.height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << opt.x_label
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << palette[s % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (opt.log_x && series[s].x[i] <= 0) continue;
            svg << tx(series[s].x[i]) << "," << ty(series[s].y[i]) << " ";
        }
        svg << "\"/>\n";
        // legend
        double ly = mt + 16 + 18 * static_cast<double>(s);
        svg << "<line x1=\"" << ml + pw - 120 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw - 95
            << "\" y2=\"" << ly << "\" stroke=\"" << palette[s % 8] << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + pw - 90 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace rxn
