#pragma once

// Static SVG line chart of pointing-error traces with the half-beamwidth
// reference line. No dependencies, one file per figure.

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "satrl/csv.hpp"
#include "satrl/metrics.hpp"

namespace satrl {

inline void write_angle_plot_svg(const std::string& path, const std::vector<AngleTrace>& traces,
                                 double threshold_deg = 10.0, const std::string& title = "") {
    if (traces.empty()) throw std::invalid_argument("write_angle_plot_svg: no traces");
    const double width = 920, height = 500;
    const double ml = 64, mr = 20, mt = 36, mb = 46;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double tmax = 0, ymax = threshold_deg;
    for (const auto& tr : traces) {
        tmax = std::max(tmax, tr.duration());
        for (double v : tr.theta_deg) ymax = std::max(ymax, v);
    }
    if (tmax <= 0) tmax = 1;
    ymax = std::min(185.0, ymax * 1.05 + 1.0);

    const auto px = [&](double t) { return ml + pw * t / tmax; };
    const auto py = [&](double y) { return mt + ph * (1.0 - y / ymax); };

    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_angle_plot_svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"15\">" << title << "</text>\n";

    // axes + ticks
    out << "<g stroke=\"#333\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph << "\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph << "\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double t = tmax * i / 5;
        out << "<line x1=\"" << px(t) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(t) << "\" y2=\"" << mt + ph + 5
            << "\"/>\n";
        out << "<text x=\"" << px(t) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\" stroke=\"none\">"
            << csv_double(t) << "</text>\n";
    }
    for (double y = 0; y <= ymax; y += ymax > 90 ? 30.0 : 10.0) {
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\"" << py(y) << "\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\" stroke=\"none\">"
            << csv_double(y) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\" stroke=\"none\">time (s)</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 16 " << mt + ph / 2
        << ")\">pointing error (deg)</text>\n";
    out << "</g>\n";

    // half-beamwidth reference
    out << "<line x1=\"" << ml << "\" y1=\"" << py(threshold_deg) << "\" x2=\"" << ml + pw << "\" y2=\""
        << py(threshold_deg) << "\" stroke=\"red\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\"/>\n";

    for (size_t k = 0; k < traces.size(); ++k) {
        const auto& tr = traces[k];
        if (tr.theta_deg.empty()) continue;
        const size_t stride = std::max<size_t>(1, tr.theta_deg.size() / 2000);
        out << "<polyline fill=\"none\" stroke=\"" << colors[k % 6] << "\" stroke-width=\"1.2\" points=\"";
        for (size_t i = 0; i < tr.theta_deg.size(); i += stride)
            out << px(static_cast<double>(i) * tr.dt) << ',' << py(tr.theta_deg[i]) << ' ';
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace satrl
