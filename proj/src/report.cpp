#include "qkd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace qkd {

std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "p_o,mu_r,rk_bb84,rk_iwy,rk_blt,rk_blt_plus\n";
    for (const SweepRow& row : rows) {
        out += format_sig9(row.p_o);
        out += ',';
        out += format_sig9(row.mu_r);
        for (double v : row.r_k) {
            out += ',';
            out += format_sig9(v);
        }
        out += '\n';
    }
    return out;
}

namespace {

void append(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    out += buf;
}

}  // namespace

std::string sweep_svg(const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("sweep_svg: no rows");

    constexpr double width = 640.0, height = 440.0;
    constexpr double ml = 64.0, mr = 140.0, mt = 24.0, mb = 52.0;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    const double x_min = rows.front().p_o;
    const double x_span = std::max(rows.back().p_o - x_min, 1e-12);
    double y_max = 0.0;
    for (const SweepRow& row : rows)
        for (double v : row.r_k) y_max = std::max(y_max, v);
    y_max = std::max(y_max * 1.05, 1e-12);

    const auto sx = [&](double p) { return ml + (p - x_min) / x_span * plot_w; };
    const auto sy = [&](double r) { return mt + plot_h - r / y_max * plot_h; };

    static const char* kColors[4] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
    static const char* kLabels[4] = {"BB84", "IWY", "BLT", "BLT+"};

    std::string svg;
    append(svg,
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
           "viewBox=\"0 0 %g %g\" font-family=\"sans-serif\" font-size=\"12\">\n",
           width, height, width, height);
    append(svg, "<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", width, height);

    // axes
    append(svg, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml, mt + plot_h,
           ml + plot_w, mt + plot_h);
    append(svg, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml, mt, ml,
           mt + plot_h);
    for (int i = 0; i <= 5; ++i) {
        const double px = x_min + x_span * i / 5.0;
        const double py = y_max * i / 5.0;
        append(svg, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", sx(px),
               mt + plot_h, sx(px), mt + plot_h + 5);
        append(svg, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%.3g</text>\n", sx(px),
               mt + plot_h + 20, px);
        append(svg, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml - 5,
               sy(py), ml, sy(py));
        append(svg, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text>\n", ml - 9, sy(py) + 4,
               py);
    }
    append(svg, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">p_o</text>\n", ml + plot_w / 2,
           height - 12.0);
    append(svg,
           "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" transform=\"rotate(-90 16 %g)\">R_k</text>\n",
           mt + plot_h / 2, mt + plot_h / 2);

    for (std::size_t k = 0; k < 4; ++k) {
        std::string points;
        for (const SweepRow& row : rows) {
            char pt[48];
            std::snprintf(pt, sizeof pt, "%.2f,%.2f ", sx(row.p_o), sy(row.r_k[k]));
            points += pt;
        }
        if (!points.empty()) points.pop_back();
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += kColors[k];
        svg += "\" stroke-width=\"1.5\" points=\"";
        svg += points;
        svg += "\"/>\n";
    }

    // legend
    for (std::size_t k = 0; k < 4; ++k) {
        const double ly = mt + 16.0 + 20.0 * static_cast<double>(k);
        append(svg, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"1.5\"/>\n",
               ml + plot_w + 12, ly, ml + plot_w + 40, ly, kColors[k]);
        append(svg, "<text x=\"%g\" y=\"%g\">%s</text>\n", ml + plot_w + 46, ly + 4, kLabels[k]);
    }

    svg += "</svg>\n";
    return svg;
}

}  // namespace qkd
