#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "centaur/errors.hpp"

namespace centaur {

struct PlotSeries {
    std::string name;
    std::vector<double> x, mean, stderr_;
};

struct ReferenceLine {
    std::string name;
    double value = 0.0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

inline const char* series_color(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf"};
    return colors[i % 7];
}

}  // namespace detail

/// Parses a summary CSV (arm,index,mean_return,stderr,running_mean) into one
/// series per arm.
inline std::vector<PlotSeries> parse_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedSummary("cannot open summary: " + path);
    std::string line;
    if (!std::getline(in, line)) throw MalformedSummary("empty summary file");
    std::map<std::string, PlotSeries> by_arm;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() < 4) throw MalformedSummary("short summary row: " + line);
        auto& series = by_arm[fields[0]];
        if (series.name.empty()) {
            series.name = fields[0];
            order.push_back(fields[0]);
        }
        series.x.push_back(std::stod(fields[1]));
        series.mean.push_back(std::stod(fields[2]));
        series.stderr_.push_back(std::stod(fields[3]));
    }
    if (by_arm.empty()) throw MalformedSummary("summary has no data rows");
    std::vector<PlotSeries> out;
    for (const auto& name : order) out.push_back(by_arm[name]);
    return out;
}

/// Renders mean curves with one-standard-error bands plus optional dashed
/// horizontal reference lines into a standalone SVG file.
inline void plot_summary(const std::vector<PlotSeries>& series,
                         const std::vector<ReferenceLine>& references, const std::string& out_path,
                         const std::string& x_label = "index",
                         const std::string& y_label = "mean return") {
    if (series.empty()) throw MalformedSummary("no series to plot");
    for (const auto& s : series)
        if (s.x.empty()) throw MalformedSummary("series '" + s.name + "' is empty");

    const double width = 760, height = 480;
    const double ml = 70, mr = 20, mt = 30, mb = 50;
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.mean[i] - s.stderr_[i]);
            y_max = std::max(y_max, s.mean[i] + s.stderr_[i]);
        }
    }
    for (const auto& r : references) {
        y_min = std::min(y_min, r.value);
        y_max = std::max(y_max, r.value);
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double y) { return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Axes with a handful of ticks.
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        double xv = x_min + (x_max - x_min) * i / 5.0;
        double yv = y_min + (y_max - y_min) * i / 5.0;
        svg << "<line x1=\"" << sx(xv) << "\" y1=\"" << height - mb << "\" x2=\"" << sx(xv)
            << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << sx(xv) << "\" y=\"" << height - mb + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << xv << "</text>\n";
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << ml << "\" y2=\""
            << sy(yv) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << yv << "</text>\n";
    }
    svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

    // Dashed reference lines.
    for (const auto& r : references) {
        svg << "<line x1=\"" << ml << "\" y1=\"" << sy(r.value) << "\" x2=\"" << width - mr
            << "\" y2=\"" << sy(r.value)
            << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << width - mr - 4 << "\" y=\"" << sy(r.value) - 4
            << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#555555\">" << r.name
            << "</text>\n";
    }

    // Error bands then mean curves.
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        svg << "<polygon fill=\"" << detail::series_color(k) << "\" fill-opacity=\"0.18\" "
            << "stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            svg << sx(s.x[i]) << ',' << sy(s.mean[i] + s.stderr_[i]) << ' ';
        for (std::size_t i = s.x.size(); i-- > 0;)
            svg << sx(s.x[i]) << ',' << sy(s.mean[i] - s.stderr_[i]) << ' ';
        svg << "\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        svg << "<polyline fill=\"none\" stroke=\"" << detail::series_color(k)
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) svg << sx(s.x[i]) << ',' << sy(s.mean[i]) << ' ';
        svg << "\"/>\n";
        svg << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * k << "\" font-size=\"12\" fill=\""
            << detail::series_color(k) << "\">" << s.name << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path);
    if (!out) throw MalformedSummary("cannot write plot: " + out_path);
    out << svg.str();
}

inline void plot_summary_file(const std::string& summary_csv, const std::string& out_path,
                              const std::vector<ReferenceLine>& references = {}) {
    plot_summary(parse_summary_csv(summary_csv), references, out_path);
}

}  // namespace centaur
