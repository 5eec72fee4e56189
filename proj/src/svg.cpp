#include "carpet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace carpet {

namespace {

constexpr int kCanvas = 800;

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

struct Bounds {
    double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;

    void include(double x, double y) {
        if (empty) {
            min_x = max_x = x;
            min_y = max_y = y;
            empty = false;
        } else {
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
        }
    }
    void finish() {
        if (empty) return; // default unit box for empty plots
        double span_x = max_x - min_x, span_y = max_y - min_y;
        if (span_x <= 0.0) span_x = 1.0;
        if (span_y <= 0.0) span_y = 1.0;
        min_x -= 0.05 * span_x;
        max_x += 0.05 * span_x;
        min_y -= 0.05 * span_y;
        max_y += 0.05 * span_y;
    }
    double px(double x) const { return (x - min_x) / (max_x - min_x) * kCanvas; }
    double py(double y) const { return (max_y - y) / (max_y - min_y) * kCanvas; }

    bool empty = true;
};

std::string header() {
    return std::string("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"") +
           std::to_string(kCanvas) + "\" height=\"" + std::to_string(kCanvas) + "\" viewBox=\"0 0 " +
           std::to_string(kCanvas) + " " + std::to_string(kCanvas) + "\">\n";
}

void axes(std::string& out, const Bounds& b) {
    if (b.min_x < 0.0 && b.max_x > 0.0)
        out += "<line x1=\"" + fmt(b.px(0.0)) + "\" y1=\"0\" x2=\"" + fmt(b.px(0.0)) +
               "\" y2=\"" + std::to_string(kCanvas) + "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    if (b.min_y < 0.0 && b.max_y > 0.0)
        out += "<line x1=\"0\" y1=\"" + fmt(b.py(0.0)) + "\" x2=\"" + std::to_string(kCanvas) +
               "\" y2=\"" + fmt(b.py(0.0)) + "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(kCanvas) + "\" height=\"" +
           std::to_string(kCanvas) + "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
}

} // namespace

std::string render_scatter(const ScatterPlot& plot) {
    Bounds b;
    for (const auto& p : plot.points) b.include(p[0], p[1]);
    for (const auto& p : plot.marks) b.include(p[0], p[1]);
    b.finish();

    std::string out = header();
    axes(out, b);
    for (std::size_t i = 0; i < plot.points.size(); ++i) {
        const int c = i < plot.clusters.size() ? plot.clusters[i] : 0;
        out += "<circle cx=\"" + fmt(b.px(plot.points[i][0])) + "\" cy=\"" +
               fmt(b.py(plot.points[i][1])) + "\" r=\"5\" fill=\"" +
               kPalette[((c % 10) + 10) % 10] + "\" fill-opacity=\"0.85\"/>\n";
    }
    for (const auto& m : plot.marks) {
        const std::string x = fmt(b.px(m[0])), y = fmt(b.py(m[1]));
        out += "<path d=\"M " + x + " " + fmt(b.py(m[1]) - 9.0) + " L " + fmt(b.px(m[0]) + 9.0) +
               " " + y + " L " + x + " " + fmt(b.py(m[1]) + 9.0) + " L " + fmt(b.px(m[0]) - 9.0) +
               " " + y + " Z\" fill=\"#000000\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string render_heatmap(const HeatmapPlot& plot) {
    const std::size_t m = plot.values.rows(), n = plot.values.cols();
    double vmax = 0.0;
    for (double v : plot.values.data()) vmax = std::max(vmax, v);
    const double denom = std::log1p(vmax);

    const double label_pad = (!plot.row_labels.empty() || !plot.col_labels.empty()) ? 160.0 : 0.0;
    const double cell_w = (kCanvas - label_pad) / static_cast<double>(n);
    const double cell_h = (kCanvas - label_pad) / static_cast<double>(m);

    std::string out = header();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = plot.values(i, j);
            const double t = denom > 0.0 ? std::log1p(std::max(0.0, v)) / denom : 0.0;
            const int gray = static_cast<int>(std::lround(245.0 - 215.0 * t));
            char color[8];
            std::snprintf(color, sizeof color, "#%02x%02x%02x", gray, gray, gray);
            out += "<rect x=\"" + fmt(label_pad + cell_w * static_cast<double>(j)) + "\" y=\"" +
                   fmt(label_pad + cell_h * static_cast<double>(i)) + "\" width=\"" + fmt(cell_w) +
                   "\" height=\"" + fmt(cell_h) + "\" fill=\"" + color + "\"/>\n";
        }
    const double font = std::min(12.0, std::min(cell_w, cell_h));
    for (std::size_t i = 0; i < plot.row_labels.size() && i < m; ++i)
        out += "<text x=\"2\" y=\"" + fmt(label_pad + cell_h * (static_cast<double>(i) + 0.7)) +
               "\" font-size=\"" + fmt(font) + "\" font-family=\"monospace\">" +
               plot.row_labels[i] + "</text>\n";
    for (std::size_t j = 0; j < plot.col_labels.size() && j < n; ++j)
        out += "<text x=\"" + fmt(label_pad + cell_w * (static_cast<double>(j) + 0.7)) +
               "\" y=\"" + fmt(label_pad - 4.0) + "\" font-size=\"" + fmt(font) +
               "\" font-family=\"monospace\" transform=\"rotate(-90 " +
               fmt(label_pad + cell_w * (static_cast<double>(j) + 0.7)) + " " +
               fmt(label_pad - 4.0) + ")\">" + plot.col_labels[j] + "</text>\n";
    out += "</svg>\n";
    return out;
}

std::string render_curves(const CurvePlot& plot) {
    Bounds b;
    for (const auto& curve : plot.curves)
        for (const auto& p : curve) b.include(p[0], p[1]);
    b.finish();

    std::string out = header();
    axes(out, b);
    for (std::size_t c = 0; c < plot.curves.size(); ++c) {
        if (plot.curves[c].empty()) continue;
        const int cl = c < plot.clusters.size() ? plot.clusters[c] : 0;
        out += "<polyline fill=\"none\" stroke=\"";
        out += kPalette[((cl % 10) + 10) % 10];
        out += "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : plot.curves[c]) {
            out += fmt(b.px(p[0]));
            out += ",";
            out += fmt(b.py(p[1]));
            out += " ";
        }
        out += "\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!f) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

} // namespace carpet
