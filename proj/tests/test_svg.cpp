#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "carpet/svg.hpp"

using namespace carpet;

TEST_CASE("empty scatter is a valid SVG with the frame only") {
    const std::string svg = render_scatter(ScatterPlot{});
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("<rect") != std::string::npos);
    CHECK(svg.find("<circle") == std::string::npos);
}

TEST_CASE("2x2 heatmap: two light and two dark cells") {
    HeatmapPlot hm;
    hm.values = Matrix(2, 2, 0.0);
    hm.values(0, 1) = 1.0;
    hm.values(1, 0) = 1.0;
    const std::string svg = render_heatmap(hm);
    // log1p ramp: 0 -> gray 245 (#f5f5f5), max -> gray 30 (#1e1e1e)
    std::size_t light = 0, dark = 0, pos = 0;
    while ((pos = svg.find("#f5f5f5", pos)) != std::string::npos) {
        ++light;
        ++pos;
    }
    pos = 0;
    while ((pos = svg.find("#1e1e1e", pos)) != std::string::npos) {
        ++dark;
        ++pos;
    }
    CHECK(light == 2);
    CHECK(dark == 2);
}

TEST_CASE("identical input produces byte-identical output") {
    ScatterPlot sp;
    sp.points = {{0.1, 0.2}, {-0.5, 1.25}, {3.0, -2.0}};
    sp.clusters = {0, 1, 2};
    sp.marks = {{0.0, 0.0}};
    CHECK(render_scatter(sp) == render_scatter(sp));

    CurvePlot cp;
    cp.curves = {{{0.0, 0.0}, {1.0, 1.0}}, {{0.0, 1.0}, {1.0, 0.0}}};
    CHECK(render_curves(cp) == render_curves(cp));
}

TEST_CASE("distinguished marks are rendered") {
    ScatterPlot sp;
    sp.points = {{0.0, 0.0}};
    sp.marks = {{0.5, 0.5}};
    const std::string svg = render_scatter(sp);
    CHECK(svg.find("<path") != std::string::npos);
}

TEST_CASE("atomic write leaves the full content at the target path") {
    const std::string path = "test_svg_atomic.out";
    write_file_atomic(path, "payload\n");
    std::ifstream f(path);
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(content == "payload\n");
    std::remove(path.c_str());
}

TEST_CASE("cluster colors cycle through the fixed palette") {
    ScatterPlot sp;
    for (int i = 0; i < 12; ++i) {
        sp.points.push_back({static_cast<double>(i), 0.0});
        sp.clusters.push_back(i);
    }
    const std::string svg = render_scatter(sp);
    CHECK(svg.find("#1f77b4") != std::string::npos);
    CHECK(svg.find("#17becf") != std::string::npos);
}
