#pragma once

#include <array>
#include <string>
#include <vector>

#include "carpet/matrix.hpp"

namespace carpet {

/// Scatter plot: points colored from a fixed 10-color palette by cluster index,
/// plus optional distinguished marks (rendered as larger black diamonds).
struct ScatterPlot {
    std::vector<std::array<double, 2>> points;
    std::vector<int> clusters;                  // empty = all cluster 0
    std::vector<std::array<double, 2>> marks;
};

/// Heatmap: light-to-dark grayscale on a log(1+x) scale.
struct HeatmapPlot {
    Matrix values;
    std::vector<std::string> row_labels, col_labels; // may be empty
};

/// A family of polylines, colored by the per-curve cluster index.
struct CurvePlot {
    std::vector<std::vector<std::array<double, 2>>> curves;
    std::vector<int> clusters; // empty = all cluster 0
};

// All renderers emit a deterministic 800x800 canvas whose viewBox covers the
// data bounds with a 5% margin; identical input yields byte-identical output.
std::string render_scatter(const ScatterPlot& plot);
std::string render_heatmap(const HeatmapPlot& plot);
std::string render_curves(const CurvePlot& plot);

/// Write-temp then rename.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace carpet
