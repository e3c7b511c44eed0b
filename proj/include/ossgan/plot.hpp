#pragma once

// Grayscale raster charts for run artifacts: loss curves, FID-vs-threshold
// lines, and precision/recall scatters. Pure functions of their inputs, so
// the emitted PNG bytes are deterministic.

#include <cstdint>
#include <string>
#include <vector>

#include "ossgan/image.hpp"

namespace ossgan::plot {

// 5x7 bitmap glyphs; unknown characters render as a hollow box
void draw_text(img::GrayImage& canvas, int64_t x, int64_t y, const std::string& text,
               uint8_t shade);
void draw_line(img::GrayImage& canvas, double x0, double y0, double x1, double y1,
               uint8_t shade);

enum class SeriesStyle { line, points, line_and_points };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    SeriesStyle style = SeriesStyle::line;
    // cycles through a fixed palette when left at the default
    int shade = -1;
    bool mean_crosshair = false;  // mark (mean x, mean y)
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    int64_t width = 640;
    int64_t height = 420;
};

// axes, ticks, legend, and all series on one canvas; throws ValidationError
// when there is nothing to draw
img::GrayImage render_chart(const ChartSpec& spec);

}  // namespace ossgan::plot
