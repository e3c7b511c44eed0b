#include "ossgan/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>

#include "ossgan/errors.hpp"

namespace ossgan::plot {

namespace {

// column-major 5x7 glyphs, least significant bit on the top row
struct Glyph {
    char ch;
    uint8_t col[5];
};

constexpr Glyph kFont[] = {
    {'0', {0x3e, 0x51, 0x49, 0x45, 0x3e}}, {'1', {0x00, 0x42, 0x7f, 0x40, 0x00}},
    {'2', {0x42, 0x61, 0x51, 0x49, 0x46}}, {'3', {0x21, 0x41, 0x45, 0x4b, 0x31}},
    {'4', {0x18, 0x14, 0x12, 0x7f, 0x10}}, {'5', {0x27, 0x45, 0x45, 0x45, 0x39}},
    {'6', {0x3c, 0x4a, 0x49, 0x49, 0x30}}, {'7', {0x01, 0x71, 0x09, 0x05, 0x03}},
    {'8', {0x36, 0x49, 0x49, 0x49, 0x36}}, {'9', {0x06, 0x49, 0x49, 0x29, 0x1e}},
    {'A', {0x7e, 0x11, 0x11, 0x11, 0x7e}}, {'B', {0x7f, 0x49, 0x49, 0x49, 0x36}},
    {'C', {0x3e, 0x41, 0x41, 0x41, 0x22}}, {'D', {0x7f, 0x41, 0x41, 0x22, 0x1c}},
    {'E', {0x7f, 0x49, 0x49, 0x49, 0x41}}, {'F', {0x7f, 0x09, 0x09, 0x09, 0x01}},
    {'G', {0x3e, 0x41, 0x49, 0x49, 0x7a}}, {'H', {0x7f, 0x08, 0x08, 0x08, 0x7f}},
    {'I', {0x00, 0x41, 0x7f, 0x41, 0x00}}, {'J', {0x20, 0x40, 0x41, 0x3f, 0x01}},
    {'K', {0x7f, 0x08, 0x14, 0x22, 0x41}}, {'L', {0x7f, 0x40, 0x40, 0x40, 0x40}},
    {'M', {0x7f, 0x02, 0x0c, 0x02, 0x7f}}, {'N', {0x7f, 0x04, 0x08, 0x10, 0x7f}},
    {'O', {0x3e, 0x41, 0x41, 0x41, 0x3e}}, {'P', {0x7f, 0x09, 0x09, 0x09, 0x06}},
    {'Q', {0x3e, 0x41, 0x51, 0x21, 0x5e}}, {'R', {0x7f, 0x09, 0x19, 0x29, 0x46}},
    {'S', {0x46, 0x49, 0x49, 0x49, 0x31}}, {'T', {0x01, 0x01, 0x7f, 0x01, 0x01}},
    {'U', {0x3f, 0x40, 0x40, 0x40, 0x3f}}, {'V', {0x1f, 0x20, 0x40, 0x20, 0x1f}},
    {'W', {0x3f, 0x40, 0x38, 0x40, 0x3f}}, {'X', {0x63, 0x14, 0x08, 0x14, 0x63}},
    {'Y', {0x07, 0x08, 0x70, 0x08, 0x07}}, {'Z', {0x61, 0x51, 0x49, 0x45, 0x43}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00}}, {'.', {0x00, 0x60, 0x60, 0x00, 0x00}},
    {',', {0x00, 0x50, 0x30, 0x00, 0x00}}, {'-', {0x08, 0x08, 0x08, 0x08, 0x08}},
    {'+', {0x08, 0x08, 0x3e, 0x08, 0x08}}, {'_', {0x40, 0x40, 0x40, 0x40, 0x40}},
    {'/', {0x20, 0x10, 0x08, 0x04, 0x02}}, {':', {0x00, 0x36, 0x36, 0x00, 0x00}},
    {'(', {0x00, 0x1c, 0x22, 0x41, 0x00}}, {')', {0x00, 0x41, 0x22, 0x1c, 0x00}},
    {'=', {0x14, 0x14, 0x14, 0x14, 0x14}}, {'%', {0x23, 0x13, 0x08, 0x64, 0x62}},
};
constexpr Glyph kUnknown = {'?', {0x7f, 0x41, 0x41, 0x41, 0x7f}};

const Glyph& glyph_for(char ch) {
    char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    for (const Glyph& g : kFont)
        if (g.ch == up) return g;
    return kUnknown;
}

void put(img::GrayImage& c, int64_t x, int64_t y, uint8_t shade) {
    if (x >= 0 && x < c.width && y >= 0 && y < c.height) c.at(y, x) = shade;
}

void marker(img::GrayImage& c, int64_t x, int64_t y, uint8_t shade) {
    for (int64_t d = -2; d <= 2; ++d) {
        put(c, x + d, y, shade);
        put(c, x, y + d, shade);
    }
}

constexpr uint8_t kPalette[] = {0, 112, 176, 64, 144, 208};
constexpr int64_t kMarginLeft = 56, kMarginRight = 16, kMarginTop = 26, kMarginBottom = 40;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void widen(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finalize() {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            double pad = std::max(1.0, std::fabs(lo)) * 0.1;
            lo -= pad;
            hi += pad;
        }
    }
};

std::string tick_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

void draw_text(img::GrayImage& canvas, int64_t x, int64_t y, const std::string& text,
               uint8_t shade) {
    for (char ch : text) {
        const Glyph& g = glyph_for(ch);
        for (int64_t cx = 0; cx < 5; ++cx)
            for (int64_t cy = 0; cy < 7; ++cy)
                if (g.col[cx] >> cy & 1) put(canvas, x + cx, y + cy, shade);
        x += 6;
    }
}

void draw_line(img::GrayImage& canvas, double x0, double y0, double x1, double y1,
               uint8_t shade) {
    double dx = x1 - x0, dy = y1 - y0;
    int64_t steps = static_cast<int64_t>(std::ceil(std::max(std::fabs(dx), std::fabs(dy)))) + 1;
    for (int64_t i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(steps);
        put(canvas, std::llround(x0 + t * dx), std::llround(y0 + t * dy), shade);
    }
}

img::GrayImage render_chart(const ChartSpec& spec) {
    if (spec.width < 160 || spec.height < 120)
        throw ValidationError("chart canvas too small: " + std::to_string(spec.width) + "x" +
                              std::to_string(spec.height));
    if (spec.series.empty()) throw ValidationError("chart has no series");

    Range rx, ry;
    int64_t drawable = 0;
    for (const Series& s : spec.series) {
        if (s.x.size() != s.y.size())
            throw ValidationError("series '" + s.label + "' has mismatched x/y lengths");
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            rx.widen(s.x[i]);
            ry.widen(s.y[i]);
            ++drawable;
        }
    }
    if (drawable == 0) throw ValidationError("chart has no finite points to draw");
    rx.finalize();
    ry.finalize();

    img::GrayImage canvas;
    canvas.width = spec.width;
    canvas.height = spec.height;
    canvas.pixels.assign(static_cast<size_t>(spec.width * spec.height), 255);

    const int64_t px0 = kMarginLeft, px1 = spec.width - kMarginRight;
    const int64_t py0 = kMarginTop, py1 = spec.height - kMarginBottom;
    auto to_px = [&](double x) {
        return px0 + (x - rx.lo) / (rx.hi - rx.lo) * static_cast<double>(px1 - px0);
    };
    auto to_py = [&](double y) {
        return py1 - (y - ry.lo) / (ry.hi - ry.lo) * static_cast<double>(py1 - py0);
    };

    // grid and tick labels
    for (int i = 0; i <= 4; ++i) {
        double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        int64_t gx = std::llround(to_px(fx));
        int64_t gy = std::llround(to_py(fy));
        draw_line(canvas, gx, py0, gx, py1, 232);
        draw_line(canvas, px0, gy, px1, gy, 232);
        std::string xt = tick_text(fx);
        draw_text(canvas, gx - 3 * static_cast<int64_t>(xt.size()), py1 + 5, xt, 96);
        std::string yt = tick_text(fy);
        draw_text(canvas, px0 - 6 * static_cast<int64_t>(yt.size()) - 4, gy - 3, yt, 96);
    }

    // axes
    draw_line(canvas, px0, py0, px0, py1, 0);
    draw_line(canvas, px0, py1, px1, py1, 0);

    draw_text(canvas, px0, 8, spec.title, 0);
    draw_text(canvas, (px0 + px1) / 2 - 3 * static_cast<int64_t>(spec.x_label.size()),
              spec.height - 14, spec.x_label, 0);
    draw_text(canvas, 4, py0 - 12, spec.y_label, 0);

    int64_t legend_y = py0 + 4;
    for (size_t si = 0; si < spec.series.size(); ++si) {
        const Series& s = spec.series[si];
        uint8_t shade = s.shade >= 0 ? static_cast<uint8_t>(s.shade)
                                     : kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];

        bool lines = s.style != SeriesStyle::points;
        bool points = s.style != SeriesStyle::line;
        double prev_x = 0.0, prev_y = 0.0;
        bool has_prev = false;
        double sum_x = 0.0, sum_y = 0.0;
        int64_t n_finite = 0;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                has_prev = false;
                continue;
            }
            double cx = to_px(s.x[i]), cy = to_py(s.y[i]);
            if (lines && has_prev) draw_line(canvas, prev_x, prev_y, cx, cy, shade);
            if (points || s.x.size() == 1)
                marker(canvas, std::llround(cx), std::llround(cy), shade);
            prev_x = cx;
            prev_y = cy;
            has_prev = true;
            sum_x += s.x[i];
            sum_y += s.y[i];
            ++n_finite;
        }

        if (s.mean_crosshair && n_finite > 0) {
            double mx = to_px(sum_x / static_cast<double>(n_finite));
            double my = to_py(sum_y / static_cast<double>(n_finite));
            draw_line(canvas, mx - 8, my, mx + 8, my, shade);
            draw_line(canvas, mx, my - 8, mx, my + 8, shade);
        }

        if (!s.label.empty()) {
            int64_t lx = px1 - 6 * static_cast<int64_t>(s.label.size()) - 24;
            draw_line(canvas, lx, legend_y + 3, lx + 14, legend_y + 3, shade);
            if (points) marker(canvas, lx + 7, legend_y + 3, shade);
            draw_text(canvas, lx + 18, legend_y, s.label, 0);
            legend_y += 10;
        }
    }
    return canvas;
}

}  // namespace ossgan::plot
