#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "fields.hpp"

namespace minflow {

namespace detail {

struct Image {
    int w = 0, h = 0;
    std::vector<unsigned char> px; // RGB

    Image(int w_, int h_) : w(w_), h(h_), px(static_cast<size_t>(w_ * h_ * 3), 0) {}

    void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
        if (x < 0 || x >= w || y < 0 || y >= h) return;
        size_t k = 3 * static_cast<size_t>(y * w + x);
        px[k] = r;
        px[k + 1] = g;
        px[k + 2] = b;
    }

    void line(int x0, int y0, int x1, int y1, unsigned char r, unsigned char g, unsigned char b) {
        int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
        int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(x0, y0, r, g, b);
            if (x0 == x1 && y0 == y1) break;
            int e2 = 2 * err;
            if (e2 >= dy) { err += dy; x0 += sx; }
            if (e2 <= dx) { err += dx; y0 += sy; }
        }
    }

    void write_ppm(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InvalidInput("cannot write file: " + path);
        out << "P6\n" << w << " " << h << "\n255\n";
        out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    }
};

constexpr int kCellPixels = 8;

} // namespace detail

// Grayscale heatmap, linear over [0, max]; row j = ny-1 at the top.
inline void render_scalar(const ScalarField& f, const std::string& path) {
    const Grid2D& g = f.grid();
    const int S = detail::kCellPixels;
    detail::Image img(g.nx * S, g.ny * S);
    double mx = f.max_value();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double t = (mx > 0.0) ? std::clamp(f.at(i, j) / mx, 0.0, 1.0) : 0.0;
            auto c = static_cast<unsigned char>(std::lround(255.0 * t));
            for (int py = 0; py < S; ++py)
                for (int px = 0; px < S; ++px)
                    img.set(i * S + px, (g.ny - 1 - j) * S + py, c, c, c);
        }
    img.write_ppm(path);
}

// Magnitude heatmap with an arrow glyph every k cells, k = max(1, nx/16).
inline void render_vector(const VectorField& v, const std::string& path) {
    const Grid2D& g = v.grid();
    ScalarField mag = magnitude_field(v);
    const int S = detail::kCellPixels;
    detail::Image img(g.nx * S, g.ny * S);
    double mx = mag.max_value();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double t = (mx > 0.0) ? std::clamp(mag.at(i, j) / mx, 0.0, 1.0) : 0.0;
            auto c = static_cast<unsigned char>(std::lround(255.0 * t));
            for (int py = 0; py < S; ++py)
                for (int px = 0; px < S; ++px)
                    img.set(i * S + px, (g.ny - 1 - j) * S + py, c, c, c);
        }
    int k = std::max(1, g.nx / 16);
    double glyph = 0.45 * k * S; // half-length in pixels
    for (int j = k / 2; j < g.ny; j += k)
        for (int i = k / 2; i < g.nx; i += k) {
            Vec2 d = v.cell_vector(i, j);
            double n = d.norm();
            if (!(n > 0.0) || mx <= 0.0) continue;
            double scale = glyph * (n / mx) / n;
            int cx = i * S + S / 2, cy = (g.ny - 1 - j) * S + S / 2;
            int ex = cx + static_cast<int>(std::lround(d.x * scale));
            int ey = cy - static_cast<int>(std::lround(d.y * scale));
            img.line(cx, cy, ex, ey, 220, 40, 40);
            img.set(ex, ey, 255, 120, 40); // head marker
        }
    img.write_ppm(path);
}

} // namespace minflow
