#pragma once

#include <cmath>
#include <cstdint>

#include "errors.hpp"

namespace minflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Uniform cell grid covering [0, nx*h] x [0, ny*h]. Cell (i,j) has center
// ((i+1/2)h, (j+1/2)h) and area h^2.
struct Grid2D {
    int nx = 0;
    int ny = 0;
    double h = 0.0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double h_) : nx(nx_), ny(ny_), h(h_) {
        if (nx < 2 || ny < 2) throw InvalidInput("Grid2D: nx and ny must be >= 2");
        if (!(h > 0.0)) throw InvalidInput("Grid2D: h must be positive");
    }

    static Grid2D unit_square(int n) { return Grid2D(n, n, 1.0 / n); }

    int cells() const { return nx * ny; }
    double width() const { return nx * h; }
    double height() const { return ny * h; }
    double cell_area() const { return h * h; }
    double area() const { return width() * height(); }

    int cell(int i, int j) const { return j * nx + i; }
    Vec2 center(int i, int j) const { return {(i + 0.5) * h, (j + 0.5) * h}; }

    bool contains(const Vec2& p, double tol = 1e-12) const {
        return p.x >= -tol && p.x <= width() + tol && p.y >= -tol && p.y <= height() + tol;
    }

    // Cell index of a point, clamped to the grid.
    int locate_i(double x) const {
        int i = static_cast<int>(std::floor(x / h));
        if (i < 0) i = 0;
        if (i > nx - 1) i = nx - 1;
        return i;
    }
    int locate_j(double y) const {
        int j = static_cast<int>(std::floor(y / h));
        if (j < 0) j = 0;
        if (j > ny - 1) j = ny - 1;
        return j;
    }

    bool operator==(const Grid2D& o) const { return nx == o.nx && ny == o.ny && h == o.h; }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

} // namespace minflow
