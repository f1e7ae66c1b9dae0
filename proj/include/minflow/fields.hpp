#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "grid.hpp"

namespace minflow {

// Cell-centered density (mass per unit area).
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0)
        : grid_(g), v_(static_cast<size_t>(g.cells()), fill) {}

    const Grid2D& grid() const { return grid_; }
    double& at(int i, int j) { return v_[static_cast<size_t>(grid_.cell(i, j))]; }
    double at(int i, int j) const { return v_[static_cast<size_t>(grid_.cell(i, j))]; }
    double& operator[](size_t k) { return v_[k]; }
    double operator[](size_t k) const { return v_[k]; }
    size_t size() const { return v_.size(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    double mass() const {
        double s = 0.0;
        for (double x : v_) s += x;
        return s * grid_.cell_area();
    }

    double min_value() const { return *std::min_element(v_.begin(), v_.end()); }
    double max_value() const { return *std::max_element(v_.begin(), v_.end()); }

    bool is_probability_density(double tol = 1e-9) const {
        if (min_value() < -tol) return false;
        return std::abs(mass() - 1.0) <= tol;
    }

    // Bilinear interpolation between cell centers, clamped at the boundary.
    double sample(const Vec2& p) const {
        double gx = p.x / grid_.h - 0.5;
        double gy = p.y / grid_.h - 0.5;
        int i0 = static_cast<int>(std::floor(gx));
        int j0 = static_cast<int>(std::floor(gy));
        double fx = gx - i0;
        double fy = gy - j0;
        if (i0 < 0) { i0 = 0; fx = 0.0; }
        if (i0 > grid_.nx - 2) { i0 = grid_.nx - 2; fx = 1.0; }
        if (j0 < 0) { j0 = 0; fy = 0.0; }
        if (j0 > grid_.ny - 2) { j0 = grid_.ny - 2; fy = 1.0; }
        double a = at(i0, j0), b = at(i0 + 1, j0);
        double c = at(i0, j0 + 1), d = at(i0 + 1, j0 + 1);
        return (1 - fy) * ((1 - fx) * a + fx * b) + fy * ((1 - fx) * c + fx * d);
    }

    ScalarField& operator+=(const ScalarField& o) {
        require_same_grid(o);
        for (size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
        return *this;
    }
    ScalarField& operator-=(const ScalarField& o) {
        require_same_grid(o);
        for (size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
        return *this;
    }
    ScalarField& operator*=(double s) {
        for (double& x : v_) x *= s;
        return *this;
    }
    ScalarField& operator+=(double c) {
        for (double& x : v_) x += c;
        return *this;
    }
    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
    friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

    void require_same_grid(const ScalarField& o) const {
        if (grid_ != o.grid_) throw InvalidInput("ScalarField: grid mismatch");
    }

private:
    Grid2D grid_;
    std::vector<double> v_;
};

// Staggered (MAC) face-flux field. u holds x-flux densities on vertical
// faces, (nx+1)*ny entries; w holds y-flux densities on horizontal faces,
// nx*(ny+1) entries. u(i,j) is the flux on the left face of cell (i,j).
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid2D& g)
        : grid_(g),
          u_(static_cast<size_t>((g.nx + 1) * g.ny), 0.0),
          w_(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0) {}

    const Grid2D& grid() const { return grid_; }
    double& u(int i, int j) { return u_[static_cast<size_t>(j * (grid_.nx + 1) + i)]; }
    double u(int i, int j) const { return u_[static_cast<size_t>(j * (grid_.nx + 1) + i)]; }
    double& w(int i, int j) { return w_[static_cast<size_t>(j * grid_.nx + i)]; }
    double w(int i, int j) const { return w_[static_cast<size_t>(j * grid_.nx + i)]; }
    std::vector<double>& u_values() { return u_; }
    const std::vector<double>& u_values() const { return u_; }
    std::vector<double>& w_values() { return w_; }
    const std::vector<double>& w_values() const { return w_; }

    // Per-cell vector: average of the two opposing face fluxes per direction.
    Vec2 cell_vector(int i, int j) const {
        return {0.5 * (u(i, j) + u(i + 1, j)), 0.5 * (w(i, j) + w(i, j + 1))};
    }

    void zero_boundary_faces() {
        for (int j = 0; j < grid_.ny; ++j) u(0, j) = u(grid_.nx, j) = 0.0;
        for (int i = 0; i < grid_.nx; ++i) w(i, 0) = w(i, grid_.ny) = 0.0;
    }

    bool is_boundary_parallel(double tol = 0.0) const {
        for (int j = 0; j < grid_.ny; ++j)
            if (std::abs(u(0, j)) > tol || std::abs(u(grid_.nx, j)) > tol) return false;
        for (int i = 0; i < grid_.nx; ++i)
            if (std::abs(w(i, 0)) > tol || std::abs(w(i, grid_.ny)) > tol) return false;
        return true;
    }

    VectorField& operator+=(const VectorField& o) {
        require_same_grid(o);
        for (size_t k = 0; k < u_.size(); ++k) u_[k] += o.u_[k];
        for (size_t k = 0; k < w_.size(); ++k) w_[k] += o.w_[k];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        require_same_grid(o);
        for (size_t k = 0; k < u_.size(); ++k) u_[k] -= o.u_[k];
        for (size_t k = 0; k < w_.size(); ++k) w_[k] -= o.w_[k];
        return *this;
    }
    VectorField& operator*=(double s) {
        for (double& x : u_) x *= s;
        for (double& x : w_) x *= s;
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(VectorField a, double s) { return a *= s; }
    friend VectorField operator*(double s, VectorField a) { return a *= s; }

    void require_same_grid(const VectorField& o) const {
        if (grid_ != o.grid_) throw InvalidInput("VectorField: grid mismatch");
    }

private:
    Grid2D grid_;
    std::vector<double> u_;
    std::vector<double> w_;
};

inline double mass(const ScalarField& f) { return f.mass(); }

// Exact discrete divergence per cell. Boundary faces carry the actual normal
// flux, so Neumann behavior is automatic.
inline ScalarField divergence(const VectorField& v) {
    const Grid2D& g = v.grid();
    ScalarField d(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d.at(i, j) = (v.u(i + 1, j) - v.u(i, j)) / g.h + (v.w(i, j + 1) - v.w(i, j)) / g.h;
    return d;
}

// Cell-centered Euclidean magnitude of the averaged per-cell vector.
inline ScalarField magnitude_field(const VectorField& v) {
    const Grid2D& g = v.grid();
    ScalarField m(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) m.at(i, j) = v.cell_vector(i, j).norm();
    return m;
}

// Total-variation norm: sum over cells of h^2 * |cell vector|.
inline double tv_norm(const VectorField& v) { return magnitude_field(v).mass(); }

// Outward normal fluxes on the four boundary sides, one value per face.
struct BoundaryFlux {
    std::vector<double> left, right, bottom, top; // left/right: ny, bottom/top: nx

    static BoundaryFlux zero(const Grid2D& g) {
        BoundaryFlux b;
        b.left.assign(static_cast<size_t>(g.ny), 0.0);
        b.right.assign(static_cast<size_t>(g.ny), 0.0);
        b.bottom.assign(static_cast<size_t>(g.nx), 0.0);
        b.top.assign(static_cast<size_t>(g.nx), 0.0);
        return b;
    }

    double sum() const {
        double s = 0.0;
        for (double x : left) s += x;
        for (double x : right) s += x;
        for (double x : bottom) s += x;
        for (double x : top) s += x;
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : left) m = std::max(m, std::abs(x));
        for (double x : right) m = std::max(m, std::abs(x));
        for (double x : bottom) m = std::max(m, std::abs(x));
        for (double x : top) m = std::max(m, std::abs(x));
        return m;
    }
};

inline BoundaryFlux boundary_flux(const VectorField& v) {
    const Grid2D& g = v.grid();
    BoundaryFlux b = BoundaryFlux::zero(g);
    for (int j = 0; j < g.ny; ++j) {
        b.left[static_cast<size_t>(j)] = -v.u(0, j);
        b.right[static_cast<size_t>(j)] = v.u(g.nx, j);
    }
    for (int i = 0; i < g.nx; ++i) {
        b.bottom[static_cast<size_t>(i)] = -v.w(i, 0);
        b.top[static_cast<size_t>(i)] = v.w(i, g.ny);
    }
    return b;
}

// Bilinear interpolation of the per-cell reconstructed vector of v at p,
// clamped at the boundary. Reconstructs on the fly; heavy users should cache
// cell vectors instead.
inline Vec2 sample_cell_vector(const VectorField& v, const Vec2& p) {
    const Grid2D& g = v.grid();
    double gx = p.x / g.h - 0.5;
    double gy = p.y / g.h - 0.5;
    int i0 = static_cast<int>(std::floor(gx));
    int j0 = static_cast<int>(std::floor(gy));
    double fx = gx - i0;
    double fy = gy - j0;
    if (i0 < 0) { i0 = 0; fx = 0.0; }
    if (i0 > g.nx - 2) { i0 = g.nx - 2; fx = 1.0; }
    if (j0 < 0) { j0 = 0; fy = 0.0; }
    if (j0 > g.ny - 2) { j0 = g.ny - 2; fy = 1.0; }
    Vec2 a = v.cell_vector(i0, j0), b = v.cell_vector(i0 + 1, j0);
    Vec2 c = v.cell_vector(i0, j0 + 1), d = v.cell_vector(i0 + 1, j0 + 1);
    return ((1 - fy) * (1 - fx)) * a + ((1 - fy) * fx) * b + (fy * (1 - fx)) * c + (fy * fx) * d;
}

} // namespace minflow
