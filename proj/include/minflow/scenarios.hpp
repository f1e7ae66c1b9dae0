#pragma once

#include <cmath>
#include <tuple>

#include "fields.hpp"

namespace minflow {

// Divergence-free circulation on a closed rectangular loop of grid faces,
// built from a vertex stream function so the telescoping is exact. Every
// loop face carries flux of magnitude `strength`.
inline VectorField make_cycle_field(const Grid2D& grid, const Vec2& center, double radius,
                                    double strength) {
    VectorField v(grid);
    if (strength == 0.0) return v;
    if (!(radius > 0.0)) throw InvalidInput("make_cycle_field: radius must be positive");

    // Vertices strictly inside the square of half-side `radius` around the
    // center; the loop faces are the stream-function jumps on its boundary.
    int i_lo = static_cast<int>(std::ceil((center.x - radius) / grid.h));
    int i_hi = static_cast<int>(std::floor((center.x + radius) / grid.h));
    int j_lo = static_cast<int>(std::ceil((center.y - radius) / grid.h));
    int j_hi = static_cast<int>(std::floor((center.y + radius) / grid.h));
    if (i_lo > i_hi || j_lo > j_hi)
        throw InvalidInput("make_cycle_field: radius too small, no interior vertices");
    if (i_lo < 1 || i_hi > grid.nx - 1 || j_lo < 1 || j_hi > grid.ny - 1)
        throw InvalidInput("make_cycle_field: loop outside grid");

    auto psi = [&](int i, int j) {
        return (i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi) ? strength * grid.h : 0.0;
    };
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) v.u(i, j) = (psi(i, j + 1) - psi(i, j)) / grid.h;
    for (int j = 0; j <= grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) v.w(i, j) = -(psi(i + 1, j) - psi(i, j)) / grid.h;
    return v;
}

// Analytic y-invariant fixture on the unit square:
//   v = ((x - x^2)/2, 0),  mu = 1 + (1-2x)/4,  nu = 1 - (1-2x)/4.
// v is boundary-parallel and the discrete divergence identity is exact
// because the flux profile is quadratic.
inline std::tuple<VectorField, ScalarField, ScalarField> make_1d_profile(const Grid2D& grid) {
    if (std::abs(grid.width() - 1.0) > 1e-9 || std::abs(grid.height() - 1.0) > 1e-9)
        throw InvalidInput("make_1d_profile: requires the unit square");
    VectorField v(grid);
    ScalarField mu(grid), nu(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i <= grid.nx; ++i) {
            double x = i * grid.h;
            v.u(i, j) = 0.5 * (x - x * x);
        }
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            double x = (i + 0.5) * grid.h;
            mu.at(i, j) = 1.0 + 0.25 * (1.0 - 2.0 * x);
            nu.at(i, j) = 1.0 - 0.25 * (1.0 - 2.0 * x);
        }
    return {v, mu, nu};
}

namespace detail {

inline double smooth_bump(double t) { // sin^2 ramp on [0,1], zero outside
    if (t <= 0.0 || t >= 1.0) return 0.0;
    double s = std::sin(M_PI * t);
    return s * s;
}

} // namespace detail

// Two-region scenario: a smooth source-to-sink transport confined to the
// left half, plus an off-support circulation loop in the right half. The
// returned field satisfies divergence(v) = mu - nu exactly (the loop is
// divergence-free). loop_strength < 0 picks the strength that makes the
// loop contribute half of tv_norm(v).
inline std::tuple<VectorField, ScalarField, ScalarField> make_separated_scenario(
    const Grid2D& grid, double loop_strength = -1.0) {
    if (grid.nx < 32 || grid.ny < 32) throw InvalidInput("make_separated_scenario: grid must be >= 32x32");
    const double W = grid.width(), H = grid.height();

    // Transport field: separable profile u(x, y) = g(x) phi(y) supported in
    // the left half; mu and nu are the positive/negative parts of its
    // divergence, scaled to unit mass.
    const double x0 = 0.05 * W, x1 = 0.45 * W;
    const double y0 = 0.20 * H, y1 = 0.80 * H;
    VectorField v(grid);
    for (int j = 0; j < grid.ny; ++j) {
        double phi = detail::smooth_bump(((j + 0.5) * grid.h - y0) / (y1 - y0));
        for (int i = 0; i <= grid.nx; ++i) {
            double x = i * grid.h;
            v.u(i, j) = detail::smooth_bump((x - x0) / (x1 - x0)) * phi;
        }
    }
    ScalarField d = divergence(v);
    double pos_mass = 0.0;
    for (double x : d.values()) pos_mass += std::max(x, 0.0);
    pos_mass *= grid.cell_area();
    v *= 1.0 / pos_mass;

    d = divergence(v);
    ScalarField mu(grid), nu(grid);
    for (size_t k = 0; k < d.size(); ++k) {
        mu[k] = std::max(d[k], 0.0);
        nu[k] = std::max(-d[k], 0.0);
    }

    if (loop_strength != 0.0) {
        Vec2 c{0.75 * W, 0.5 * H};
        double radius = 0.12 * W;
        if (loop_strength < 0.0) {
            double transport_tv = tv_norm(v);
            double unit_tv = tv_norm(make_cycle_field(grid, c, radius, 1.0));
            loop_strength = transport_tv / unit_tv;
        }
        v += make_cycle_field(grid, c, radius, loop_strength);
    }
    return {v, mu, nu};
}

} // namespace minflow
