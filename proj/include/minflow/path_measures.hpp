#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "fields.hpp"
#include "io.hpp"
#include "moser.hpp"

namespace minflow {

namespace detail {

// Exact parametric traversal of one segment through the grid: the segment is
// cut at every gridline crossing and the callback receives, per sub-segment,
// the containing cell, its length and its displacement. The parameter
// breakpoints telescope, so summed sub-lengths reproduce the segment length
// exactly.
template <typename F>
void traverse_segment(const Grid2D& g, const Vec2& a_in, const Vec2& b_in, F&& deposit) {
    // Canonical orientation so a segment and its exact reversal produce the
    // same sub-segments with opposite displacement signs.
    bool flipped = (b_in.x < a_in.x) || (b_in.x == a_in.x && b_in.y < a_in.y);
    const Vec2& a = flipped ? b_in : a_in;
    const Vec2& b = flipped ? a_in : b_in;
    const double sign = flipped ? -1.0 : 1.0;

    Vec2 d = b - a;
    double seg_len = d.norm();
    if (seg_len == 0.0) return;

    thread_local std::vector<double> ts;
    ts.clear();
    ts.push_back(0.0);
    ts.push_back(1.0);
    if (d.x != 0.0) {
        double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
        int k0 = static_cast<int>(std::ceil(lo / g.h));
        int k1 = static_cast<int>(std::floor(hi / g.h));
        for (int k = std::max(k0, 0); k <= std::min(k1, g.nx); ++k) {
            double t = (k * g.h - a.x) / d.x;
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    }
    if (d.y != 0.0) {
        double lo = std::min(a.y, b.y), hi = std::max(a.y, b.y);
        int k0 = static_cast<int>(std::ceil(lo / g.h));
        int k1 = static_cast<int>(std::floor(hi / g.h));
        for (int k = std::max(k0, 0); k <= std::min(k1, g.ny); ++k) {
            double t = (k * g.h - a.y) / d.y;
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());

    for (size_t s = 0; s + 1 < ts.size(); ++s) {
        double t0 = ts[s], t1 = ts[s + 1];
        if (t1 <= t0) continue;
        double tm = 0.5 * (t0 + t1);
        Vec2 mid = a + tm * d;
        int ci = g.locate_i(mid.x);
        int cj = g.locate_j(mid.y);
        double dt = t1 - t0;
        deposit(ci, cj, seg_len * dt, (sign * dt) * d);
    }
}

inline void require_inside(const Grid2D& g, const Path& p) {
    for (const Vec2& q : p.points)
        if (!g.contains(q)) throw InvalidInput("path point outside grid");
}

// True if the reversed vertex sequence is lexicographically smaller. Used to
// process every path in a direction-independent order, so a path and its
// exact reversal run through identical floating-point operations up to sign.
inline bool reversed_is_canonical(const Path& p) {
    const size_t n = p.points.size();
    for (size_t k = 0; k < n; ++k) {
        const Vec2& f = p.points[k];
        const Vec2& b = p.points[n - 1 - k];
        if (f.x != b.x) return b.x < f.x;
        if (f.y != b.y) return b.y < f.y;
    }
    return false;
}

} // namespace detail

// Length of a path weighted by the cellwise metric phi: the sum over
// cell-clipped sub-segments of sub-length times the cell value.
inline double weighted_length(const Path& p, const ScalarField& phi) {
    const Grid2D& g = phi.grid();
    detail::require_inside(g, p);
    double total = 0.0;
    for (size_t k = 1; k < p.points.size(); ++k)
        detail::traverse_segment(g, p.points[k - 1], p.points[k],
                                 [&](int i, int j, double len, Vec2) { total += len * phi.at(i, j); });
    return total;
}

// Traffic intensity: cell density of cumulated path arclength. The total
// mass equals the Q-average of the path lengths exactly.
inline ScalarField intensity(const PathEnsemble& Q, const Grid2D& grid, int n_threads = 1) {
    const double inv_area = 1.0 / grid.cell_area();
    auto deposit_range = [&](size_t lo, size_t hi, ScalarField& acc) {
        for (size_t k = lo; k < hi; ++k) {
            const Path& p = Q.paths[k];
            detail::require_inside(grid, p);
            double wq = Q.weights[k] * inv_area;
            for (size_t s = 1; s < p.points.size(); ++s)
                detail::traverse_segment(grid, p.points[s - 1], p.points[s],
                                         [&](int i, int j, double len, Vec2) { acc.at(i, j) += wq * len; });
        }
    };
    if (n_threads <= 1 || Q.size() < 2) {
        ScalarField out(grid);
        deposit_range(0, Q.size(), out);
        return out;
    }
    std::vector<ScalarField> bufs(static_cast<size_t>(n_threads), ScalarField(grid));
    std::vector<std::thread> workers;
    size_t chunk = (Q.size() + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        size_t lo = t * chunk, hi = std::min(Q.size(), lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi, t] { deposit_range(lo, hi, bufs[static_cast<size_t>(t)]); });
    }
    for (auto& th : workers) th.join();
    ScalarField out(grid);
    for (const auto& b : bufs) out += b;
    return out;
}

// Traffic flow: each clipped sub-segment's displacement, weighted, split
// equally between the two opposing faces of its cell and divided by h^2 for
// density units. A path and its exact reversal cancel exactly.
inline VectorField flow(const PathEnsemble& Q, const Grid2D& grid, int n_threads = 1) {
    const double inv_area2 = 0.5 / grid.cell_area();
    auto deposit_range = [&](size_t lo, size_t hi, VectorField& acc) {
        for (size_t k = lo; k < hi; ++k) {
            const Path& p = Q.paths[k];
            detail::require_inside(grid, p);
            const size_t n = p.points.size();
            const bool flip = detail::reversed_is_canonical(p);
            const double wq = (flip ? -1.0 : 1.0) * Q.weights[k] * inv_area2;
            auto put = [&](int i, int j, double, Vec2 disp) {
                acc.u(i, j) += wq * disp.x;
                acc.u(i + 1, j) += wq * disp.x;
                acc.w(i, j) += wq * disp.y;
                acc.w(i, j + 1) += wq * disp.y;
            };
            if (flip) {
                for (size_t s = n; s-- > 1;) detail::traverse_segment(grid, p.points[s], p.points[s - 1], put);
            } else {
                for (size_t s = 1; s < n; ++s) detail::traverse_segment(grid, p.points[s - 1], p.points[s], put);
            }
        }
    };
    if (n_threads <= 1 || Q.size() < 2) {
        VectorField out(grid);
        deposit_range(0, Q.size(), out);
        return out;
    }
    std::vector<VectorField> bufs(static_cast<size_t>(n_threads), VectorField(grid));
    std::vector<std::thread> workers;
    size_t chunk = (Q.size() + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        size_t lo = t * chunk, hi = std::min(Q.size(), lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi, t] { deposit_range(lo, hi, bufs[static_cast<size_t>(t)]); });
    }
    for (auto& th : workers) th.join();
    VectorField out(grid);
    for (const auto& b : bufs) out += b;
    return out;
}

// Histogram of path start (t=0) or end (t=1) points as a cell density.
inline ScalarField endpoint_histogram(const PathEnsemble& Q, const Grid2D& grid, bool at_end) {
    ScalarField out(grid);
    const double inv_area = 1.0 / grid.cell_area();
    for (size_t k = 0; k < Q.size(); ++k) {
        const Vec2& p = at_end ? Q.paths[k].end() : Q.paths[k].start();
        out.at(grid.locate_i(p.x), grid.locate_j(p.y)) += Q.weights[k] * inv_area;
    }
    return out;
}

inline double l1_distance(const ScalarField& a, const ScalarField& b) {
    a.require_same_grid(b);
    double s = 0.0;
    for (size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s * a.grid().cell_area();
}

// Numerical certificate of the mass decomposition |v| = |v - v_Q| + |v_Q|.
struct DecompositionReport {
    double norm_v = 0.0;
    double norm_vQ = 0.0;
    double norm_residual = 0.0;
    double intensity_mass = 0.0;
    double defect = 0.0; // norm_residual + intensity_mass - norm_v
    double marginal_gap_mu = 0.0;
    double marginal_gap_nu = 0.0;

    std::string to_json() const {
        std::string s = "{\n";
        s += "  \"norm_v\": " + io::fmt17(norm_v) + ",\n";
        s += "  \"norm_vQ\": " + io::fmt17(norm_vQ) + ",\n";
        s += "  \"norm_residual\": " + io::fmt17(norm_residual) + ",\n";
        s += "  \"intensity_mass\": " + io::fmt17(intensity_mass) + ",\n";
        s += "  \"defect\": " + io::fmt17(defect) + ",\n";
        s += "  \"marginal_gap_mu\": " + io::fmt17(marginal_gap_mu) + ",\n";
        s += "  \"marginal_gap_nu\": " + io::fmt17(marginal_gap_nu) + "\n";
        s += "}";
        return s;
    }
};

inline DecompositionReport decomposition_report(const VectorField& v, const PathEnsemble& Q,
                                                const ScalarField& mu, const ScalarField& nu,
                                                int n_threads = 1) {
    if (mu.grid() != v.grid() || nu.grid() != v.grid())
        throw InvalidInput("decomposition_report: grid mismatch");
    {
        ScalarField resid = divergence(v) - (mu - nu);
        double worst = 0.0;
        for (double x : resid.values()) worst = std::max(worst, std::abs(x));
        if (worst > 1e-8)
            throw InvalidInput("decomposition_report: divergence(v) != mu - nu, max cell error " +
                               std::to_string(worst));
    }
    VectorField vQ = flow(Q, v.grid(), n_threads);
    ScalarField iQ = intensity(Q, v.grid(), n_threads);

    DecompositionReport r;
    r.norm_v = tv_norm(v);
    r.norm_vQ = tv_norm(vQ);
    r.norm_residual = tv_norm(v - vQ);
    r.intensity_mass = iQ.mass();
    r.defect = r.norm_residual + r.intensity_mass - r.norm_v;
    r.marginal_gap_mu = l1_distance(endpoint_histogram(Q, v.grid(), false), mu);
    r.marginal_gap_nu = l1_distance(endpoint_histogram(Q, v.grid(), true), nu);
    return r;
}

// Path ensemble CSV: header "# paths count=<int>", rows
// "path_id, weight, point_index, x, y".
inline void write_paths(const std::string& path, const PathEnsemble& Q) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << "# paths count=" << Q.size() << "\n";
    for (size_t k = 0; k < Q.size(); ++k)
        for (size_t p = 0; p < Q.paths[k].points.size(); ++p)
            out << k << "," << io::fmt17(Q.weights[k]) << "," << p << ","
                << io::fmt17(Q.paths[k].points[p].x) << "," << io::fmt17(Q.paths[k].points[p].y) << "\n";
}

inline PathEnsemble read_paths(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# paths", 0) != 0)
        throw InvalidInput(path + ": expected '# paths' header");
    PathEnsemble Q;
    std::vector<double> row;
    long long prev_id = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        row.clear();
        io::detail::parse_row(line, row);
        if (row.size() != 5) throw InvalidInput(path + ": expected 5 columns per row");
        long long id = static_cast<long long>(row[0]);
        if (id != prev_id) {
            if (id != prev_id + 1) throw InvalidInput(path + ": path ids must be consecutive");
            Q.paths.emplace_back();
            Q.weights.push_back(row[1]);
            prev_id = id;
        }
        Q.paths.back().points.push_back({row[3], row[4]});
    }
    return Q;
}

} // namespace minflow
