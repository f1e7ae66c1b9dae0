#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "fields.hpp"

namespace minflow {

// Polyline path on an implicit uniform time grid over [0,1].
struct Path {
    std::vector<Vec2> points;

    double length() const {
        double s = 0.0;
        for (size_t k = 1; k < points.size(); ++k) s += (points[k] - points[k - 1]).norm();
        return s;
    }
    const Vec2& start() const { return points.front(); }
    const Vec2& end() const { return points.back(); }
};

// Weighted finite set of paths; a probability measure over paths.
struct PathEnsemble {
    std::vector<Path> paths;
    std::vector<double> weights;

    size_t size() const { return paths.size(); }

    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    double average_length() const {
        double s = 0.0;
        for (size_t k = 0; k < paths.size(); ++k) s += weights[k] * paths[k].length();
        return s;
    }
};

inline ScalarField interpolate_density(const ScalarField& f0, const ScalarField& f1, double t) {
    if (f0.grid() != f1.grid()) throw InvalidInput("interpolate_density: grid mismatch");
    if (t < 0.0 || t > 1.0) throw InvalidInput("interpolate_density: t must be in [0,1]");
    ScalarField out = f0;
    out *= (1.0 - t);
    ScalarField b = f1;
    b *= t;
    out += b;
    return out;
}

namespace detail {

// Cached cell-vector reconstruction plus density interpolation for the
// time-dependent velocity v(x) / f_t(x).
class MoserSampler {
public:
    MoserSampler(const VectorField& v, const ScalarField& f0, const ScalarField& f1)
        : f0_(f0), f1_(f1), vx_(v.grid()), vy_(v.grid()) {
        const Grid2D& g = v.grid();
        if (f0.grid() != g || f1.grid() != g) throw InvalidInput("moser_velocity: grid mismatch");
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                Vec2 c = v.cell_vector(i, j);
                vx_.at(i, j) = c.x;
                vy_.at(i, j) = c.y;
            }
        }
    }

    Vec2 velocity(double t, const Vec2& p) const {
        double ft = (1.0 - t) * f0_.sample(p) + t * f1_.sample(p);
        if (ft < 1e-14)
            throw DegenerateDensity("moser velocity: interpolated density " + std::to_string(ft) +
                                    " below 1e-14 at (" + std::to_string(p.x) + ", " +
                                    std::to_string(p.y) + "), t=" + std::to_string(t) +
                                    "; inputs not regularized");
        return {vx_.sample(p) / ft, vy_.sample(p) / ft};
    }

    // Same velocity with a hard speed cap. Regularized densities are only
    // positive through exponentially small floors, so the raw ratio explodes
    // in regions that carry (almost) no particles; the cap keeps the fixed
    // RK4 step meaningful there instead of aborting the whole ensemble.
    Vec2 velocity_capped(double t, const Vec2& p, double speed_cap) const {
        double ft = (1.0 - t) * f0_.sample(p) + t * f1_.sample(p);
        if (ft < 1e-300) ft = 1e-300;
        Vec2 vel{vx_.sample(p) / ft, vy_.sample(p) / ft};
        double s = vel.norm();
        if (s > speed_cap) vel = vel * (speed_cap / s);
        return vel;
    }

private:
    const ScalarField& f0_;
    const ScalarField& f1_;
    ScalarField vx_, vy_;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

// The Dacorogna-Moser velocity v(x) / f_t(x) with f_t = (1-t) f0 + t f1,
// both factors sampled by bilinear interpolation.
inline Vec2 moser_velocity(const VectorField& v, const ScalarField& f0, const ScalarField& f1,
                           double t, const Vec2& x) {
    detail::MoserSampler s(v, f0, f1);
    return s.velocity(t, x);
}

// Seeds particles by stratified sampling of f0 and integrates each with
// classical RK4 at fixed step 1/n_steps, recording every intermediate
// position. Trajectories are deterministic per particle, so the result is
// independent of n_threads.
inline PathEnsemble integrate_paths(const VectorField& v, const ScalarField& f0,
                                    const ScalarField& f1, int n_particles, int n_steps,
                                    uint64_t seed, int n_threads = 1) {
    const Grid2D& g = v.grid();
    if (f0.grid() != g || f1.grid() != g) throw InvalidInput("integrate_paths: grid mismatch");
    if (n_particles < 1 || n_steps < 1)
        throw InvalidInput("integrate_paths: n_particles and n_steps must be positive");
    if (f0.min_value() <= 0.0 || f1.min_value() <= 0.0)
        throw InvalidInput("integrate_paths: densities must be strictly positive (regularize first)");
    {
        ScalarField resid = divergence(v) - (f0 - f1);
        double worst = 0.0;
        for (double x : resid.values()) worst = std::max(worst, std::abs(x));
        if (worst > 1e-8)
            throw InvalidInput("integrate_paths: divergence(v) != f0 - f1, max cell error " +
                               std::to_string(worst));
    }

    // Stratified seeding: floor of the expected per-cell count, the leftover
    // assigned by systematic resampling over the fractional parts.
    std::vector<int> counts(static_cast<size_t>(g.cells()), 0);
    std::vector<double> frac(static_cast<size_t>(g.cells()), 0.0);
    long long assigned = 0;
    double frac_total = 0.0;
    for (int c = 0; c < g.cells(); ++c) {
        double expected = n_particles * f0[static_cast<size_t>(c)] * g.cell_area();
        int base = static_cast<int>(std::floor(expected));
        counts[static_cast<size_t>(c)] = base;
        frac[static_cast<size_t>(c)] = expected - base;
        assigned += base;
        frac_total += frac[static_cast<size_t>(c)];
    }
    long long leftover = n_particles - assigned;
    if (leftover > 0 && frac_total > 0.0) {
        std::mt19937_64 rng(detail::splitmix64(seed));
        double step = frac_total / static_cast<double>(leftover);
        double pointer = std::uniform_real_distribution<double>(0.0, step)(rng);
        double cum = 0.0;
        long long taken = 0;
        for (int c = 0; c < g.cells() && taken < leftover; ++c) {
            cum += frac[static_cast<size_t>(c)];
            while (pointer < cum && taken < leftover) {
                counts[static_cast<size_t>(c)] += 1;
                pointer += step;
                ++taken;
            }
        }
        // fp slack in the cumulative sweep: park any remainder on the last cell
        while (taken < leftover) {
            counts[static_cast<size_t>(g.cells() - 1)] += 1;
            ++taken;
        }
    }

    detail::MoserSampler sampler(v, f0, f1);

    PathEnsemble ens;
    ens.paths.resize(static_cast<size_t>(n_particles));
    ens.weights.assign(static_cast<size_t>(n_particles), 1.0 / n_particles);

    // Flatten (cell, local index) -> global particle index.
    std::vector<int> cell_of(static_cast<size_t>(n_particles));
    {
        int k = 0;
        for (int c = 0; c < g.cells(); ++c)
            for (int q = 0; q < counts[static_cast<size_t>(c)]; ++q) cell_of[static_cast<size_t>(k++)] = c;
    }

    const double dt = 1.0 / n_steps;
    const double W = g.width(), H = g.height();
    // at most one domain diameter per RK4 step; see velocity_capped
    const double speed_cap = std::max(W, H) * n_steps;
    auto clamp_pos = [&](Vec2 p) {
        p.x = std::min(std::max(p.x, 0.0), W);
        p.y = std::min(std::max(p.y, 0.0), H);
        return p;
    };

    auto run_range = [&](int lo, int hi) {
        for (int k = lo; k < hi; ++k) {
            int c = cell_of[static_cast<size_t>(k)];
            int ci = c % g.nx, cj = c / g.nx;
            std::mt19937_64 rng(seed ^ detail::splitmix64(static_cast<uint64_t>(k) + 1));
            std::uniform_real_distribution<double> jitter(0.0, 1.0);
            Vec2 p{(ci + jitter(rng)) * g.h, (cj + jitter(rng)) * g.h};

            Path path;
            path.points.reserve(static_cast<size_t>(n_steps + 1));
            path.points.push_back(p);
            for (int s = 0; s < n_steps; ++s) {
                double t = s * dt;
                Vec2 k1 = sampler.velocity_capped(t, p, speed_cap);
                Vec2 k2 = sampler.velocity_capped(t + 0.5 * dt, clamp_pos(p + 0.5 * dt * k1), speed_cap);
                Vec2 k3 = sampler.velocity_capped(t + 0.5 * dt, clamp_pos(p + 0.5 * dt * k2), speed_cap);
                Vec2 k4 = sampler.velocity_capped(t + dt, clamp_pos(p + dt * k3), speed_cap);
                p = clamp_pos(p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
                path.points.push_back(p);
            }
            ens.paths[static_cast<size_t>(k)] = std::move(path);
        }
    };

    if (n_threads <= 1) {
        run_range(0, n_particles);
    } else {
        std::vector<std::thread> workers;
        int chunk = (n_particles + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            int lo = t * chunk, hi = std::min(n_particles, lo + chunk);
            if (lo >= hi) break;
            workers.emplace_back(run_range, lo, hi);
        }
        for (auto& th : workers) th.join();
    }
    return ens;
}

// Resamples a path at equal arclength spacing. The original vertices are
// kept (merged into the sample set), so the output traverses exactly the
// same polyline trace and the length is preserved.
inline Path reparametrize_constant_speed(const Path& p, int n_out) {
    if (n_out < 2) throw InvalidInput("reparametrize_constant_speed: n_out must be >= 2");
    const size_t n = p.points.size();
    std::vector<double> cum(n, 0.0);
    for (size_t k = 1; k < n; ++k) cum[k] = cum[k - 1] + (p.points[k] - p.points[k - 1]).norm();
    const double L = cum.back();

    Path out;
    if (L == 0.0) {
        out.points.assign(static_cast<size_t>(n_out), p.points.front());
        return out;
    }

    const double tol = 1e-15 * L;
    size_t seg = 0; // original vertex index, cum[seg] <= current arclength
    out.points.push_back(p.points.front());
    for (int k = 1; k < n_out; ++k) {
        double s = L * k / (n_out - 1);
        // emit any original vertices strictly before this sample
        while (seg + 1 < n && cum[seg + 1] < s - tol) {
            ++seg;
            if (cum[seg] > tol && (p.points[seg] - out.points.back()).norm() > 0.0)
                out.points.push_back(p.points[seg]);
        }
        if (k == n_out - 1) {
            out.points.push_back(p.points.back());
            break;
        }
        while (seg + 1 < n && cum[seg + 1] <= s) ++seg;
        double ds = cum[seg + 1] - cum[seg];
        double f = (ds > 0.0) ? (s - cum[seg]) / ds : 0.0;
        Vec2 q = p.points[seg] + f * (p.points[seg + 1] - p.points[seg]);
        if ((q - out.points.back()).norm() > 0.0) out.points.push_back(q);
    }
    return out;
}

} // namespace minflow
