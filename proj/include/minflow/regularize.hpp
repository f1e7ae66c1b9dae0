#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fields.hpp"
#include "io.hpp"

namespace minflow {

// Bookkeeping for one regularization pass. a_eps/b_eps are the masses of the
// smoothed mu/nu escaping the enlarged domain, c_eps the largest normal flux
// of the smoothed field on its boundary before correction.
struct RegularizationReport {
    double epsilon = 0.0;
    double a_eps = 0.0;
    double b_eps = 0.0;
    double c_eps = 0.0;
    double poisson_residual = 0.0;
    double floor = 0.0;

    std::string to_json() const {
        std::string s = "{\n";
        s += "  \"epsilon\": " + io::fmt17(epsilon) + ",\n";
        s += "  \"a_eps\": " + io::fmt17(a_eps) + ",\n";
        s += "  \"b_eps\": " + io::fmt17(b_eps) + ",\n";
        s += "  \"c_eps\": " + io::fmt17(c_eps) + ",\n";
        s += "  \"poisson_residual\": " + io::fmt17(poisson_residual) + ",\n";
        s += "  \"floor\": " + io::fmt17(floor) + "\n";
        s += "}";
        return s;
    }
};

// Width of the zero padding (in cells) for the enlarged domain, from the
// shrinking-domain margin t_eps = eps^(1/3).
inline int pad_cells(double eps, double h) {
    return static_cast<int>(std::ceil(std::cbrt(eps) / h));
}

inline Grid2D padded_grid(const Grid2D& g, int pad) {
    return Grid2D(g.nx + 2 * pad, g.ny + 2 * pad, g.h);
}

inline ScalarField embed_scalar(const ScalarField& f, int pad) {
    const Grid2D& g = f.grid();
    ScalarField out(padded_grid(g, pad));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.at(i + pad, j + pad) = f.at(i, j);
    return out;
}

inline ScalarField restrict_scalar(const ScalarField& f, int pad, const Grid2D& target) {
    ScalarField out(target);
    for (int j = 0; j < target.ny; ++j)
        for (int i = 0; i < target.nx; ++i) out.at(i, j) = f.at(i + pad, j + pad);
    return out;
}

inline VectorField embed_vector(const VectorField& v, int pad) {
    const Grid2D& g = v.grid();
    VectorField out(padded_grid(g, pad));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) out.u(i + pad, j + pad) = v.u(i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.w(i + pad, j + pad) = v.w(i, j);
    return out;
}

namespace detail {

// Sampled Gaussian of standard deviation eps, normalized to sum 1. The
// support radius covers at least the whole array so that escaped-mass
// constants and density floors stay strictly positive; entries that
// underflow to zero far out are harmless because the floor is carried by the
// additive constants a_eps/|Omega'|.
struct Kernel1D {
    int radius = 0;
    std::vector<double> k; // index d + radius, d in [-radius, radius]

    Kernel1D(double eps, double h, int span) {
        radius = std::max(static_cast<int>(std::ceil(4.0 * eps / h)), span);
        k.resize(static_cast<size_t>(2 * radius + 1));
        double sum = 0.0;
        for (int d = -radius; d <= radius; ++d) {
            double x = d * h;
            double val = std::exp(-x * x / (2.0 * eps * eps));
            k[static_cast<size_t>(d + radius)] = val;
            sum += val;
        }
        for (double& x : k) x /= sum;
    }

    // Mass of the kernel centered at index c that falls outside [0, n).
    // Summed tail-first so that tiny weights survive in double precision.
    double escaped(int c, int n) const {
        double e = 0.0;
        for (int d = -radius; c + d < 0; ++d) e += k[static_cast<size_t>(d + radius)];
        for (int d = radius; c + d >= n; --d) e += k[static_cast<size_t>(d + radius)];
        return e;
    }
};

// Separable convolution of a 2D array (row-major, stride = width). Zero
// extension outside the array; restricted to the array, this equals the
// whole-plane convolution because a pass never moves data across the other
// axis.
inline void convolve_2d(std::vector<double>& a, int width, int height, const Kernel1D& kx,
                        const Kernel1D& ky) {
    std::vector<double> tmp(a.size(), 0.0);
    for (int j = 0; j < height; ++j) {
        for (int i = 0; i < width; ++i) {
            double s = 0.0;
            int dlo = std::max(-kx.radius, i - (width - 1));
            int dhi = std::min(kx.radius, i);
            for (int d = dlo; d <= dhi; ++d)
                s += kx.k[static_cast<size_t>(d + kx.radius)] * a[static_cast<size_t>(j * width + i - d)];
            tmp[static_cast<size_t>(j * width + i)] = s;
        }
    }
    for (int i = 0; i < width; ++i) {
        for (int j = 0; j < height; ++j) {
            double s = 0.0;
            int dlo = std::max(-ky.radius, j - (height - 1));
            int dhi = std::min(ky.radius, j);
            for (int d = dlo; d <= dhi; ++d)
                s += ky.k[static_cast<size_t>(d + ky.radius)] * tmp[static_cast<size_t>((j - d) * width + i)];
            a[static_cast<size_t>(j * width + i)] = s;
        }
    }
}

} // namespace detail

// Gaussian smoothing of a cell density, computed on the enlarged grid (input
// padded by pad_cells(eps, h) cells of zeros). Mass is preserved up to the
// tail escaping the enlarged grid.
inline ScalarField gaussian_convolve_scalar(const ScalarField& f, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("gaussian_convolve_scalar: eps must be positive");
    const Grid2D& g = f.grid();
    int pad = pad_cells(eps, g.h);
    ScalarField out = embed_scalar(f, pad);
    const Grid2D& pg = out.grid();
    detail::Kernel1D kx(eps, g.h, pg.nx), ky(eps, g.h, pg.ny);
    detail::convolve_2d(out.values(), pg.nx, pg.ny, kx, ky);
    return out;
}

// Componentwise Gaussian smoothing of the face fluxes on the enlarged grid.
// Commutes with the discrete divergence.
inline VectorField gaussian_convolve_vector(const VectorField& v, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("gaussian_convolve_vector: eps must be positive");
    const Grid2D& g = v.grid();
    int pad = pad_cells(eps, g.h);
    VectorField out = embed_vector(v, pad);
    const Grid2D& pg = out.grid();
    detail::Kernel1D kx(eps, g.h, pg.nx + 1), ky(eps, g.h, pg.ny + 1);
    detail::convolve_2d(out.u_values(), pg.nx + 1, pg.ny, kx, ky);
    detail::convolve_2d(out.w_values(), pg.nx, pg.ny + 1, kx, ky);
    return out;
}

// Solves the discrete Neumann problem div(grad u) = rhs with prescribed
// outward gradient -boundary_flux on the boundary faces, mean of u pinned to
// zero, and returns delta = grad u as a staggered field. The boundary faces
// of delta carry -boundary_flux exactly by construction.
//
// Compatibility requires mass(rhs) + h * sum(boundary_flux) = 0 (the
// discrete divergence theorem applied to delta).
inline VectorField poisson_neumann(const ScalarField& rhs, const BoundaryFlux& bf,
                                   double* residual_out = nullptr) {
    const Grid2D& g = rhs.grid();
    const double h = g.h;
    const int nx = g.nx, ny = g.ny, n = g.cells();
    if (static_cast<int>(bf.left.size()) != ny || static_cast<int>(bf.right.size()) != ny ||
        static_cast<int>(bf.bottom.size()) != nx || static_cast<int>(bf.top.size()) != nx)
        throw InvalidInput("poisson_neumann: boundary flux size mismatch");

    double compat = rhs.mass() + h * bf.sum();
    if (std::abs(compat) > 1e-8)
        throw InvalidInput("poisson_neumann: incompatible data, mass(rhs) + h*sum(flux) = " +
                           std::to_string(compat));

    // The prescribed boundary faces contribute -bf/h to each boundary cell's
    // divergence, so the interior Laplacian must absorb rhs + bf/h there.
    std::vector<double> b(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) b[static_cast<size_t>(g.cell(i, j))] = rhs.at(i, j);
    for (int j = 0; j < ny; ++j) {
        b[static_cast<size_t>(g.cell(0, j))] += bf.left[static_cast<size_t>(j)] / h;
        b[static_cast<size_t>(g.cell(nx - 1, j))] += bf.right[static_cast<size_t>(j)] / h;
    }
    for (int i = 0; i < nx; ++i) {
        b[static_cast<size_t>(g.cell(i, 0))] += bf.bottom[static_cast<size_t>(i)] / h;
        b[static_cast<size_t>(g.cell(i, ny - 1))] += bf.top[static_cast<size_t>(i)] / h;
    }

    auto project_mean = [&](std::vector<double>& x) {
        double m = 0.0;
        for (double v : x) m += v;
        m /= n;
        for (double& v : x) v -= m;
    };
    project_mean(b);

    // 5-point Neumann Laplacian (interior differences only).
    auto apply_L = [&](const std::vector<double>& x, std::vector<double>& y) {
        const double ih2 = 1.0 / (h * h);
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                double c = x[static_cast<size_t>(g.cell(i, j))];
                double s = 0.0;
                if (i > 0) s += x[static_cast<size_t>(g.cell(i - 1, j))] - c;
                if (i < nx - 1) s += x[static_cast<size_t>(g.cell(i + 1, j))] - c;
                if (j > 0) s += x[static_cast<size_t>(g.cell(i, j - 1))] - c;
                if (j < ny - 1) s += x[static_cast<size_t>(g.cell(i, j + 1))] - c;
                y[static_cast<size_t>(g.cell(i, j))] = s * ih2;
            }
        }
    };

    // CG on -L u = -b (SPD on the mean-zero subspace).
    std::vector<double> x(static_cast<size_t>(n), 0.0), r(b), p, Ap(static_cast<size_t>(n));
    for (double& v : r) v = -v; // r = -b at x = 0
    p = r;
    double rr = 0.0;
    for (double v : r) rr += v * v;
    const double b_norm = std::sqrt(rr);
    double rel = (b_norm > 0.0) ? 1.0 : 0.0;
    const int max_iters = 10 * n;
    int it = 0;
    while (rel > 1e-10 && it < max_iters) {
        apply_L(p, Ap);
        for (double& v : Ap) v = -v;
        project_mean(Ap);
        double pAp = 0.0;
        for (size_t k = 0; k < Ap.size(); ++k) pAp += p[k] * Ap[k];
        if (pAp <= 0.0) break;
        double alpha = rr / pAp;
        for (size_t k = 0; k < x.size(); ++k) x[k] += alpha * p[k];
        for (size_t k = 0; k < r.size(); ++k) r[k] -= alpha * Ap[k];
        project_mean(r);
        double rr_new = 0.0;
        for (double v : r) rr_new += v * v;
        double beta = rr_new / rr;
        rr = rr_new;
        for (size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * p[k];
        rel = std::sqrt(rr) / b_norm;
        ++it;
    }
    if (rel > 1e-10 && b_norm > 0.0)
        throw SolverFailure("poisson_neumann: CG did not converge, residual " + std::to_string(rel));
    project_mean(x);
    if (residual_out) *residual_out = (b_norm > 0.0) ? rel : 0.0;

    VectorField delta(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            delta.u(i, j) = (x[static_cast<size_t>(g.cell(i, j))] - x[static_cast<size_t>(g.cell(i - 1, j))]) / h;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            delta.w(i, j) = (x[static_cast<size_t>(g.cell(i, j))] - x[static_cast<size_t>(g.cell(i, j - 1))]) / h;
    for (int j = 0; j < ny; ++j) {
        delta.u(0, j) = bf.left[static_cast<size_t>(j)];
        delta.u(nx, j) = -bf.right[static_cast<size_t>(j)];
    }
    for (int i = 0; i < nx; ++i) {
        delta.w(i, 0) = bf.bottom[static_cast<size_t>(i)];
        delta.w(i, ny) = -bf.top[static_cast<size_t>(i)];
    }
    return delta;
}

struct RegularizedTriple {
    VectorField v;
    ScalarField mu;
    ScalarField nu;
    RegularizationReport report;
};

// End-to-end smoothing pass: convolve (v, mu, nu) on the enlarged grid,
// renormalize the escaped masses by uniform constants, and cancel the
// residual boundary flux with a Neumann Poisson correction. The output field
// is boundary-parallel exactly and div(v) = mu - nu holds cellwise within
// the CG tolerance; both densities are strictly positive.
inline RegularizedTriple regularize_triple(const VectorField& v, const ScalarField& mu,
                                           const ScalarField& nu, double eps) {
    if (!(eps > 0.0)) throw InvalidInput("regularize_triple: eps must be positive");
    if (mu.grid() != v.grid() || nu.grid() != v.grid())
        throw InvalidInput("regularize_triple: grid mismatch");
    if (!mu.is_probability_density() || !nu.is_probability_density())
        throw InvalidInput("regularize_triple: mu and nu must be probability densities (mass 1, nonnegative)");
    {
        ScalarField resid = divergence(v) - (mu - nu);
        double worst = 0.0;
        for (double x : resid.values()) worst = std::max(worst, std::abs(x));
        if (worst > 1e-9)
            throw InvalidInput("regularize_triple: divergence(v) != mu - nu, max cell error " +
                               std::to_string(worst));
    }

    const Grid2D& g = v.grid();
    int pad = pad_cells(eps, g.h);
    Grid2D pg = padded_grid(g, pad);

    ScalarField mu_hat = gaussian_convolve_scalar(mu, eps);
    ScalarField nu_hat = gaussian_convolve_scalar(nu, eps);
    VectorField v_hat = gaussian_convolve_vector(v, eps);

    // Escaped mass computed tail-first per source cell; 1 - mass(mu_hat)
    // would round to zero once the escape drops below machine precision.
    detail::Kernel1D kx(eps, g.h, pg.nx), ky(eps, g.h, pg.ny);
    auto escaped_mass = [&](const ScalarField& f) {
        double total = 0.0;
        for (int j = 0; j < g.ny; ++j) {
            double ey = ky.escaped(j + pad, pg.ny);
            for (int i = 0; i < g.nx; ++i) {
                double m = f.at(i, j) * g.cell_area();
                if (m == 0.0) continue;
                double ex = kx.escaped(i + pad, pg.nx);
                total += m * (ex + ey - ex * ey);
            }
        }
        return total;
    };
    double a_eps = escaped_mass(mu);
    double b_eps = escaped_mass(nu);

    BoundaryFlux bf = boundary_flux(v_hat);
    double c_eps = bf.max_abs();

    ScalarField rhs(pg, (a_eps - b_eps) / pg.area());
    double residual = 0.0;
    VectorField delta = poisson_neumann(rhs, bf, &residual);

    RegularizedTriple out;
    out.v = v_hat + delta;
    out.v.zero_boundary_faces();
    out.mu = mu_hat;
    out.mu += a_eps / pg.area();
    out.nu = nu_hat;
    out.nu += b_eps / pg.area();
    out.report.epsilon = eps;
    out.report.a_eps = a_eps;
    out.report.b_eps = b_eps;
    out.report.c_eps = c_eps;
    out.report.poisson_residual = residual;
    out.report.floor = std::min(out.mu.min_value(), out.nu.min_value());
    return out;
}

} // namespace minflow
