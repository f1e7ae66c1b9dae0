#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "minflow/regularize.hpp"
#include "test_helpers.hpp"

using namespace minflow;
using test::max_abs;

namespace {

// Brute-force full 2D convolution with the product kernel, zero extension.
std::vector<double> convolve_oracle(const std::vector<double>& a, int width, int height,
                                    const detail::Kernel1D& kx, const detail::Kernel1D& ky) {
    std::vector<double> out(a.size(), 0.0);
    for (int j = 0; j < height; ++j)
        for (int i = 0; i < width; ++i) {
            double s = 0.0;
            for (int dj = -ky.radius; dj <= ky.radius; ++dj) {
                int sj = j - dj;
                if (sj < 0 || sj >= height) continue;
                for (int di = -kx.radius; di <= kx.radius; ++di) {
                    int si = i - di;
                    if (si < 0 || si >= width) continue;
                    s += kx.k[size_t(di + kx.radius)] * ky.k[size_t(dj + ky.radius)] *
                         a[size_t(sj * width + si)];
                }
            }
            out[size_t(j * width + i)] = s;
        }
    return out;
}

} // namespace

TEST_CASE("pad_cells rounds the cube-root margin up to whole cells") {
    REQUIRE(pad_cells(0.125, 0.25) == 2);  // cbrt(0.125)=0.5 -> 2 cells
    REQUIRE(pad_cells(0.001, 0.05) == 2);  // cbrt(0.001)=0.1 -> 2 cells
    REQUIRE(pad_cells(0.03, 1.0 / 64) == 20);
}

TEST_CASE("kernel is normalized and escape tails are positive") {
    detail::Kernel1D k(0.05, 1.0 / 16, 40);
    double sum = 0.0;
    for (double x : k.k) sum += x;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(k.escaped(20, 41) > 0.0);
    REQUIRE(k.escaped(20, 41) < k.escaped(1, 41));
    REQUIRE(k.escaped(20, 1000000) == 0.0);
}

TEST_CASE("separable convolution matches the brute-force oracle") {
    int width = 9, height = 7;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> a(size_t(width * height));
    for (double& x : a) x = d(rng);

    detail::Kernel1D kx(0.07, 1.0 / 8, width), ky(0.07, 1.0 / 8, height);
    std::vector<double> expect = convolve_oracle(a, width, height, kx, ky);
    std::vector<double> got = a;
    detail::convolve_2d(got, width, height, kx, ky);
    for (size_t k = 0; k < a.size(); ++k)
        REQUIRE(got[k] == Catch::Approx(expect[k]).margin(1e-13));
}

TEST_CASE("smoothed density mass plus escaped mass is the original mass") {
    Grid2D g = Grid2D::unit_square(12);
    ScalarField mu = test::random_density(g, 5);
    double eps = 2.0 * g.h;
    ScalarField mu_hat = gaussian_convolve_scalar(mu, eps);

    int pad = pad_cells(eps, g.h);
    Grid2D pg = padded_grid(g, pad);
    detail::Kernel1D kx(eps, g.h, pg.nx), ky(eps, g.h, pg.ny);
    double escaped = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double ex = kx.escaped(i + pad, pg.nx), ey = ky.escaped(j + pad, pg.ny);
            escaped += mu.at(i, j) * g.cell_area() * (ex + ey - ex * ey);
        }
    REQUIRE(mu_hat.mass() + escaped == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(escaped > 0.0);
    REQUIRE(mu_hat.min_value() >= 0.0);
}

TEST_CASE("convolution commutes with the discrete divergence") {
    Grid2D g = Grid2D::unit_square(10);
    VectorField v = test::random_field(g, 17, /*boundary_parallel=*/true);
    double eps = 1.5 * g.h;
    int pad = pad_cells(eps, g.h);

    ScalarField lhs = divergence(gaussian_convolve_vector(v, eps));
    ScalarField rhs = gaussian_convolve_scalar(embed_scalar(divergence(v), 0), eps);
    // both live on the padded grid
    REQUIRE(lhs.grid() == rhs.grid());
    REQUIRE(max_abs(lhs - rhs) < 1e-10);
    (void)pad;
}

TEST_CASE("poisson_neumann recovers a known gradient field exactly") {
    Grid2D g = Grid2D::unit_square(9);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-1.0, 1.0);

    // Build a ground-truth potential, its gradient with arbitrary prescribed
    // boundary faces, and feed its divergence back to the solver.
    std::vector<double> phi(size_t(g.cells()));
    for (double& x : phi) x = d(rng);
    BoundaryFlux bf = BoundaryFlux::zero(g);
    for (double& x : bf.left) x = d(rng);
    for (double& x : bf.right) x = d(rng);
    for (double& x : bf.bottom) x = d(rng);
    for (double& x : bf.top) x = d(rng);

    VectorField truth(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            truth.u(i, j) = (phi[size_t(g.cell(i, j))] - phi[size_t(g.cell(i - 1, j))]) / g.h;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            truth.w(i, j) = (phi[size_t(g.cell(i, j))] - phi[size_t(g.cell(i, j - 1))]) / g.h;
    for (int j = 0; j < g.ny; ++j) {
        truth.u(0, j) = bf.left[size_t(j)];
        truth.u(g.nx, j) = -bf.right[size_t(j)];
    }
    for (int i = 0; i < g.nx; ++i) {
        truth.w(i, 0) = bf.bottom[size_t(i)];
        truth.w(i, g.ny) = -bf.top[size_t(i)];
    }
    ScalarField rhs = divergence(truth);

    double residual = -1.0;
    VectorField delta = poisson_neumann(rhs, bf, &residual);
    REQUIRE(residual >= 0.0);
    REQUIRE(residual <= 1e-10);
    VectorField diff = delta - truth;
    double worst = 0.0;
    for (double x : diff.u_values()) worst = std::max(worst, std::abs(x));
    for (double x : diff.w_values()) worst = std::max(worst, std::abs(x));
    REQUIRE(worst < 1e-7);
    REQUIRE(max_abs(divergence(delta) - rhs) < 1e-7);
}

TEST_CASE("poisson_neumann rejects incompatible data") {
    Grid2D g = Grid2D::unit_square(6);
    ScalarField rhs(g, 1.0); // mass 1, zero flux: incompatible
    REQUIRE_THROWS_AS(poisson_neumann(rhs, BoundaryFlux::zero(g)), InvalidInput);
}

TEST_CASE("regularize_triple postconditions") {
    Grid2D g = Grid2D::unit_square(12);
    ScalarField mu = test::random_density(g, 101);
    ScalarField nu = test::random_density(g, 102);
    // A compatible transport field: the Neumann gradient of mu - nu.
    VectorField v = poisson_neumann(mu - nu, BoundaryFlux::zero(g));
    REQUIRE(max_abs(divergence(v) - (mu - nu)) < 1e-9);

    double eps = 2.0 * g.h;
    RegularizedTriple t = regularize_triple(v, mu, nu, eps);

    REQUIRE(t.mu.grid() == padded_grid(g, pad_cells(eps, g.h)));
    REQUIRE(t.mu.mass() == Catch::Approx(1.0).margin(1e-11));
    REQUIRE(t.nu.mass() == Catch::Approx(1.0).margin(1e-11));
    REQUIRE(t.report.a_eps > 0.0);
    REQUIRE(t.report.b_eps > 0.0);
    REQUIRE(t.report.floor > 0.0);
    REQUIRE(t.report.floor == Catch::Approx(std::min(t.mu.min_value(), t.nu.min_value())));
    REQUIRE(t.v.is_boundary_parallel());
    REQUIRE(max_abs(divergence(t.v) - (t.mu - t.nu)) < 1e-7);
}

TEST_CASE("regularize_triple validates its inputs") {
    Grid2D g = Grid2D::unit_square(8);
    ScalarField mu = test::random_density(g, 1), nu = test::random_density(g, 2);
    VectorField v = poisson_neumann(mu - nu, BoundaryFlux::zero(g));

    REQUIRE_THROWS_AS(regularize_triple(v, mu, nu, 0.0), InvalidInput);
    REQUIRE_THROWS_AS(regularize_triple(v, mu * 2.0, nu, 0.1), InvalidInput);
    REQUIRE_THROWS_AS(regularize_triple(VectorField(g), mu, nu, 0.1), InvalidInput);
}
