#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <random>

#include "minflow/beckmann.hpp"
#include "test_helpers.hpp"

using namespace minflow;

namespace {

// 1D transport oracle: for atoms on a common line with cost |x - y|, the
// monotone (sorted, north-west corner) coupling is optimal.
double sorted_matching_1d(std::vector<Atom> s, std::vector<Atom> t) {
    auto by_x = [](const Atom& a, const Atom& b) { return a.pos.x < b.pos.x; };
    std::sort(s.begin(), s.end(), by_x);
    std::sort(t.begin(), t.end(), by_x);
    double cost = 0.0;
    size_t i = 0, j = 0;
    double si = s[0].mass, tj = t[0].mass;
    while (i < s.size() && j < t.size()) {
        double m = std::min(si, tj);
        cost += m * std::abs(s[i].pos.x - t[j].pos.x);
        si -= m;
        tj -= m;
        if (si <= 1e-15) { ++i; si = (i < s.size()) ? s[i].mass : 0.0; }
        if (tj <= 1e-15) { ++j; tj = (j < t.size()) ? t[j].mass : 0.0; }
    }
    return cost;
}

} // namespace

TEST_CASE("kantorovich on a two-atom pair is mass times distance") {
    std::vector<Atom> s = {{{0.2, 0.3}, 1.0}};
    std::vector<Atom> t = {{{0.6, 0.6}, 1.0}};
    auto [plan_e, val_e] = solve_kantorovich(s, t, TransportCost::euclidean);
    REQUIRE(val_e == Catch::Approx(0.5).margin(1e-12)); // 3-4-5 triangle
    auto [plan_1, val_1] = solve_kantorovich(s, t, TransportCost::l1);
    REQUIRE(val_1 == Catch::Approx(0.7).margin(1e-12));
    auto [plan_g, val_g] = solve_kantorovich(s, t, TransportCost::graph);
    REQUIRE(val_g == val_1);
    REQUIRE(plan_e.couplings.size() == 1);
    REQUIRE(plan_e.marginal_error() < 1e-9);
}

TEST_CASE("kantorovich matches the sorted 1d matching") {
    std::vector<Atom> s = {{{0.2, 0.5}, 0.5}, {{0.4, 0.5}, 0.5}};
    std::vector<Atom> t = {{{0.5, 0.5}, 0.5}, {{0.7, 0.5}, 0.5}};
    auto [plan, val] = solve_kantorovich(s, t, TransportCost::euclidean);
    REQUIRE(val == Catch::Approx(0.3).margin(1e-9));
    REQUIRE(val == Catch::Approx(sorted_matching_1d(s, t)).margin(1e-9));

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dx(0.0, 1.0);
    for (int inst = 0; inst < 10; ++inst) {
        std::vector<Atom> ss, tt;
        int ns = 2 + int(dx(rng) * 5), nt = 2 + int(dx(rng) * 5);
        double sm = 0.0, tm = 0.0;
        for (int k = 0; k < ns; ++k) { ss.push_back({{dx(rng), 0.5}, 0.1 + dx(rng)}); sm += ss.back().mass; }
        for (int k = 0; k < nt; ++k) { tt.push_back({{dx(rng), 0.5}, 0.1 + dx(rng)}); tm += tt.back().mass; }
        for (auto& a : ss) a.mass /= sm;
        for (auto& a : tt) a.mass /= tm;
        auto [p, v] = solve_kantorovich(ss, tt, TransportCost::euclidean);
        REQUIRE(v == Catch::Approx(sorted_matching_1d(ss, tt)).margin(1e-7));
        REQUIRE(p.marginal_error() < 1e-8);
    }
}

TEST_CASE("kantorovich input validation") {
    std::vector<Atom> s = {{{0.2, 0.2}, 1.0}};
    std::vector<Atom> t = {{{0.8, 0.8}, 0.5}};
    REQUIRE_THROWS_AS(solve_kantorovich(s, t, TransportCost::euclidean), InvalidInput);
    REQUIRE_THROWS_AS(solve_kantorovich({}, t, TransportCost::euclidean), InvalidInput);
    std::vector<Atom> neg = {{{0.1, 0.1}, -1.0}, {{0.3, 0.3}, 2.0}};
    std::vector<Atom> one = {{{0.5, 0.5}, 1.0}};
    REQUIRE_THROWS_AS(solve_kantorovich(neg, one, TransportCost::euclidean), InvalidInput);
    std::vector<Atom> many(513, Atom{{0.5, 0.5}, 1.0 / 513});
    REQUIRE_THROWS_AS(solve_kantorovich(many, many, TransportCost::euclidean), InvalidInput);
}

TEST_CASE("beckmann on the grid graph moves an atom pair along the row") {
    Grid2D g = Grid2D::unit_square(8);
    ScalarField mu(g), nu(g);
    mu.at(1, 4) = 1.0 / g.cell_area();
    nu.at(6, 4) = 1.0 / g.cell_area();
    auto [field, value] = solve_beckmann_graph(mu, nu);
    REQUIRE(value == Catch::Approx(5.0 * g.h).margin(1e-9)); // 5 hops
    // flux concentrated on the row between the atoms
    for (int i = 2; i <= 6; ++i) REQUIRE(field.u(i, 4) == Catch::Approx(1.0 / g.h).margin(1e-9));
    REQUIRE(l1_distance(divergence(field), mu - nu) < 1e-8);
}

TEST_CASE("grid-graph beckmann equals l1 kantorovich on atomic marginals") {
    Grid2D g = Grid2D::unit_square(8);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int inst = 0; inst < 5; ++inst) {
        ScalarField mu(g), nu(g);
        std::vector<Atom> s, t;
        for (int k = 0; k < 4; ++k) {
            int i = int(d(rng) * 8), j = int(d(rng) * 8);
            mu.at(i, j) += 0.25 / g.cell_area();
            s.push_back({g.center(i, j), 0.25});
            i = int(d(rng) * 8);
            j = int(d(rng) * 8);
            nu.at(i, j) += 0.25 / g.cell_area();
            t.push_back({g.center(i, j), 0.25});
        }
        auto [field, pb] = solve_beckmann_graph(mu, nu);
        auto [plan, pk] = solve_kantorovich(s, t, TransportCost::l1);
        REQUIRE(pb == Catch::Approx(pk).margin(1e-8));
    }
}

TEST_CASE("euclidean beckmann on an aligned atom pair") {
    Grid2D g = Grid2D::unit_square(16);
    ScalarField mu(g), nu(g);
    mu.at(3, 8) = 1.0 / g.cell_area();
    nu.at(12, 8) = 1.0 / g.cell_area();
    double dist = (g.center(12, 8) - g.center(3, 8)).norm();

    BeckmannEuclideanResult r = solve_beckmann_euclidean(mu, nu, 4000);
    REQUIRE(r.value == Catch::Approx(dist).epsilon(0.05));
    REQUIRE(r.dual_value <= r.value + 1e-9);
    REQUIRE(r.gap >= -1e-12);
    REQUIRE(r.gap < 0.05);
    REQUIRE(r.iterations == 4000);
}

TEST_CASE("euclidean beckmann never exceeds the grid-graph value") {
    Grid2D g = Grid2D::unit_square(12);
    ScalarField mu(g), nu(g);
    mu.at(2, 2) = 1.0 / g.cell_area();
    nu.at(9, 8) = 1.0 / g.cell_area();
    auto [field, graph_val] = solve_beckmann_graph(mu, nu);
    BeckmannEuclideanResult r = solve_beckmann_euclidean(mu, nu, 4000);
    double lower = (g.center(9, 8) - g.center(2, 2)).norm();
    REQUIRE(r.value <= graph_val * 1.02);
    REQUIRE(r.value >= lower * 0.95);
}

TEST_CASE("beckmann solvers validate their inputs") {
    Grid2D g = Grid2D::unit_square(8);
    ScalarField mu(g, 1.0), nu(g, 2.0);
    REQUIRE_THROWS_AS(solve_beckmann_graph(mu, nu), InvalidInput);
    REQUIRE_THROWS_AS(solve_beckmann_euclidean(mu, nu, 100), InvalidInput);
    REQUIRE_THROWS_AS(solve_beckmann_euclidean(mu, mu, 0), InvalidInput);
}

TEST_CASE("flow_from_plan carries the coupled mass across a cut") {
    Grid2D g = Grid2D::unit_square(8);
    TransportPlan plan;
    plan.sources = {{{0.15, 0.55}, 1.0}};
    plan.targets = {{{0.85, 0.55}, 1.0}};
    plan.couplings = {{0, 0, 1.0}};
    VectorField f = flow_from_plan(plan, g);
    // total x-flux through a column whose two adjacent cells are both fully
    // crossed (the face average halves the contribution of partial cells)
    for (int i = 3; i <= 5; ++i) {
        double cut = 0.0;
        for (int j = 0; j < g.ny; ++j) cut += f.u(i, j) * g.h;
        REQUIRE(cut == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("cost functionals") {
    Grid2D g = Grid2D::unit_square(4);
    ScalarField f(g, 2.0);
    REQUIRE(CostFunctional::total_mass()(f) == Catch::Approx(2.0).margin(1e-14));
    REQUIRE(CostFunctional::p_power(2.0)(f) == Catch::Approx(4.0).margin(1e-14));
    REQUIRE_THROWS_AS(CostFunctional::p_power(1.0), InvalidInput);
    CostFunctional c = CostFunctional::custom([](double x) { return 3.0 * x; }, true);
    REQUIRE(c(f) == Catch::Approx(6.0).margin(1e-14));
    REQUIRE(c.strictly_monotone);
}

TEST_CASE("monotone harness on an exactly matched field") {
    Grid2D g = Grid2D::unit_square(6);
    int row = 3;
    Path p;
    p.points = {{0.0, (row + 0.5) * g.h}, {1.0, (row + 0.5) * g.h}};
    PathEnsemble Q;
    Q.paths = {p};
    Q.weights = {1.0};

    VectorField v(g);
    for (int i = 0; i <= g.nx; ++i) v.u(i, row) = 1.0 / g.h; // |v| == i_Q cellwise

    MonotoneHarnessReport r = monotone_harness(v, Q, CostFunctional::total_mass());
    REQUIRE(r.cellwise_excess <= 1e-12);
    REQUIRE(r.intensity_below_magnitude);
    REQUIRE(r.functional_ordered);
    REQUIRE(r.F_intensity == Catch::Approx(r.F_magnitude).margin(1e-12));
    REQUIRE(r.optimality_defect < 1e-12);

    // doubling the path weight must break the cellwise bound
    Q.weights = {2.0};
    MonotoneHarnessReport bad = monotone_harness(v, Q, CostFunctional::total_mass());
    REQUIRE_FALSE(bad.intensity_below_magnitude);
}

TEST_CASE("atoms roundtrip through CSV") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "minflow_atoms_test";
    fs::create_directories(dir);
    std::string file = (dir / "a.csv").string();
    std::vector<Atom> atoms = {{{0.25, 0.75}, 0.5}, {{1.0 / 3.0, 0.1}, 0.5}};
    write_atoms(file, atoms);
    std::vector<Atom> r = read_atoms(file);
    REQUIRE(r.size() == 2);
    REQUIRE(r[1].pos.x == atoms[1].pos.x);
    REQUIRE(r[0].mass == 0.5);
    REQUIRE_THROWS_AS(read_atoms((dir / "missing.csv").string()), InvalidInput);
    fs::remove_all(dir);
}
