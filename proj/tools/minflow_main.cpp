// minflow: batch front end for the minimal-flow toolkit.
//
// Subcommands: scenario, decompose, verify, beckmann, render.
// Exit codes: 0 success, 2 invalid input, 3 solver failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "minflow/minflow.hpp"

namespace mf = minflow;

namespace {

int thread_count(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("MINFLOW_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw mf::InvalidInput("cannot write file: " + path);
    out << text << "\n";
}

struct DecomposeArgs {
    std::string v_file, mu_file, nu_file, out_dir = ".";
    double eps = 0.03125;
    int particles = 100000;
    int steps = 64;
    uint64_t seed = 42;
    int threads = 0;
    bool write_paths = false;
    bool write_fields = false;
};

int run_decompose(const DecomposeArgs& a) {
    mf::VectorField v = mf::io::read_vector(a.v_file);
    mf::ScalarField mu = mf::io::read_scalar(a.mu_file);
    mf::ScalarField nu = mf::io::read_scalar(a.nu_file);

    mf::RegularizedTriple reg = mf::regularize_triple(v, mu, nu, a.eps);
    int nt = thread_count(a.threads);
    mf::PathEnsemble Q = mf::integrate_paths(reg.v, reg.mu, reg.nu, a.particles, a.steps, a.seed, nt);
    mf::DecompositionReport rep = mf::decomposition_report(reg.v, Q, reg.mu, reg.nu, nt);

    std::string report = "{\n  \"regularization\": " + reg.report.to_json() +
                         ",\n  \"decomposition\": " + rep.to_json() + "\n}";
    write_text(a.out_dir + "/report.json", report);
    if (a.write_paths) mf::write_paths(a.out_dir + "/paths.csv", Q);
    if (a.write_fields) {
        mf::io::write_scalar(a.out_dir + "/intensity.csv", mf::intensity(Q, reg.v.grid(), nt));
        mf::io::write_vector(a.out_dir + "/flow.csv", mf::flow(Q, reg.v.grid(), nt));
        // the regularized triple the paths were integrated against (note the
        // paths live on its enlarged grid, not the input grid)
        mf::io::write_vector(a.out_dir + "/v_reg.csv", reg.v);
        mf::io::write_scalar(a.out_dir + "/mu_reg.csv", reg.mu);
        mf::io::write_scalar(a.out_dir + "/nu_reg.csv", reg.nu);
    }
    std::cout << report << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minflow: minimal-flow decomposition and transport solvers"};
    app.require_subcommand(1);

    // --- scenario ---
    auto* sc = app.add_subcommand("scenario", "write a canned scenario as field files");
    std::string sc_name, sc_out = ".";
    int sc_n = 64;
    double sc_loop_strength = -1.0;
    sc->add_option("name", sc_name, "profile1d|separated|cycle")->required();
    sc->add_option("--out-dir", sc_out, "output directory");
    sc->add_option("--n", sc_n, "grid cells per side");
    sc->add_option("--loop-strength", sc_loop_strength, "cycle strength (separated: <0 = auto 50%)");

    // --- decompose ---
    auto* dc = app.add_subcommand("decompose", "regularize, integrate paths, report the decomposition");
    DecomposeArgs da;
    dc->add_option("--v", da.v_file, "vector field file")->required();
    dc->add_option("--mu", da.mu_file, "source density file")->required();
    dc->add_option("--nu", da.nu_file, "target density file")->required();
    dc->add_option("--eps", da.eps, "smoothing scale");
    dc->add_option("--particles", da.particles, "particle count");
    dc->add_option("--steps", da.steps, "RK4 steps");
    dc->add_option("--seed", da.seed, "RNG seed");
    dc->add_option("--threads", da.threads, "worker threads (0 = MINFLOW_THREADS or 1)");
    dc->add_option("--out-dir", da.out_dir, "output directory");
    dc->add_flag("--write-paths", da.write_paths, "also write paths.csv");
    dc->add_flag("--write-fields", da.write_fields, "also write intensity.csv and flow.csv");

    // --- verify ---
    auto* vf = app.add_subcommand("verify", "decomposition report for an existing path ensemble");
    std::string vf_v, vf_mu, vf_nu, vf_paths;
    int vf_threads = 0;
    vf->add_option("--v", vf_v)->required();
    vf->add_option("--mu", vf_mu)->required();
    vf->add_option("--nu", vf_nu)->required();
    vf->add_option("--paths", vf_paths)->required();
    vf->add_option("--threads", vf_threads);

    // --- beckmann ---
    auto* bk = app.add_subcommand("beckmann", "minimal-flow and transport LP solvers");
    bk->require_subcommand(1);
    std::string bk_mu, bk_nu, bk_src, bk_tgt, bk_cost = "euclidean", bk_out;
    int bk_iters = 20000, bk_nx = 16;
    auto* bg = bk->add_subcommand("graph", "grid-graph min-cost flow (l1 metric)");
    bg->add_option("--mu", bk_mu)->required();
    bg->add_option("--nu", bk_nu)->required();
    bg->add_option("--out", bk_out, "write the optimal field to this file");
    auto* be = bk->add_subcommand("euclidean", "primal-dual solver (Euclidean metric)");
    be->add_option("--mu", bk_mu)->required();
    be->add_option("--nu", bk_nu)->required();
    be->add_option("--iters", bk_iters);
    be->add_option("--out", bk_out, "write the field to this file");
    auto* bkk = bk->add_subcommand("kantorovich", "transportation LP on atom lists");
    bkk->add_option("--sources", bk_src)->required();
    bkk->add_option("--targets", bk_tgt)->required();
    bkk->add_option("--cost", bk_cost, "l1|euclidean|graph");
    auto* bc = bk->add_subcommand("crosscheck", "run PB (graph) and PK (l1) on one atomic instance");
    bc->add_option("--sources", bk_src)->required();
    bc->add_option("--targets", bk_tgt)->required();
    bc->add_option("--nx", bk_nx, "grid cells per side for the PB run");

    // --- render ---
    auto* rd = app.add_subcommand("render", "render a field file as a PPM heatmap");
    std::string rd_in, rd_out;
    rd->add_option("--in", rd_in)->required();
    rd->add_option("--out", rd_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sc) {
            mf::Grid2D g(sc_n, sc_n, 1.0 / sc_n);
            mf::VectorField v;
            mf::ScalarField mu, nu;
            if (sc_name == "profile1d") {
                std::tie(v, mu, nu) = mf::make_1d_profile(g);
            } else if (sc_name == "separated") {
                std::tie(v, mu, nu) = mf::make_separated_scenario(g, sc_loop_strength);
            } else if (sc_name == "cycle") {
                double s = sc_loop_strength < 0.0 ? 1.0 : sc_loop_strength;
                v = mf::make_cycle_field(g, {0.5, 0.5}, 0.25, s);
                mu = mf::ScalarField(g, 1.0);
                nu = mf::ScalarField(g, 1.0);
            } else {
                throw mf::InvalidInput("unknown scenario '" + sc_name + "'");
            }
            mf::io::write_vector(sc_out + "/v.csv", v);
            mf::io::write_scalar(sc_out + "/mu.csv", mu);
            mf::io::write_scalar(sc_out + "/nu.csv", nu);
            return 0;
        }
        if (*dc) return run_decompose(da);
        if (*vf) {
            mf::VectorField v = mf::io::read_vector(vf_v);
            mf::ScalarField mu = mf::io::read_scalar(vf_mu);
            mf::ScalarField nu = mf::io::read_scalar(vf_nu);
            mf::PathEnsemble Q = mf::read_paths(vf_paths);
            mf::DecompositionReport rep = mf::decomposition_report(v, Q, mu, nu, thread_count(vf_threads));
            std::cout << rep.to_json() << "\n";
            return 0;
        }
        if (*bg) {
            auto [field, value] = mf::solve_beckmann_graph(mf::io::read_scalar(bk_mu),
                                                           mf::io::read_scalar(bk_nu));
            if (!bk_out.empty()) mf::io::write_vector(bk_out, field);
            std::cout << "{\n  \"value\": " << mf::io::fmt17(value) << "\n}\n";
            return 0;
        }
        if (*be) {
            mf::BeckmannEuclideanResult res =
                mf::solve_beckmann_euclidean(mf::io::read_scalar(bk_mu), mf::io::read_scalar(bk_nu), bk_iters);
            if (!bk_out.empty()) mf::io::write_vector(bk_out, res.field);
            std::cout << res.to_json() << "\n";
            if (!res.converged)
                std::cerr << "warning: duality gap " << res.gap
                          << " above 1%; value is an upper bound\n";
            return 0;
        }
        if (*bkk) {
            auto [plan, value] = mf::solve_kantorovich(mf::read_atoms(bk_src), mf::read_atoms(bk_tgt),
                                                       mf::parse_cost(bk_cost));
            std::cout << "{\n  \"value\": " << mf::io::fmt17(value)
                      << ",\n  \"couplings\": " << plan.couplings.size() << "\n}\n";
            return 0;
        }
        if (*bc) {
            auto sources = mf::read_atoms(bk_src);
            auto targets = mf::read_atoms(bk_tgt);
            mf::Grid2D g(bk_nx, bk_nx, 1.0 / bk_nx);
            mf::ScalarField mu(g), nu(g);
            for (const auto& a : sources)
                mu.at(g.locate_i(a.pos.x), g.locate_j(a.pos.y)) += a.mass / g.cell_area();
            for (const auto& a : targets)
                nu.at(g.locate_i(a.pos.x), g.locate_j(a.pos.y)) += a.mass / g.cell_area();
            // snap atoms to cell centers so the two metrics agree
            auto snap = [&](std::vector<mf::Atom> atoms) {
                for (auto& a : atoms) a.pos = g.center(g.locate_i(a.pos.x), g.locate_j(a.pos.y));
                return atoms;
            };
            auto [field, pb] = mf::solve_beckmann_graph(mu, nu);
            auto [plan, pk] = mf::solve_kantorovich(snap(sources), snap(targets), mf::TransportCost::l1);
            std::cout << "{\n  \"pb_graph\": " << mf::io::fmt17(pb) << ",\n  \"pk_l1\": "
                      << mf::io::fmt17(pk) << ",\n  \"gap\": " << mf::io::fmt17(pb - pk) << "\n}\n";
            return 0;
        }
        if (*rd) {
            std::string kind = mf::io::field_kind(rd_in);
            if (kind == "scalar") mf::render_scalar(mf::io::read_scalar(rd_in), rd_out);
            else if (kind == "vector") mf::render_vector(mf::io::read_vector(rd_in), rd_out);
            else throw mf::InvalidInput(rd_in + ": unknown field kind '" + kind + "'");
            return 0;
        }
    } catch (const mf::SolverFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const mf::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
