#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "fields.hpp"
#include "io.hpp"
#include "path_measures.hpp"

namespace minflow {

struct Atom {
    Vec2 pos;
    double mass = 0.0;
};

// Sparse coupling between two atomic measures.
struct TransportPlan {
    std::vector<Atom> sources;
    std::vector<Atom> targets;
    struct Coupling {
        int source = 0;
        int target = 0;
        double mass = 0.0;
    };
    std::vector<Coupling> couplings;

    // Worst marginal violation across rows and columns.
    double marginal_error() const {
        std::vector<double> row(sources.size(), 0.0), col(targets.size(), 0.0);
        for (const auto& c : couplings) {
            row[static_cast<size_t>(c.source)] += c.mass;
            col[static_cast<size_t>(c.target)] += c.mass;
        }
        double worst = 0.0;
        for (size_t k = 0; k < sources.size(); ++k)
            worst = std::max(worst, std::abs(row[k] - sources[k].mass));
        for (size_t k = 0; k < targets.size(); ++k)
            worst = std::max(worst, std::abs(col[k] - targets[k].mass));
        return worst;
    }
};

enum class TransportCost { euclidean, l1, graph };

inline TransportCost parse_cost(const std::string& s) {
    if (s == "euclidean") return TransportCost::euclidean;
    if (s == "l1") return TransportCost::l1;
    if (s == "graph") return TransportCost::graph;
    throw InvalidInput("unknown cost '" + s + "' (expected euclidean|l1|graph)");
}

namespace detail {

// Min-cost flow by successive shortest paths with Dijkstra and node
// potentials. Costs are nonnegative doubles; capacities and supplies are
// integers so feasibility never drifts.
class MinCostFlow {
public:
    explicit MinCostFlow(int n) : head_(static_cast<size_t>(n), -1), supply_(static_cast<size_t>(n), 0) {}

    int nodes() const { return static_cast<int>(head_.size()); }

    void add_supply(int node, int64_t s) { supply_[static_cast<size_t>(node)] += s; }

    // Returns the arc id; the reverse arc is id^1.
    int add_arc(int from, int to, int64_t cap, double cost) {
        int id = static_cast<int>(to_.size());
        to_.push_back(to);
        next_.push_back(head_[static_cast<size_t>(from)]);
        head_[static_cast<size_t>(from)] = id;
        cap_.push_back(cap);
        cost_.push_back(cost);
        to_.push_back(from);
        next_.push_back(head_[static_cast<size_t>(to)]);
        head_[static_cast<size_t>(to)] = id + 1;
        cap_.push_back(0);
        cost_.push_back(-cost);
        return id;
    }

    int64_t flow_on(int arc) const {
        return cap_[static_cast<size_t>(arc ^ 1)]; // residual of reverse arc
    }

    // Routes all supplies to all demands; throws if the network cannot.
    double solve() {
        const int n = nodes();
        std::vector<double> pot(static_cast<size_t>(n), 0.0);
        std::vector<double> dist(static_cast<size_t>(n));
        std::vector<int> par_arc(static_cast<size_t>(n));
        double total_cost = 0.0;

        int64_t remaining = 0;
        for (int64_t s : supply_)
            if (s > 0) remaining += s;

        while (remaining > 0) {
            const double inf = std::numeric_limits<double>::infinity();
            std::fill(dist.begin(), dist.end(), inf);
            std::fill(par_arc.begin(), par_arc.end(), -1);
            using QE = std::pair<double, int>;
            std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
            for (int v = 0; v < n; ++v) {
                if (supply_[static_cast<size_t>(v)] > 0) {
                    dist[static_cast<size_t>(v)] = 0.0;
                    pq.push({0.0, v});
                }
            }
            while (!pq.empty()) {
                auto [dv, v] = pq.top();
                pq.pop();
                if (dv > dist[static_cast<size_t>(v)]) continue;
                for (int e = head_[static_cast<size_t>(v)]; e != -1; e = next_[static_cast<size_t>(e)]) {
                    if (cap_[static_cast<size_t>(e)] <= 0) continue;
                    int u = to_[static_cast<size_t>(e)];
                    double red = cost_[static_cast<size_t>(e)] + pot[static_cast<size_t>(v)] -
                                 pot[static_cast<size_t>(u)];
                    if (red < 0.0) red = 0.0; // fp guard, reduced costs are >= 0
                    double nd = dv + red;
                    if (nd < dist[static_cast<size_t>(u)]) {
                        dist[static_cast<size_t>(u)] = nd;
                        par_arc[static_cast<size_t>(u)] = e;
                        pq.push({nd, u});
                    }
                }
            }

            // nearest reachable deficit node
            int sink = -1;
            double best = inf;
            for (int v = 0; v < n; ++v) {
                if (supply_[static_cast<size_t>(v)] < 0 && dist[static_cast<size_t>(v)] < best) {
                    best = dist[static_cast<size_t>(v)];
                    sink = v;
                }
            }
            if (sink == -1) throw SolverFailure("min-cost flow: no augmenting path (infeasible network)");

            int64_t push = -supply_[static_cast<size_t>(sink)];
            int src = sink;
            for (int e = par_arc[static_cast<size_t>(src)]; e != -1;) {
                push = std::min(push, cap_[static_cast<size_t>(e)]);
                src = to_[static_cast<size_t>(e ^ 1)];
                e = par_arc[static_cast<size_t>(src)];
            }
            push = std::min(push, supply_[static_cast<size_t>(src)]);

            int v = sink;
            for (int e = par_arc[static_cast<size_t>(v)]; e != -1;) {
                cap_[static_cast<size_t>(e)] -= push;
                cap_[static_cast<size_t>(e ^ 1)] += push;
                total_cost += push * cost_[static_cast<size_t>(e)];
                v = to_[static_cast<size_t>(e ^ 1)];
                e = par_arc[static_cast<size_t>(v)];
            }
            supply_[static_cast<size_t>(src)] -= push;
            supply_[static_cast<size_t>(sink)] += push;
            remaining -= push;

            for (int q = 0; q < n; ++q)
                if (dist[static_cast<size_t>(q)] < inf) pot[static_cast<size_t>(q)] += dist[static_cast<size_t>(q)];
        }
        return total_cost;
    }

private:
    std::vector<int> head_, next_, to_;
    std::vector<int64_t> cap_;
    std::vector<double> cost_;
    std::vector<int64_t> supply_;
};

constexpr int64_t kMassScale = 1000000000; // 1e9

// Scales nonnegative masses to integers summing exactly to `target`; the
// rounding residual lands on the largest atom.
inline std::vector<int64_t> scale_masses(const std::vector<double>& m, int64_t target) {
    std::vector<int64_t> out(m.size());
    int64_t sum = 0;
    size_t largest = 0;
    for (size_t k = 0; k < m.size(); ++k) {
        out[k] = static_cast<int64_t>(std::llround(m[k] * kMassScale));
        sum += out[k];
        if (m[k] > m[largest]) largest = k;
    }
    out[largest] += target - sum;
    if (out[largest] < 0) throw InvalidInput("mass scaling: repair made the largest atom negative");
    return out;
}

inline double atom_cost(const Vec2& a, const Vec2& b, TransportCost kind) {
    switch (kind) {
        case TransportCost::euclidean:
            return (a - b).norm();
        case TransportCost::l1:
        case TransportCost::graph:
            // The 4-neighbor grid graph realizes the Manhattan distance, so
            // the graph metric coincides with l1 for atoms at cell centers.
            return std::abs(a.x - b.x) + std::abs(a.y - b.y);
    }
    return 0.0;
}

} // namespace detail

// Exact transportation LP on atomic marginals, solved as min-cost flow on
// the complete bipartite graph.
inline std::pair<TransportPlan, double> solve_kantorovich(const std::vector<Atom>& sources,
                                                          const std::vector<Atom>& targets,
                                                          TransportCost cost) {
    if (sources.empty() || targets.empty()) throw InvalidInput("solve_kantorovich: empty atom list");
    if (sources.size() > 512 || targets.size() > 512)
        throw InvalidInput("solve_kantorovich: supports limited to 512 atoms each");
    double sm = 0.0, tm = 0.0;
    std::vector<double> smass, tmass;
    for (const auto& a : sources) {
        if (a.mass < 0) throw InvalidInput("solve_kantorovich: negative mass");
        sm += a.mass;
        smass.push_back(a.mass);
    }
    for (const auto& a : targets) {
        if (a.mass < 0) throw InvalidInput("solve_kantorovich: negative mass");
        tm += a.mass;
        tmass.push_back(a.mass);
    }
    if (std::abs(sm - tm) > 1e-9)
        throw InvalidInput("solve_kantorovich: source and target masses differ by " + std::to_string(sm - tm));

    const int64_t target = std::llround(0.5 * (sm + tm) * detail::kMassScale);
    auto si = detail::scale_masses(smass, target);
    auto ti = detail::scale_masses(tmass, target);

    const int ns = static_cast<int>(sources.size()), nt = static_cast<int>(targets.size());
    detail::MinCostFlow mcf(ns + nt);
    std::vector<std::vector<int>> arc_id(static_cast<size_t>(ns), std::vector<int>(static_cast<size_t>(nt)));
    for (int s = 0; s < ns; ++s)
        for (int t = 0; t < nt; ++t)
            arc_id[static_cast<size_t>(s)][static_cast<size_t>(t)] = mcf.add_arc(
                s, ns + t, std::max<int64_t>(target, 1),
                detail::atom_cost(sources[static_cast<size_t>(s)].pos,
                                                                 targets[static_cast<size_t>(t)].pos, cost));
    for (int s = 0; s < ns; ++s) mcf.add_supply(s, si[static_cast<size_t>(s)]);
    for (int t = 0; t < nt; ++t) mcf.add_supply(ns + t, -ti[static_cast<size_t>(t)]);
    mcf.solve();

    TransportPlan plan;
    plan.sources = sources;
    plan.targets = targets;
    double value = 0.0;
    for (int s = 0; s < ns; ++s) {
        for (int t = 0; t < nt; ++t) {
            int64_t f = mcf.flow_on(arc_id[static_cast<size_t>(s)][static_cast<size_t>(t)]);
            if (f > 0) {
                double m = static_cast<double>(f) / detail::kMassScale;
                plan.couplings.push_back({s, t, m});
                value += m * detail::atom_cost(sources[static_cast<size_t>(s)].pos,
                                               targets[static_cast<size_t>(t)].pos, cost);
            }
        }
    }
    return {plan, value};
}

// Beckmann problem on the 4-neighbor grid graph: minimal total flux mass
// times edge length subject to the exact discrete divergence constraint.
// The ground metric is l1 (Manhattan), matching solve_kantorovich's l1 cost.
inline std::pair<VectorField, double> solve_beckmann_graph(const ScalarField& mu,
                                                           const ScalarField& nu) {
    if (mu.grid() != nu.grid()) throw InvalidInput("solve_beckmann_graph: grid mismatch");
    if (std::abs(mu.mass() - nu.mass()) > 1e-9)
        throw InvalidInput("solve_beckmann_graph: mass imbalance " + std::to_string(mu.mass() - nu.mass()));
    const Grid2D& g = mu.grid();

    std::vector<double> mum, num;
    for (int c = 0; c < g.cells(); ++c) {
        mum.push_back(std::max(0.0, mu[static_cast<size_t>(c)]) * g.cell_area());
        num.push_back(std::max(0.0, nu[static_cast<size_t>(c)]) * g.cell_area());
    }
    double mm = 0.0, nm = 0.0;
    for (double x : mum) mm += x;
    for (double x : num) nm += x;
    const int64_t target = std::llround(0.5 * (mm + nm) * detail::kMassScale);
    auto mi = detail::scale_masses(mum, target);
    auto ni = detail::scale_masses(num, target);

    detail::MinCostFlow mcf(g.cells());
    // arc ids per interior face, forward direction +x / +y
    std::vector<int> u_arc(static_cast<size_t>((g.nx + 1) * g.ny), -1);
    std::vector<int> w_arc(static_cast<size_t>(g.nx * (g.ny + 1)), -1);
    const int64_t inf_cap = std::max<int64_t>(target, 1);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            int id = mcf.add_arc(g.cell(i - 1, j), g.cell(i, j), inf_cap, g.h);
            mcf.add_arc(g.cell(i, j), g.cell(i - 1, j), inf_cap, g.h);
            u_arc[static_cast<size_t>(j * (g.nx + 1) + i)] = id;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int id = mcf.add_arc(g.cell(i, j - 1), g.cell(i, j), inf_cap, g.h);
            mcf.add_arc(g.cell(i, j), g.cell(i, j - 1), inf_cap, g.h);
            w_arc[static_cast<size_t>(j * g.nx + i)] = id;
        }
    for (int c = 0; c < g.cells(); ++c) mcf.add_supply(c, mi[static_cast<size_t>(c)] - ni[static_cast<size_t>(c)]);
    mcf.solve();

    VectorField field(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            int id = u_arc[static_cast<size_t>(j * (g.nx + 1) + i)];
            // net mass crossing the face in +x, in units of 1/kMassScale
            int64_t net = mcf.flow_on(id) - mcf.flow_on(id + 2);
            field.u(i, j) = static_cast<double>(net) / detail::kMassScale / g.h;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int id = w_arc[static_cast<size_t>(j * g.nx + i)];
            int64_t net = mcf.flow_on(id) - mcf.flow_on(id + 2);
            field.w(i, j) = static_cast<double>(net) / detail::kMassScale / g.h;
        }

    double value = 0.0;
    for (double x : field.u_values()) value += std::abs(x);
    for (double x : field.w_values()) value += std::abs(x);
    value *= g.cell_area();
    return {field, value};
}

struct BeckmannEuclideanResult {
    VectorField field;
    double value = 0.0;      // primal objective, sum over cells of h^2 |v|
    double dual_value = 0.0; // Kantorovich potential lower bound
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;

    std::string to_json() const {
        std::string s = "{\n";
        s += "  \"value\": " + io::fmt17(value) + ",\n";
        s += "  \"dual_value\": " + io::fmt17(dual_value) + ",\n";
        s += "  \"gap\": " + io::fmt17(gap) + ",\n";
        s += "  \"iterations\": " + std::to_string(iterations) + "\n";
        s += "}";
        return s;
    }
};

// Beckmann problem with the Euclidean norm, by a first-order primal-dual
// (Chambolle-Pock) iteration. The flux lives on faces with each cell paired
// to its right and top face for the isotropic shrinkage; the dual variable
// is a cell potential, and the final dual bound comes from rescaling it to
// unit discrete gradient. Steps use the divergence operator norm bound
// sqrt(8)/h.
inline BeckmannEuclideanResult solve_beckmann_euclidean(const ScalarField& mu, const ScalarField& nu,
                                                        int n_iters) {
    if (mu.grid() != nu.grid()) throw InvalidInput("solve_beckmann_euclidean: grid mismatch");
    if (std::abs(mu.mass() - nu.mass()) > 1e-9)
        throw InvalidInput("solve_beckmann_euclidean: mass imbalance " +
                           std::to_string(mu.mass() - nu.mass()));
    if (n_iters < 1) throw InvalidInput("solve_beckmann_euclidean: n_iters must be positive");

    const Grid2D& g = mu.grid();
    const int nx = g.nx, ny = g.ny;
    const double h = g.h;
    ScalarField f = mu - nu;

    VectorField m(g), m_bar(g), m_prev(g);
    std::vector<double> psi(static_cast<size_t>(g.cells()), 0.0);

    const double step = h / std::sqrt(8.0);
    const double sigma = step, tau = step;

    for (int it = 0; it < n_iters; ++it) {
        // dual ascent on the divergence constraint
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double div = (m_bar.u(i + 1, j) - m_bar.u(i, j)) / h +
                             (m_bar.w(i, j + 1) - m_bar.w(i, j)) / h;
                psi[static_cast<size_t>(g.cell(i, j))] += sigma * (div - f.at(i, j));
            }
        // primal descent + per-cell vector shrinkage on (right face, top face)
        m_prev = m;
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i)
                m.u(i, j) += tau * (psi[static_cast<size_t>(g.cell(i, j))] -
                                    psi[static_cast<size_t>(g.cell(i - 1, j))]) / h;
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                m.w(i, j) += tau * (psi[static_cast<size_t>(g.cell(i, j))] -
                                    psi[static_cast<size_t>(g.cell(i, j - 1))]) / h;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double& a = m.u(i + 1, j);
                double& b = m.w(i, j + 1);
                if (i + 1 == nx && j + 1 == ny) continue;
                double n2 = std::hypot(i + 1 == nx ? 0.0 : a, j + 1 == ny ? 0.0 : b);
                double scale = (n2 > tau) ? (1.0 - tau / n2) : 0.0;
                if (i + 1 < nx) a *= scale;
                if (j + 1 < ny) b *= scale;
            }
        // over-relaxation
        for (size_t k = 0; k < m.u_values().size(); ++k)
            m_bar.u_values()[k] = 2.0 * m.u_values()[k] - m_prev.u_values()[k];
        for (size_t k = 0; k < m.w_values().size(); ++k)
            m_bar.w_values()[k] = 2.0 * m.w_values()[k] - m_prev.w_values()[k];
    }

    BeckmannEuclideanResult res;
    res.field = m;
    res.iterations = n_iters;

    double primal = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            primal += std::hypot(i + 1 < nx ? m.u(i + 1, j) : 0.0, j + 1 < ny ? m.w(i, j + 1) : 0.0);
    primal *= g.cell_area();
    res.value = primal;

    // dual bound: rescale psi to unit discrete gradient
    double gmax = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double gx = (i + 1 < nx) ? (psi[static_cast<size_t>(g.cell(i + 1, j))] -
                                        psi[static_cast<size_t>(g.cell(i, j))]) / h
                                     : 0.0;
            double gy = (j + 1 < ny) ? (psi[static_cast<size_t>(g.cell(i, j + 1))] -
                                        psi[static_cast<size_t>(g.cell(i, j))]) / h
                                     : 0.0;
            gmax = std::max(gmax, std::hypot(gx, gy));
        }
    double dual = 0.0;
    for (int c = 0; c < g.cells(); ++c) dual += psi[static_cast<size_t>(c)] * f[static_cast<size_t>(c)];
    dual *= g.cell_area();
    dual = -dual / std::max(1.0, gmax);
    res.dual_value = std::abs(dual);
    res.gap = (res.value > 0.0) ? (res.value - res.dual_value) / res.value : 0.0;
    res.converged = res.gap <= 0.01;
    return res;
}

// Segment flow of a transport plan: every coupling deposits the straight
// constant-speed segment between its atoms, with the same face-splitting
// rule as flow().
inline VectorField flow_from_plan(const TransportPlan& gamma, const Grid2D& grid) {
    PathEnsemble Q;
    for (const auto& c : gamma.couplings) {
        Path p;
        p.points.push_back(gamma.sources[static_cast<size_t>(c.source)].pos);
        p.points.push_back(gamma.targets[static_cast<size_t>(c.target)].pos);
        Q.paths.push_back(std::move(p));
        Q.weights.push_back(c.mass);
    }
    if (Q.paths.empty()) return VectorField(grid);
    return flow(Q, grid);
}

// Monotone cost functional over intensity-like scalar fields.
class CostFunctional {
public:
    static CostFunctional total_mass() {
        CostFunctional f;
        f.eval_ = [](const ScalarField& a) { return a.mass(); };
        f.strictly_monotone = true;
        f.name_ = "total-mass";
        return f;
    }
    static CostFunctional p_power(double p) {
        if (!(p > 1.0)) throw InvalidInput("CostFunctional::p_power: p must be > 1");
        CostFunctional f;
        f.eval_ = [p](const ScalarField& a) {
            double s = 0.0;
            for (double x : a.values()) s += std::pow(std::max(x, 0.0), p);
            return s * a.grid().cell_area();
        };
        f.strictly_monotone = true;
        f.name_ = "p-power";
        return f;
    }
    // Cellwise monotone map g applied under the cell-area integral.
    static CostFunctional custom(std::function<double(double)> g, bool strict) {
        CostFunctional f;
        f.eval_ = [g = std::move(g)](const ScalarField& a) {
            double s = 0.0;
            for (double x : a.values()) s += g(x);
            return s * a.grid().cell_area();
        };
        f.strictly_monotone = strict;
        f.name_ = "custom";
        return f;
    }

    double operator()(const ScalarField& a) const { return eval_(a); }
    const std::string& name() const { return name_; }

    bool strictly_monotone = false;

private:
    std::function<double(const ScalarField&)> eval_;
    std::string name_;
};

struct MonotoneHarnessReport {
    double cellwise_excess = 0.0;  // max over cells of i_Q - |v|
    double cellwise_tolerance = 0.0;
    double F_intensity = 0.0;
    double F_magnitude = 0.0;
    double optimality_defect = 0.0; // L1 gap between |v| and i_Q
    bool intensity_below_magnitude = false;
    bool functional_ordered = false;

    std::string to_json() const {
        std::string s = "{\n";
        s += "  \"cellwise_excess\": " + io::fmt17(cellwise_excess) + ",\n";
        s += "  \"cellwise_tolerance\": " + io::fmt17(cellwise_tolerance) + ",\n";
        s += "  \"F_intensity\": " + io::fmt17(F_intensity) + ",\n";
        s += "  \"F_magnitude\": " + io::fmt17(F_magnitude) + ",\n";
        s += "  \"optimality_defect\": " + io::fmt17(optimality_defect) + "\n";
        s += "}";
        return s;
    }
};

// Discrete shadow of the minimizer characterization: i_Q below |v| cellwise
// (within tolerance), hence F(i_Q) <= F(|v|) for monotone F; the L1 gap
// between the two is the optimality defect.
inline MonotoneHarnessReport monotone_harness(const VectorField& v, const PathEnsemble& Q,
                                              const CostFunctional& F) {
    ScalarField mag = magnitude_field(v);
    ScalarField iq = intensity(Q, v.grid());

    MonotoneHarnessReport r;
    double excess = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < mag.size(); ++k) excess = std::max(excess, iq[k] - mag[k]);
    r.cellwise_excess = excess;
    r.cellwise_tolerance = 0.02 * mag.max_value();
    r.intensity_below_magnitude = excess <= r.cellwise_tolerance;
    r.F_intensity = F(iq);
    r.F_magnitude = F(mag);
    double tol_F = 0.02 * std::abs(r.F_magnitude);
    r.functional_ordered = r.F_intensity <= r.F_magnitude + tol_F;
    r.optimality_defect = l1_distance(mag, iq);
    return r;
}

// Atom list CSV: "x, y, mass" per row; '#' lines are comments.
inline std::vector<Atom> read_atoms(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    std::vector<Atom> atoms;
    std::string line;
    std::vector<double> row;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        row.clear();
        io::detail::parse_row(line, row);
        if (row.size() != 3) throw InvalidInput(path + ": expected 'x, y, mass' rows");
        atoms.push_back({{row[0], row[1]}, row[2]});
    }
    if (atoms.empty()) throw InvalidInput(path + ": empty atom list");
    return atoms;
}

inline void write_atoms(const std::string& path, const std::vector<Atom>& atoms) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << "# x, y, mass\n";
    for (const auto& a : atoms)
        out << io::fmt17(a.pos.x) << "," << io::fmt17(a.pos.y) << "," << io::fmt17(a.mass) << "\n";
}

} // namespace minflow
