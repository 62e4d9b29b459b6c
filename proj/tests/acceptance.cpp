// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and printed with each line.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ctqw/analysis.hpp"
#include "ctqw/solvers.hpp"
#include "oracles.hpp"

using namespace ctqw;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double uniform_gap(const WeightedGraph& g, Vertex start, double t) {
    return oracle::sup_to_uniform(instantaneous_distribution(evolve(g, start, t)).probs());
}

// ---------------------------------------------------------------------------

void k2_closed_form() {
    constexpr double tol = 1e-12;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> time(0.0, 100.0);
    const auto k2 = complete_graph(2);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double t = time(rng);
        const auto p = instantaneous_distribution(evolve(k2, 0, t));
        worst = std::max({worst, std::abs(p[0] - std::cos(t) * std::cos(t)), std::abs(p[1] - std::sin(t) * std::sin(t))});
    }
    report(1, worst <= tol, "K2 closed form", "20 random t, max |p - (cos^2, sin^2)| = " + num(worst) + " (tol " + num(tol) + ")");
}

void claw_uniform() {
    constexpr double tol = 1e-10;
    double worst = 0.0;
    for (std::size_t n = 1; n <= 8; ++n) {
        const double t = std::acos(1.0 / std::sqrt(n + 1.0)) / std::sqrt(static_cast<double>(n));
        worst = std::max(worst, uniform_gap(claw_graph(n), 0, t));
    }
    report(2, worst <= tol, "claw uniform mixing", "K_{1,n}, n=1..8, max sup-gap to uniform = " + num(worst) + " (tol " + num(tol) + ")");
}

void hypercube_and_complete() {
    constexpr double tol = 1e-10;
    struct Item {
        std::string name;
        WeightedGraph g;
        double t;
    };
    const std::vector<Item> items{
        {"Q_2 at 2pi/4", hypercube(2), 2 * pi / 4},
        {"Q_3 at 3pi/4", hypercube(3), 3 * pi / 4},
        {"K_3 at 4pi/9", complete_graph(3), 4 * pi / 9},
        {"K_4 at 3pi/4", complete_graph(4), 3 * pi / 4},
    };
    bool ok = true;
    std::string detail;
    for (const auto& it : items) {
        const double gap = uniform_gap(it.g, 0, it.t);
        ok = ok && gap <= tol;
        detail += it.name + " gap " + num(gap) + (gap <= tol ? "; " : " (not uniform); ");
    }
    detail += "tol " + num(tol);
    if (!ok) {
        // Under the adjacency Hamiltonian Q_d is uniform exactly at odd
        // multiples of pi/4; t = d pi/4 is one only for odd d.
        detail += ". Q_2 is uniform at pi/4 (gap " + num(uniform_gap(hypercube(2), 0, pi / 4)) + ")";
    }
    report(3, ok, "hypercube and complete-graph mixing times", detail);
}

void solver_round_trips() {
    constexpr double tol = 1e-9;
    std::mt19937_64 rng(104);
    auto target = [&](std::size_t n) { return Distribution(oracle::dirichlet(n, rng, 0.1)); };
    auto residual = [](const MixingSolution& s, const Distribution& t) {
        return oracle::sup_diff(oracle::series_probs(s.graph, s.start, s.t), t.probs());
    };
    double worst = 0.0;
    std::size_t cases = 0;
    std::size_t errors = 0;
    auto attempt = [&](auto&& solve, const Distribution& t) {
        try {
            worst = std::max(worst, residual(solve(), t));
        } catch (const std::exception& e) {
            ++errors;
            std::printf("    solver error: %s\n", e.what());
        }
        ++cases;
    };
    for (int i = 0; i < 100; ++i) {
        const auto t = target(3);
        attempt([&] { return solve_p3(t, P3Start::left); }, t);
        attempt([&] { return solve_p3(t, P3Start::middle); }, t);
    }
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i) % 8;
        const auto t = target(n + 1);
        attempt([&] { return solve_claw(t, 0); }, t);
        const auto leaf = static_cast<Vertex>(1 + static_cast<std::size_t>(i / 8) % n);
        attempt([&] { return solve_claw(t, leaf); }, t);
    }
    std::uniform_int_distribution<std::size_t> side(1, 5);
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = side(rng);
        const std::size_t n = side(rng);
        const auto t = target(m + n);
        const auto s = std::uniform_int_distribution<Vertex>(0, m + n - 1)(rng);
        attempt([&] { return solve_bipartite(m, n, t, s); }, t);
    }
    std::uniform_int_distribution<std::size_t> kk(2, 4);
    std::uniform_int_distribution<std::size_t> part(1, 3);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::size_t> parts(kk(rng));
        std::size_t n = 0;
        for (auto& p : parts) n += (p = part(rng));
        const auto t = target(n);
        const auto s = std::uniform_int_distribution<Vertex>(0, n - 1)(rng);
        attempt([&] { return solve_multipartite(parts, t, s); }, t);
    }
    report(4, worst <= tol && errors == 0, "solver round trips",
           std::to_string(cases) + " solves (P3 both starts, claw center/leaf, K_{m,n}, k-partite), " +
               std::to_string(errors) + " errors, max simulated residual " + num(worst) + " (tol " + num(tol) + ")");
}

void collapse_fidelity() {
    constexpr double tol = 1e-9;
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> time(0.0, 50.0);
    double worst = 0.0;
    bool invariant = true;
    auto check = [&](const MixingSolution& sol) {
        const auto c = collapse(sol.graph, sol.cells);
        invariant = invariant && c.exact();
        const auto reduced = decompose(c.reduced);
        Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(c.reduced.rows());
        e0(0) = 1.0;
        for (int k = 0; k < 50; ++k) {
            const double t = time(rng);
            const Eigen::VectorXcd full = oracle::series_evolve(sol.graph.adjacency_matrix(), sol.start, t);
            const Eigen::VectorXcd projected = c.cell_vectors.cast<cplx>().adjoint() * full;
            worst = std::max(worst, (projected - apply_evolution(reduced, e0, t)).cwiseAbs().maxCoeff());
        }
    };
    // claw from a leaf, claw from the center, and the bipartite two-layer weighting
    for (std::size_t n = 2; n <= 8; ++n) {
        const auto t = Distribution(oracle::dirichlet(n + 1, rng));
        check(solve_claw(t, 1));
        check(solve_claw(t, 0));
    }
    for (std::size_t m = 2; m <= 5; ++m)
        for (std::size_t n = 2; n <= 5; ++n) check(solve_bipartite(m, n, Distribution(oracle::dirichlet(m + n, rng)), 0));
    report(5, worst <= tol && invariant, "collapse fidelity",
           "claw and K_{m,n} constructions, 50 times each, max |U^T psi - psi_reduced| = " + num(worst) +
               (invariant ? "" : ", non-invariant cell space") + " (tol " + num(tol) + ")");
}

void non_mixing_witnesses() {
    constexpr double floor_tol = 1e-3;
    // frozen regression constants (K_5: 4/25 exactly; C_5: independent high precision scan)
    constexpr double k5_floor = 4.0 / 25.0;
    constexpr double c5_floor = 1.13384103048652e-3;
    constexpr double regression_tol = 1e-8;
    ScanOptions opt;
    opt.t_max = 200.0;
    opt.step = 1e-3;
    const auto k5 = uniform_mixing_scan(complete_graph(5), 0, opt);
    const auto c5 = uniform_mixing_scan(cycle_graph(5), 0, opt);
    const bool ok = k5.best_distance > floor_tol && c5.best_distance > floor_tol &&
                    std::abs(k5.best_distance - k5_floor) <= regression_tol &&
                    std::abs(c5.best_distance - c5_floor) <= regression_tol;
    char buf[256];
    std::snprintf(buf, sizeof buf, "t in [0,200], K_5 min sup-gap %.12g at t=%.9g, C_5 min %.12g at t=%.9g (> %.0e; frozen %.12g / %.12g)",
                  k5.best_distance, k5.best_time.value_or(-1), c5.best_distance, c5.best_time.value_or(-1), floor_tol,
                  k5_floor, c5_floor);
    report(6, ok, "non-mixing witnesses", buf);
}

std::vector<std::pair<std::string, WeightedGraph>> named_families() {
    std::vector<std::pair<std::string, WeightedGraph>> out;
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u}) out.emplace_back("P_" + std::to_string(n), path_graph(n));
    for (std::size_t n : {3u, 4u, 5u, 6u, 9u}) out.emplace_back("C_" + std::to_string(n), cycle_graph(n));
    for (std::size_t n : {2u, 3u, 4u, 5u, 7u}) out.emplace_back("K_" + std::to_string(n), complete_graph(n));
    for (std::size_t n : {1u, 3u, 6u}) out.emplace_back("K_{1," + std::to_string(n) + "}", claw_graph(n));
    out.emplace_back("K_{2,3}", complete_multipartite({2, 3}).graph);
    out.emplace_back("K_{2,2,2,2}", complete_multipartite({2, 2, 2, 2}).graph);
    for (std::size_t d : {1u, 2u, 3u}) out.emplace_back("Q_" + std::to_string(d), hypercube(d));
    const std::vector<long> conn{1, 2, 6, 7};
    out.emplace_back("Circ(8;1,2)", circulant(8, conn));
    return out;
}

std::vector<std::pair<std::string, WeightedGraph>> random_graphs() {
    std::mt19937_64 rng(107);
    std::vector<std::pair<std::string, WeightedGraph>> out;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(i) % 11;
        out.emplace_back("random#" + std::to_string(i), oracle::random_graph(n, 0.5, rng));
    }
    return out;
}

void average_bound() {
    constexpr double bound_tol = 1e-9;
    constexpr double horizon = 1e4;
    constexpr double average_tol = 10.0 / horizon;
    auto graphs = random_graphs();
    for (auto& f : named_families()) graphs.push_back(std::move(f));
    double worst_slack = 1.0;
    double worst_avg = 0.0;
    std::string worst_avg_name;
    for (const auto& [name, g] : graphs) {
        const auto d = decompose(g);
        const double lb = 1.0 / static_cast<double>(spectral_type(d));
        for (Vertex s = 0; s < g.size(); ++s) {
            const auto avg = average_distribution(d, s);
            worst_slack = std::min(worst_slack, avg[s] - lb);
        }
        // trapezoid step keeps every phase increment below one radian
        const auto steps = static_cast<std::size_t>(std::ceil(horizon * 2.0 * std::max(1.0, d.spectral_radius)));
        const auto num_avg = numerical_time_average(g, 0, horizon, steps);
        const double gap = sup_distance(average_distribution(d, 0), num_avg);
        if (gap > worst_avg) {
            worst_avg = gap;
            worst_avg_name = name;
        }
    }
    const bool ok = worst_slack >= -bound_tol && worst_avg <= average_tol;
    report(7, ok, "average-mixing bound",
           std::to_string(graphs.size()) + " graphs (100 random n<=12 + named families), min(pbar_start - 1/tau) = " +
               num(worst_slack) + " (tol " + num(bound_tol) + "); max |projector - time average| at T=1e4 = " +
               num(worst_avg) + " on " + worst_avg_name + " (tol " + num(average_tol) + ")");
}

void average_impossibility() {
    constexpr double tol = 1e-9;
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    auto graphs = random_graphs();
    for (auto& f : named_families()) graphs.push_back(std::move(f));
    std::size_t tested = 0;
    std::size_t missed = 0;
    for (const auto& [name, g] : graphs) {
        if (g.size() < 2) continue;
        const auto tau = spectral_type(decompose(g));
        const double bound = 1.0 / static_cast<double>(tau);
        for (Vertex s = 0; s < g.size(); ++s) {
            // start mass strictly below 1/tau - tol, the rest spread randomly
            const double mass = frac(rng) * (bound - 2 * tol);
            auto rest = oracle::dirichlet(g.size() - 1, rng);
            std::vector<double> p;
            for (Vertex v = 0, k = 0; v < g.size(); ++v) p.push_back(v == s ? mass : (1.0 - mass) * rest[k++]);
            const auto v = average_universal_verdict(g, Distribution(p), s, tol);
            ++tested;
            if (!v.excluded) {
                ++missed;
                std::printf("    not excluded: %s start %zu\n", name.c_str(), s);
            }
        }
    }
    report(8, missed == 0, "average universal impossibility",
           std::to_string(tested) + " targets with start mass < 1/tau - 1e-9, " + std::to_string(missed) + " not reported unreachable");
}

void product_spectra() {
    constexpr double tol = 1e-9;
    std::mt19937_64 rng(109);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto g = oracle::random_graph(4, 0.7, rng);
        const auto h = oracle::random_graph(5, 0.7, rng);
        const auto dg = decompose(g);
        const auto dh = decompose(h);
        std::vector<double> sums;
        for (Eigen::Index a = 0; a < dg.eigenvalues.size(); ++a)
            for (Eigen::Index b = 0; b < dh.eigenvalues.size(); ++b) sums.push_back(dg.eigenvalues(a) + dh.eigenvalues(b));
        std::sort(sums.begin(), sums.end());
        const auto dp = decompose(cartesian_product(g, h));
        for (std::size_t k = 0; k < sums.size(); ++k)
            worst = std::max(worst, std::abs(dp.eigenvalues(static_cast<Eigen::Index>(k)) - sums[k]));
    }
    report(9, worst <= tol, "product spectra", "50 random 4x5 factor pairs, max eigenvalue mismatch " + num(worst) + " (tol " + num(tol) + ")");
}

}  // namespace

int main() {
    k2_closed_form();
    claw_uniform();
    hypercube_and_complete();
    solver_round_trips();
    collapse_fidelity();
    non_mixing_witnesses();
    average_bound();
    average_impossibility();
    product_spectra();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
