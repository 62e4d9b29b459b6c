#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ctqw/analysis.hpp"
#include "oracles.hpp"

using namespace ctqw;
using std::numbers::pi;

namespace {

// Frozen from an independent 40-digit golden-section search over the closed
// form C_5 probabilities on [0, 200].
constexpr double c5_floor = 1.13384103048652e-3;
constexpr double c5_floor_time = 180.957737305908;

ScanOptions window(double t_max, double step = 1e-3) {
    ScanOptions o;
    o.t_max = t_max;
    o.step = step;
    return o;
}

}  // namespace

TEST(Scan, Q2UniformEarliestAtQuarterPi) {
    const auto r = uniform_mixing_scan(hypercube(2), 0, window(10.0));
    ASSERT_TRUE(r.feasible);
    ASSERT_TRUE(r.best_time.has_value());
    EXPECT_NEAR(*r.best_time, pi / 4, 1e-6);
    EXPECT_LE(r.best_distance, 1e-9);
    // under A the hits are the odd multiples of pi/4
    for (double t : r.mixing_times) {
        const double k = (t / (pi / 4) - 1.0) / 2.0;
        EXPECT_NEAR(k, std::round(k), 1e-6) << t;
    }
    EXPECT_EQ(r.mixing_times.size(), 6u);  // pi/4 ... 11pi/4 < 10
}

TEST(Scan, Q2NotUniformAtHalfPi) {
    const auto p = instantaneous_distribution(evolve(hypercube(2), 0, pi / 2));
    EXPECT_NEAR(p[3], 1.0, 1e-12);
}

TEST(Scan, HypercubesUpToFour) {
    for (std::size_t dim = 1; dim <= 4; ++dim) {
        const auto r = uniform_mixing_scan(hypercube(dim), 0, window(5.0));
        ASSERT_TRUE(r.feasible) << dim;
        EXPECT_NEAR(*r.best_time, hypercube_mixing_times(dim).first().value(), 1e-6);
        EXPECT_LE(r.best_distance, 1e-9);
    }
}

TEST(Scan, DegreeNormalisedHypercube) {
    // A/d moves the times to (2k+1) d pi / 4
    const auto times = hypercube_mixing_times(3, HamiltonianScale::degree_normalized);
    EXPECT_NEAR(times.first().value(), 3 * pi / 4, 1e-15);
    std::vector<Edge> edges = hypercube(3).edges();
    for (auto& e : edges) e.weight = 1.0 / 3.0;
    const auto p = instantaneous_distribution(evolve(WeightedGraph(8, edges), 0, 3 * pi / 4));
    EXPECT_LE(oracle::sup_to_uniform(p.probs()), 1e-12);
}

TEST(Scan, K5Floor) {
    const auto r = uniform_mixing_scan(complete_graph(5), 0, window(200.0));
    EXPECT_FALSE(r.feasible);
    // p_start >= (n-2)^2/n^2 = 9/25, so the sup gap never drops below 4/25
    EXPECT_NEAR(r.best_distance, 4.0 / 25.0, 1e-12);
    const auto ref = oracle::complete_graph_probs(5, *r.best_time);
    EXPECT_NEAR(oracle::sup_to_uniform(ref), r.best_distance, 1e-12);
    EXPECT_FALSE(r.note.empty());
}

TEST(Scan, C5Floor) {
    const auto r = uniform_mixing_scan(cycle_graph(5), 0, window(200.0));
    EXPECT_FALSE(r.feasible);
    EXPECT_GT(r.best_distance, 1e-3);
    EXPECT_NEAR(r.best_distance, c5_floor, 1e-8);
    EXPECT_NEAR(*r.best_time, c5_floor_time, 1e-4);
    EXPECT_NEAR(oracle::sup_to_uniform(oracle::c5_probs(*r.best_time)), r.best_distance, 1e-12);
}

TEST(Scan, RefinementNeverWorseThanGrid) {
    std::mt19937_64 rng(30);
    for (int rep = 0; rep < 5; ++rep) {
        const auto g = oracle::random_graph(6, 0.6, rng);
        const auto opt = window(20.0, 1e-2);
        const auto r = uniform_mixing_scan(g, 0, opt);
        double grid = 1.0;
        for (double t = 0.0; t <= opt.t_max; t += opt.step)
            grid = std::min(grid, oracle::sup_to_uniform(instantaneous_distribution(evolve(g, 0, t)).probs()));
        EXPECT_LE(r.best_distance, grid + 1e-15);
    }
}

TEST(Scan, ThreadCountDoesNotChangeResult) {
    auto one = window(30.0);
    one.threads = 1;
    auto four = window(30.0);
    four.threads = 4;
    const auto a = uniform_mixing_scan(cycle_graph(6), 0, one);
    const auto b = uniform_mixing_scan(cycle_graph(6), 0, four);
    EXPECT_EQ(a.best_distance, b.best_distance);
    EXPECT_EQ(a.best_time, b.best_time);
    EXPECT_EQ(a.mixing_times, b.mixing_times);
}

TEST(Scan, Rejects) {
    EXPECT_THROW(uniform_mixing_scan(path_graph(3), 0, window(-1.0)), std::invalid_argument);
    EXPECT_THROW(mixing_scan(path_graph(3), 0, Distribution::uniform(4)), std::invalid_argument);
    EXPECT_THROW(uniform_mixing_scan(path_graph(3), 3), std::out_of_range);
}

TEST(CompleteGraph, TimesUnderAdjacency) {
    const auto k4 = complete_graph_uniform_condition(4);
    ASSERT_TRUE(k4.feasible);
    EXPECT_TRUE(k4.times.contains(3 * pi / 4));
    EXPECT_NEAR(k4.times.first().value(), pi / 4, 1e-15);
    const auto k3 = complete_graph_uniform_condition(3);
    ASSERT_TRUE(k3.feasible);
    EXPECT_TRUE(k3.times.contains(4 * pi / 9));
    EXPECT_NEAR(k3.times.first().value(), 2 * pi / 9, 1e-15);
    EXPECT_FALSE(complete_graph_uniform_condition(5).feasible);
    EXPECT_FALSE(complete_graph_uniform_condition(9).feasible);

    for (std::size_t n : {2u, 3u, 4u})
        for (double t : complete_graph_uniform_condition(n).times.enumerate(20.0))
            EXPECT_LE(oracle::sup_to_uniform(oracle::complete_graph_probs(n, t)), 1e-12) << n << " " << t;
}

TEST(CompleteGraph, DegreeNormalisedTimes) {
    // sin^2(t n / (2 (n-1))) = n/4: K_4 at (2k+1) 3pi/4, K_3 at 4pi/9 first
    const auto k4 = complete_graph_uniform_condition(4, HamiltonianScale::degree_normalized);
    EXPECT_NEAR(k4.times.first().value(), 3 * pi / 4, 1e-15);
    const auto k3 = complete_graph_uniform_condition(3, HamiltonianScale::degree_normalized);
    EXPECT_NEAR(k3.times.first().value(), 4.0 / 3.0 * std::asin(std::sqrt(3.0) / 2), 1e-15);
    EXPECT_NEAR(k3.times.first().value(), 4 * pi / 9, 1e-15);
}

TEST(CompleteGraph, ScanAgrees) {
    const auto r = uniform_mixing_scan(complete_graph(3), 1, window(5.0));
    ASSERT_TRUE(r.feasible);
    EXPECT_NEAR(*r.best_time, 2 * pi / 9, 1e-6);
}

TEST(Claw, ClosedFormTimes) {
    for (std::size_t n = 1; n <= 6; ++n)
        for (double t : claw_mixing_times(n).enumerate(10.0))
            EXPECT_LE(oracle::sup_to_uniform(instantaneous_distribution(evolve(claw_graph(n), 0, t)).probs()), 1e-12);
}

TEST(TimeSets, Intersection) {
    MixingTimeSet a{{{1.0, 2.0}}, {}};
    MixingTimeSet b{{{0.0, 3.0}}, {5.0}};
    EXPECT_EQ(intersect(a, b, 20.0), (std::vector<double>{3.0, 5.0, 9.0, 15.0}));
    EXPECT_TRUE(a.contains(7.0));
    EXPECT_FALSE(a.contains(7.0 + 1e-6));
}

TEST(Product, K2Squared) {
    const ProductFactor k2{complete_graph(2), 0, complete_graph_uniform_condition(2).times};
    const auto r = product_uniform_mixing(k2, k2, 10.0);
    ASSERT_TRUE(r.feasible);
    EXPECT_NEAR(*r.best_time, pi / 4, 1e-15);
}

TEST(Product, Q2WithK4) {
    const ProductFactor q2{hypercube(2), 0, hypercube_mixing_times(2)};
    const ProductFactor k4{complete_graph(4), 0, complete_graph_uniform_condition(4).times};
    const auto r = product_uniform_mixing(q2, k4, 10.0);
    ASSERT_TRUE(r.feasible);
    bool has = false;
    for (double t : r.mixing_times) has |= std::abs(t - 3 * pi / 4) < 1e-9;
    EXPECT_TRUE(has);
    const auto p = oracle::series_probs(cartesian_product(hypercube(2), complete_graph(4)), 0, 3 * pi / 4);
    EXPECT_LE(oracle::sup_to_uniform(p), 1e-10);
}

TEST(Product, K3Squared) {
    const auto times = complete_graph_uniform_condition(3).times;
    const ProductFactor k3{complete_graph(3), 0, times};
    const auto r = product_uniform_mixing(k3, k3, 5.0);
    ASSERT_TRUE(r.feasible);
    bool has = false;
    for (double t : r.mixing_times) has |= std::abs(t - 4 * pi / 9) < 1e-9;
    EXPECT_TRUE(has);
    const auto p = oracle::series_probs(cartesian_product(complete_graph(3), complete_graph(3)), 0, 4 * pi / 9);
    EXPECT_LE(oracle::sup_to_uniform(p), 1e-10);
}

TEST(Product, ScannedFactorTimes) {
    const auto scanned = uniform_mixing_scan(complete_graph(2), 0, window(4.0));
    const ProductFactor a{complete_graph(2), 0, scanned.time_set()};
    const ProductFactor b{complete_graph(4), 0, complete_graph_uniform_condition(4).times};
    const auto r = product_uniform_mixing(a, b, 4.0);
    EXPECT_TRUE(r.feasible);
}

TEST(Product, NoCommonTime) {
    const ProductFactor k3{complete_graph(3), 0, complete_graph_uniform_condition(3).times};
    const ProductFactor k2{complete_graph(2), 0, complete_graph_uniform_condition(2).times};
    const auto r = product_uniform_mixing(k3, k2, 3.0);
    EXPECT_FALSE(r.feasible);
    EXPECT_FALSE(r.best_time.has_value());
}

TEST(AverageBound, CompleteGraph) {
    const auto b = average_mixing_bound(complete_graph(5));
    EXPECT_EQ(b.tau, 2u);
    EXPECT_EQ(b.lower_bound, 0.5);
    EXPECT_TRUE(b.bound_holds);
    EXPECT_GE(b.min_start_probability, 0.5 - 1e-12);
}

TEST(AverageBound, SingleVertex) {
    const auto b = average_mixing_bound(WeightedGraph(1));
    EXPECT_EQ(b.tau, 1u);
    EXPECT_EQ(b.lower_bound, 1.0);
    EXPECT_NEAR(b.start_probabilities[0], 1.0, 1e-15);
    EXPECT_TRUE(b.bound_holds);
}

TEST(AverageBound, RandomGraphs) {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 1 + rep % 12;
        const auto g = oracle::random_graph(n, 0.5, rng);
        const auto b = average_mixing_bound(g);
        EXPECT_TRUE(b.bound_holds);
        for (Vertex s = 0; s < n; ++s) {
            const auto avg = average_distribution(g, s);
            EXPECT_GE(avg[s], b.lower_bound - 1e-9);
            // some vertex, the start at least, reaches the bound
            EXPECT_GE(*std::max_element(avg.probs().begin(), avg.probs().end()), b.lower_bound - 1e-9);
        }
    }
}

TEST(AverageBound, AlmostUniformConstant) {
    // Q_4: tau = 5, n = 16. Almost-uniform with c = 2 would allow 2/16 < 1/5.
    const auto b = average_mixing_bound(hypercube(4), 2.0);
    EXPECT_EQ(b.tau, 5u);
    EXPECT_TRUE(b.almost_uniform_excluded);
    const auto loose = average_mixing_bound(hypercube(4), 4.0);
    EXPECT_FALSE(loose.almost_uniform_excluded);
}

TEST(Verdict, Examples) {
    const auto k3 = average_universal_verdict(complete_graph(3), Distribution({0.1, 0.45, 0.45}), 0);
    EXPECT_TRUE(k3.excluded);
    EXPECT_EQ(k3.tau, 2u);
    EXPECT_FALSE(k3.witness.empty());
    EXPECT_FALSE(average_universal_verdict(complete_graph(3), Distribution::point(3, 0), 0).excluded);
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rep % 8;
        const auto g = oracle::random_graph(n, 0.5, rng);
        auto p = oracle::dirichlet(n, rng);
        const double moved = p[0];
        p[0] = 0.0;
        p[1] += moved;
        EXPECT_TRUE(average_universal_verdict(g, Distribution(p), 0).excluded);
    }
}
