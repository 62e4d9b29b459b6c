// Small tour of the library: spectrum of a claw, a weighted claw tuned to a
// target distribution, and the uniform-mixing time of K_3.
#include <cstdio>

#include "ctqw/analysis.hpp"
#include "ctqw/solvers.hpp"

int main() {
    using namespace ctqw;

    const auto star = claw_graph(3);
    const auto d = decompose(star);
    std::printf("claw K_1,3: tau = %zu, mu = %zu\n", spectral_type(d), max_multiplicity(d));

    const Distribution target({0.1, 0.2, 0.3, 0.4});
    const auto sol = solve_claw(target, 0);
    const auto p = instantaneous_distribution(evolve(sol.graph, sol.start, sol.t)).probs();
    std::printf("weighted claw at t = %.6f:", sol.t);
    for (double x : p) std::printf(" %.6f", x);
    std::printf("   (residual %.2e)\n", sol.residual);

    const auto k3 = complete_graph_uniform_condition(3);
    std::printf("K_3 is uniform first at t = %.6f\n", k3.times.first().value_or(-1.0));

    const auto avg = average_distribution(path_graph(3), 0);
    std::printf("P_3 average from an end: %.4f %.4f %.4f\n", avg[0], avg[1], avg[2]);
}
