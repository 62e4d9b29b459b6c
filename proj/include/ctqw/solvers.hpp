// solvers.hpp
// Closed-form inverse mixing: given a target distribution, produce edge
// weights and a time at which the walk from `start` hits the target exactly.
//
// Every construction reduces to a walk on a weighted 3-path
//
//     LEFT --1-- MIDDLE --alpha-- RIGHT
//
// by collapsing the graph onto three orthonormal cell vectors. The start
// vertex is LEFT (or MIDDLE for the path itself), and the weights are chosen
// so that the cell vectors span an invariant subspace of A.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/graph.hpp"
#include "ctqw/spectral.hpp"
#include "ctqw/walk.hpp"

namespace ctqw {

inline constexpr double solver_residual_limit = 1e-9;
inline constexpr double collapse_exact_limit = 1e-9;

struct MixingSolution {
    WeightedGraph graph;
    Vertex start = 0;
    double t = 0.0;
    double residual = 0.0;
    // Orthonormal cell vectors (columns) spanning an invariant subspace that
    // contains e_start. Empty when no reduction was used.
    Eigen::MatrixXd cells;
};

struct CollapsedSystem {
    Eigen::MatrixXd cell_vectors;  // n x c, orthonormal columns
    Eigen::MatrixXd reduced;       // c x c, u_c^T A u_c'
    double invariance_residual = 0.0;

    bool exact() const { return invariance_residual <= collapse_exact_limit; }
};

// Projects A onto span(cells). Rejects non-orthonormal cell vectors.
inline CollapsedSystem collapse(const WeightedGraph& g, const Eigen::MatrixXd& cells) {
    if (cells.rows() != static_cast<Eigen::Index>(g.size()) || cells.cols() == 0) {
        throw std::invalid_argument("collapse: cell vectors must be non-empty columns of length n");
    }
    const Eigen::MatrixXd gram = cells.transpose() * cells;
    const double ortho_err =
        (gram - Eigen::MatrixXd::Identity(cells.cols(), cells.cols())).cwiseAbs().maxCoeff();
    if (ortho_err > 1e-10) {
        throw std::invalid_argument("collapse: cell vectors are not orthonormal (error " +
                                    std::to_string(ortho_err) + ")");
    }
    const Eigen::MatrixXd a = g.adjacency_matrix();
    CollapsedSystem out;
    out.cell_vectors = cells;
    out.reduced = cells.transpose() * a * cells;
    const Eigen::MatrixXd leak = a * cells - cells * out.reduced;
    for (Eigen::Index c = 0; c < leak.cols(); ++c) {
        out.invariance_residual = std::max(out.invariance_residual, leak.col(c).norm());
    }
    return out;
}

// Cell vector for a vertex set with the given non-negative coefficients,
// normalised to unit length.
inline Eigen::VectorXd cell_vector(std::size_t n, const std::vector<Vertex>& vertices,
                                   const std::vector<double>& coefficients) {
    if (vertices.size() != coefficients.size()) throw std::invalid_argument("cell size mismatch");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < vertices.size(); ++i) u(static_cast<Eigen::Index>(vertices.at(i))) = coefficients[i];
    const double norm = u.norm();
    if (norm == 0.0) throw std::invalid_argument("cell vector has zero norm");
    return u / norm;
}

namespace p3 {

// Start at LEFT with weights (1, alpha). Probabilities at time t:
//   left = (1 - 2 Gamma)^2, middle = 4 Gamma (1 - Gamma Delta^2), right = alpha^2 (2 Gamma)^2
// with Delta = sqrt(1 + alpha^2), Gamma = sin^2(Delta t / 2) / Delta^2.
struct LeftStart {
    double alpha = 1.0;
    double delta = std::sqrt(2.0);
    double gamma = 0.0;
    double t = 0.0;
};

inline std::array<double, 3> left_start_probabilities(double alpha, double t) {
    const double delta = std::sqrt(1.0 + alpha * alpha);
    const double s = std::sin(delta * t / 2.0);
    const double gamma = s * s / (delta * delta);
    return {(1.0 - 2.0 * gamma) * (1.0 - 2.0 * gamma), 4.0 * gamma * (1.0 - gamma * delta * delta),
            alpha * alpha * 4.0 * gamma * gamma};
}

// Gamma * Delta^2 = (1 - sqrt(pL))/2 + pR / (2 (1 - sqrt(pL))); lies in [0,1]
// whenever pR <= 1 - pL.
inline double gamma_delta_sq(double p_left, double p_right) {
    const double one_minus = 1.0 - std::sqrt(p_left);
    return one_minus / 2.0 + p_right / (2.0 * one_minus);
}

// Principal branch 1 - 2 Gamma = +sqrt(pL). sqrt(pL) = 1 gives alpha = 1, t = 0.
inline LeftStart solve_left_start(double p_left, double p_right) {
    LeftStart out;
    const double root_left = std::sqrt(std::clamp(p_left, 0.0, 1.0));
    if (root_left >= 1.0) return out;
    const double one_minus = 1.0 - root_left;
    out.alpha = std::sqrt(std::max(p_right, 0.0)) / one_minus;
    out.delta = std::sqrt(1.0 + out.alpha * out.alpha);
    out.gamma = one_minus / 2.0;
    const double gd2 = std::clamp(gamma_delta_sq(root_left * root_left, std::max(p_right, 0.0)), 0.0, 1.0);
    out.t = 2.0 / out.delta * std::asin(std::sqrt(gd2));
    return out;
}

}  // namespace p3

namespace detail {

inline double sum_over(const Distribution& target, const std::vector<Vertex>& vs) {
    double s = 0.0;
    for (Vertex v : vs) s += target[v];
    return s;
}

// Writes `assigned` onto the family's edge set; every other family edge is
// kept with an explicit zero weight.
inline WeightedGraph assign_weights(const WeightedGraph& family,
                                    const std::map<std::pair<Vertex, Vertex>, double>& assigned) {
    std::vector<Edge> edges = family.edges();
    for (auto& e : edges) {
        auto it = assigned.find({std::min(e.u, e.v), std::max(e.u, e.v)});
        e.weight = it == assigned.end() ? 0.0 : it->second;
    }
    for (const auto& [uv, w] : assigned) {
        if (!family.has_edge(uv.first, uv.second)) {
            throw std::logic_error("solver assigned a weight outside the family edge set");
        }
    }
    return {family.size(), edges};
}

inline std::pair<Vertex, Vertex> key(Vertex a, Vertex b) { return {std::min(a, b), std::max(a, b)}; }

inline Eigen::MatrixXd stack(std::vector<Eigen::VectorXd> cols) {
    if (cols.empty()) return {};
    Eigen::MatrixXd m(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = cols[c];
    return m;
}

inline Eigen::VectorXd basis(std::size_t n, Vertex v) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(v)) = 1.0;
    return e;
}

inline void check_target(const WeightedGraph& g, const Distribution& target, Vertex start) {
    if (target.size() != g.size()) {
        throw std::invalid_argument("target has " + std::to_string(target.size()) +
                                    " entries, graph has " + std::to_string(g.size()) + " vertices");
    }
    check_start(g.size(), start);
}

// Simulates the returned (weights, t) and records the sup-norm gap.
inline MixingSolution finish(MixingSolution s, const Distribution& target) {
    const auto achieved = instantaneous_distribution(evolve(s.graph, s.start, s.t));
    s.residual = sup_distance(achieved, target);
    if (!(s.residual <= solver_residual_limit)) {
        throw std::runtime_error("internal error: solver residual " + std::to_string(s.residual) +
                                 " exceeds " + std::to_string(solver_residual_limit));
    }
    return s;
}

// Claw embedded in `family`: center adjacent to every leaf.
inline MixingSolution solve_claw_embedded(const WeightedGraph& family, Vertex center,
                                          const std::vector<Vertex>& leaves, Vertex start,
                                          const Distribution& target) {
    const std::size_t n = family.size();
    std::map<std::pair<Vertex, Vertex>, double> w;
    MixingSolution sol{family, start, 0.0, 0.0, {}};

    if (start == center) {
        // cos^2(Delta t) on the center, alpha_k^2 sin^2(Delta t) / Delta^2 on leaf k.
        const double delta = std::sqrt(sum_over(target, leaves));
        std::vector<double> alphas;
        for (Vertex k : leaves) {
            alphas.push_back(std::sqrt(target[k]));
            w[key(center, k)] = alphas.back();
        }
        std::vector<Eigen::VectorXd> cells{basis(n, center)};
        if (delta > 0.0) {
            sol.t = std::asin(std::min(1.0, delta)) / delta;
            cells.push_back(cell_vector(n, leaves, alphas));
        }
        sol.graph = assign_weights(family, w);
        sol.cells = stack(std::move(cells));
        return finish(std::move(sol), target);
    }

    // Start on a leaf: LEFT = start, MIDDLE = center, RIGHT = the other leaves
    // weighted by sqrt(p_k).
    if (std::find(leaves.begin(), leaves.end(), start) == leaves.end()) {
        throw std::invalid_argument("claw start must be the center or a leaf");
    }
    std::vector<Vertex> rest;
    for (Vertex k : leaves)
        if (k != start) rest.push_back(k);
    const double right_mass = sum_over(target, rest);
    const auto left = p3::solve_left_start(target[start], right_mass);

    w[key(start, center)] = 1.0;
    std::vector<double> profile;
    for (Vertex k : rest) {
        const double share = right_mass > 0.0 ? std::sqrt(target[k] / right_mass)
                                              : 1.0 / std::sqrt(static_cast<double>(rest.size()));
        profile.push_back(share);
        w[key(center, k)] = right_mass > 0.0 ? left.alpha * share : 0.0;
    }
    std::vector<Eigen::VectorXd> cells{basis(n, start), basis(n, center)};
    if (!rest.empty()) cells.push_back(cell_vector(n, rest, profile));
    sol.t = left.t;
    sol.graph = assign_weights(family, w);
    sol.cells = stack(std::move(cells));
    return finish(std::move(sol), target);
}

// Two-layer reduction: start -- middle layer -- far layer. Requires that the
// family contains every start-middle and middle-far edge and that no edge
// inside middle, inside far, or between start and far is needed.
//
// With P = mass on middle, Q = mass on far:
//   w(start, b) = s mu_b,  w(b, c) = s alpha mu_b rho_c,
//   mu_b = sqrt(p_b / P), rho_c = sqrt(q_c / Q), s = sqrt(P)
// collapses to s * P3(1, alpha), so the time is the P3 time divided by s.
// When P = 0 the middle profile is uniform and s = 1.
inline MixingSolution solve_two_layer(const WeightedGraph& family, Vertex start,
                                      const std::vector<Vertex>& middle, const std::vector<Vertex>& far,
                                      const Distribution& target) {
    if (middle.empty() || far.empty()) {
        throw std::invalid_argument("two-layer reduction needs non-empty middle and far layers");
    }
    const std::size_t n = family.size();
    const double p_mass = sum_over(target, middle);
    const double q_mass = sum_over(target, far);
    const auto left = p3::solve_left_start(target[start], q_mass);
    const double scale = p_mass > 0.0 ? std::sqrt(p_mass) : 1.0;

    std::vector<double> mu;
    for (Vertex b : middle) {
        mu.push_back(p_mass > 0.0 ? std::sqrt(target[b] / p_mass)
                                  : 1.0 / std::sqrt(static_cast<double>(middle.size())));
    }
    std::vector<double> rho;
    for (Vertex c : far) {
        rho.push_back(q_mass > 0.0 ? std::sqrt(target[c] / q_mass)
                                   : 1.0 / std::sqrt(static_cast<double>(far.size())));
    }

    std::map<std::pair<Vertex, Vertex>, double> w;
    for (std::size_t i = 0; i < middle.size(); ++i) {
        w[key(start, middle[i])] = scale * mu[i];
        for (std::size_t j = 0; j < far.size(); ++j) {
            w[key(middle[i], far[j])] = scale * left.alpha * mu[i] * rho[j];
        }
    }
    MixingSolution sol{assign_weights(family, w), start, left.t / scale, 0.0, {}};
    sol.cells = stack({basis(n, start), cell_vector(n, middle, mu), cell_vector(n, far, rho)});
    return finish(std::move(sol), target);
}

}  // namespace detail

enum class P3Start { left, middle };

// Weighted P3 with vertices 0 = LEFT, 1 = MIDDLE, 2 = RIGHT.
inline MixingSolution solve_p3(const Distribution& target, P3Start start) {
    if (target.size() != 3) throw std::invalid_argument("P3 target must have 3 entries");
    const WeightedGraph family = path_graph(3);
    if (start == P3Start::left) {
        const auto left = p3::solve_left_start(target[0], target[2]);
        MixingSolution sol{WeightedGraph(3, {{0, 1, 1.0}, {1, 2, left.alpha}}), 0, left.t, 0.0, {}};
        return detail::finish(std::move(sol), target);
    }
    // Start in the middle with weights (sqrt(pL), sqrt(pR)):
    //   middle = cos^2(Delta t), left = pL sin^2(Delta t) / Delta^2, Delta^2 = pL + pR.
    const double a = std::sqrt(target[0]);
    const double b = std::sqrt(target[2]);
    const double delta = std::sqrt(target[0] + target[2]);
    MixingSolution sol{WeightedGraph(3, {{0, 1, a}, {1, 2, b}}), 1, 0.0, 0.0, {}};
    if (delta > 0.0) sol.t = std::asin(std::min(1.0, delta)) / delta;
    return detail::finish(std::move(sol), target);
}

// K_{1,n}: center 0, leaves 1..n. Start is the center or any leaf.
inline MixingSolution solve_claw(const Distribution& target, Vertex start) {
    if (target.size() < 2) throw std::invalid_argument("claw target needs at least 2 entries");
    const std::size_t leaves = target.size() - 1;
    const WeightedGraph family = claw_graph(leaves);
    detail::check_target(family, target, start);
    std::vector<Vertex> leaf_ids(leaves);
    std::iota(leaf_ids.begin(), leaf_ids.end(), Vertex{1});
    return detail::solve_claw_embedded(family, 0, leaf_ids, start, target);
}

// K_{m,n}: part A = 0..m-1, part B = m..m+n-1. Targets are indexed by vertex;
// the start may lie in either part. A part of size 1 makes the graph a claw,
// which is solved as such.
inline MixingSolution solve_bipartite(std::size_t m, std::size_t n, const Distribution& target,
                                      Vertex start) {
    const auto pg = complete_multipartite({m, n});
    detail::check_target(pg.graph, target, start);
    // claw-shaped: the center is the singleton part, part A first, as in solve_claw
    if (m == 1) return detail::solve_claw_embedded(pg.graph, 0, pg.cells[1], start, target);
    if (n == 1) return detail::solve_claw_embedded(pg.graph, m, pg.cells[0], start, target);
    const auto& own = pg.cells[pg.cell_of(start)];
    const auto& other = pg.cells[1 - pg.cell_of(start)];
    std::vector<Vertex> far;
    for (Vertex v : own)
        if (v != start) far.push_back(v);
    return detail::solve_two_layer(pg.graph, start, other, far, target);
}

// Complete k-partite graph with the given part sizes (cells laid out in
// order). All parts other than the start's are merged into one layer by
// zeroing the edges among them; the result is reported on the full k-partite
// edge set.
inline MixingSolution solve_multipartite(const std::vector<std::size_t>& parts, const Distribution& target,
                                         Vertex start) {
    if (parts.size() < 2) throw std::invalid_argument("multipartite solver needs at least 2 parts");
    if (parts.size() == 2) return solve_bipartite(parts[0], parts[1], target, start);
    const auto pg = complete_multipartite(parts);
    detail::check_target(pg.graph, target, start);
    const std::size_t home = pg.cell_of(start);
    std::vector<Vertex> merged;
    for (std::size_t c = 0; c < pg.cells.size(); ++c)
        if (c != home) merged.insert(merged.end(), pg.cells[c].begin(), pg.cells[c].end());
    const auto& own = pg.cells[home];
    if (own.size() == 1) return detail::solve_claw_embedded(pg.graph, start, merged, start, target);
    std::vector<Vertex> far;
    for (Vertex v : own)
        if (v != start) far.push_back(v);
    return detail::solve_two_layer(pg.graph, start, merged, far, target);
}

// Rescales so the largest weight is 1; time scales inversely.
inline MixingSolution normalized(const MixingSolution& s, const Distribution& target) {
    double wmax = 0.0;
    for (const auto& e : s.graph.edges()) wmax = std::max(wmax, e.weight);
    if (wmax == 0.0 || wmax == 1.0) return s;
    std::vector<Edge> edges = s.graph.edges();
    for (auto& e : edges) e.weight /= wmax;
    MixingSolution out{WeightedGraph(s.graph.size(), edges), s.start, s.t * wmax, 0.0, s.cells};
    return detail::finish(std::move(out), target);
}

}  // namespace ctqw
